#include "ficsr/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ficsr {

namespace {

constexpr double kProbFloor = 1e-12;

void check_chain(const std::vector<LayerShape>& shapes) {
    if (shapes.empty()) throw std::invalid_argument("mlp: no layers");
    for (const auto& s : shapes) {
        if (s.in == 0 || s.out == 0) throw std::invalid_argument("mlp: zero layer dimension");
    }
    for (std::size_t l = 1; l < shapes.size(); ++l) {
        if (shapes[l].in != shapes[l - 1].out) {
            throw std::invalid_argument("mlp: layer shapes do not chain");
        }
    }
}

double activate(double z, Activation a) {
    return a == Activation::Relu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

double activate_deriv(double z, Activation a) {
    if (a == Activation::Relu) return z > 0.0 ? 1.0 : 0.0;
    const double t = std::tanh(z);
    return 1.0 - t * t;
}

void softmax_rows(Matrix& logits) {
    for (std::size_t i = 0; i < logits.rows; ++i) {
        double* row = logits.row_ptr(i);
        double mx = row[0];
        for (std::size_t j = 1; j < logits.cols; ++j) mx = std::max(mx, row[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < logits.cols; ++j) {
            row[j] = std::exp(row[j] - mx);
            sum += row[j];
        }
        for (std::size_t j = 0; j < logits.cols; ++j) row[j] /= sum;
    }
}

// Affine layer: out = x * W + b, reading W/b from the flat vector.
Matrix affine(const Matrix& x, const ParamVector& p, std::size_t layer) {
    const LayerShape s = p.layer_shapes[layer];
    if (x.cols != s.in) throw std::invalid_argument("mlp: input width mismatch");
    Matrix w(s.in, s.out);
    std::copy_n(p.values.data() + p.weight_offset(layer), s.in * s.out, w.data.data());
    Matrix out;
    kernels::matmul(x, w, out);
    const double* b = p.values.data() + p.bias_offset(layer);
    for (std::size_t i = 0; i < out.rows; ++i) {
        double* row = out.row_ptr(i);
        for (std::size_t j = 0; j < s.out; ++j) row[j] += b[j];
    }
    return out;
}

}  // namespace

std::size_t ParamVector::total_size(const std::vector<LayerShape>& shapes) {
    std::size_t n = 0;
    for (const auto& s : shapes) n += s.in * s.out + s.out;
    return n;
}

std::size_t ParamVector::weight_offset(std::size_t layer) const {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l) {
        off += layer_shapes[l].in * layer_shapes[l].out + layer_shapes[l].out;
    }
    return off;
}

std::size_t ParamVector::bias_offset(std::size_t layer) const {
    return weight_offset(layer) + layer_shapes[layer].in * layer_shapes[layer].out;
}

MlpModel mlp_init(const std::vector<LayerShape>& shapes, std::uint64_t seed,
                  Activation hidden_activation) {
    check_chain(shapes);
    MlpModel model;
    model.hidden_activation = hidden_activation;
    model.n_classes = static_cast<int>(shapes.back().out);
    if (model.n_classes < 2) throw std::invalid_argument("mlp: need at least 2 classes");
    model.params.layer_shapes = shapes;
    model.params.values.assign(ParamVector::total_size(shapes), 0.0);
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l < shapes.size(); ++l) {
        const double bound = std::sqrt(6.0 / static_cast<double>(shapes[l].in + shapes[l].out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        double* w = model.params.values.data() + model.params.weight_offset(l);
        for (std::size_t k = 0; k < shapes[l].in * shapes[l].out; ++k) w[k] = dist(rng);
        // biases stay zero
    }
    return model;
}

Matrix mlp_forward(const MlpModel& model, const Matrix& x) {
    const auto& shapes = model.params.layer_shapes;
    Matrix a = x;
    for (std::size_t l = 0; l < shapes.size(); ++l) {
        Matrix z = affine(a, model.params, l);
        if (l + 1 < shapes.size()) {
            for (double& v : z.data) v = activate(v, model.hidden_activation);
        } else {
            softmax_rows(z);
        }
        a = std::move(z);
    }
    return a;
}

double cross_entropy(const Matrix& probs, const std::vector<int>& labels,
                     const std::vector<double>* example_weights) {
    if (probs.rows != labels.size()) throw std::invalid_argument("cross_entropy: size mismatch");
    if (example_weights && example_weights->size() != labels.size()) {
        throw std::invalid_argument("cross_entropy: weight length mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < probs.rows; ++i) {
        const int y = labels[i];
        if (y < 0 || static_cast<std::size_t>(y) >= probs.cols) {
            throw std::out_of_range("cross_entropy: label out of range");
        }
        const double p = std::max(probs(i, static_cast<std::size_t>(y)), kProbFloor);
        const double w = example_weights ? (*example_weights)[i] : 1.0;
        total += -std::log(p) * w;
    }
    return total / static_cast<double>(probs.rows);
}

ParamVector grad_loss(const MlpModel& model, const Matrix& x, const std::vector<int>& y,
                      const std::vector<double>* extra_penalty_grad,
                      const std::vector<double>* example_weights) {
    const auto& shapes = model.params.layer_shapes;
    if (x.rows != y.size()) throw std::invalid_argument("grad_loss: size mismatch");
    const std::size_t n = x.rows;

    // Forward pass keeping pre-activations.
    std::vector<Matrix> acts;   // acts[l] = input to layer l
    std::vector<Matrix> zs;     // zs[l] = pre-activation of layer l
    acts.reserve(shapes.size() + 1);
    zs.reserve(shapes.size());
    acts.push_back(x);
    for (std::size_t l = 0; l < shapes.size(); ++l) {
        Matrix z = affine(acts.back(), model.params, l);
        zs.push_back(z);
        if (l + 1 < shapes.size()) {
            for (double& v : z.data) v = activate(v, model.hidden_activation);
            acts.push_back(std::move(z));
        }
    }
    Matrix probs = zs.back();
    softmax_rows(probs);

    ParamVector grad;
    grad.layer_shapes = shapes;
    grad.values.assign(model.params.values.size(), 0.0);

    // delta at the output: (P - Y) * w_i / n
    Matrix delta = probs;
    for (std::size_t i = 0; i < n; ++i) {
        const int yi = y[i];
        if (yi < 0 || static_cast<std::size_t>(yi) >= probs.cols) {
            throw std::out_of_range("grad_loss: label out of range");
        }
        delta(i, static_cast<std::size_t>(yi)) -= 1.0;
        const double w = (example_weights ? (*example_weights)[i] : 1.0) / static_cast<double>(n);
        double* row = delta.row_ptr(i);
        for (std::size_t j = 0; j < delta.cols; ++j) row[j] *= w;
    }

    for (std::size_t li = shapes.size(); li-- > 0;) {
        // dW = A^T delta, db = column sums of delta
        Matrix dw;
        kernels::matmul_transa(acts[li], delta, dw);
        std::copy(dw.data.begin(), dw.data.end(), grad.values.begin() +
                  static_cast<std::ptrdiff_t>(grad.weight_offset(li)));
        double* db = grad.values.data() + grad.bias_offset(li);
        for (std::size_t i = 0; i < delta.rows; ++i) {
            const double* row = delta.row_ptr(i);
            for (std::size_t j = 0; j < delta.cols; ++j) db[j] += row[j];
        }
        if (li == 0) break;
        // dA = delta * W^T, then through the activation of layer li-1
        const LayerShape s = shapes[li];
        Matrix w(s.in, s.out);
        std::copy_n(model.params.values.data() + model.params.weight_offset(li), s.in * s.out,
                    w.data.data());
        Matrix da;
        kernels::matmul_transb(delta, w, da);
        const Matrix& zprev = zs[li - 1];
        for (std::size_t i = 0; i < da.rows; ++i) {
            for (std::size_t j = 0; j < da.cols; ++j) {
                da(i, j) *= activate_deriv(zprev(i, j), model.hidden_activation);
            }
        }
        delta = std::move(da);
    }

    if (extra_penalty_grad) {
        if (extra_penalty_grad->size() != grad.values.size()) {
            throw std::invalid_argument("grad_loss: penalty gradient length mismatch");
        }
        for (std::size_t k = 0; k < grad.values.size(); ++k) {
            grad.values[k] += (*extra_penalty_grad)[k];
        }
    }
    return grad;
}

void adam_step(std::vector<double>& params, const std::vector<double>& grad,
               AdamState& state, const TrainConfig& config) {
    if (params.size() != grad.size() || state.m.size() != params.size()) {
        throw std::invalid_argument("adam_step: length mismatch");
    }
    state.t += 1;
    const double b1 = config.adam_beta1;
    const double b2 = config.adam_beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    for (std::size_t k = 0; k < params.size(); ++k) {
        state.m[k] = b1 * state.m[k] + (1.0 - b1) * grad[k];
        state.v[k] = b2 * state.v[k] + (1.0 - b2) * grad[k] * grad[k];
        const double mhat = state.m[k] / bc1;
        const double vhat = state.v[k] / bc2;
        params[k] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.adam_eps);
    }
}

TrainResult train(MlpModel model, const Dataset& data, const TrainConfig& config,
                  const LossAugmenter* augmenter, const std::vector<double>* example_weights) {
    if (data.size() == 0) throw std::invalid_argument("train: empty dataset");
    AdamState state(model.params.values.size());
    TrainResult result;
    result.loss_trace.reserve(config.epochs);

    const bool full_batch = config.minibatch_size == 0 || config.minibatch_size >= data.size();
    std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> penalty_grad;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        double epoch_loss = 0.0;
        if (full_batch) {
            const std::vector<double>* pg = nullptr;
            double penalty = 0.0;
            if (augmenter) {
                penalty_grad.assign(model.params.values.size(), 0.0);
                penalty = (*augmenter)(model.params.values, penalty_grad);
                pg = &penalty_grad;
            }
            Matrix probs = mlp_forward(model, data.features);
            epoch_loss = cross_entropy(probs, data.labels, example_weights) + penalty;
            ParamVector grad = grad_loss(model, data.features, data.labels, pg, example_weights);
            adam_step(model.params.values, grad.values, state, config);
        } else {
            std::shuffle(order.begin(), order.end(), shuffle_rng);
            std::size_t batches = 0;
            for (std::size_t start = 0; start < order.size(); start += config.minibatch_size) {
                const std::size_t end = std::min(order.size(), start + config.minibatch_size);
                std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                             order.begin() + static_cast<std::ptrdiff_t>(end));
                Dataset batch = select_rows(data, idx);
                std::vector<double> wbatch;
                const std::vector<double>* wb = nullptr;
                if (example_weights) {
                    wbatch.reserve(idx.size());
                    for (std::size_t i : idx) wbatch.push_back((*example_weights)[i]);
                    wb = &wbatch;
                }
                const std::vector<double>* pg = nullptr;
                double penalty = 0.0;
                if (augmenter) {
                    penalty_grad.assign(model.params.values.size(), 0.0);
                    penalty = (*augmenter)(model.params.values, penalty_grad);
                    pg = &penalty_grad;
                }
                Matrix probs = mlp_forward(model, batch.features);
                epoch_loss += cross_entropy(probs, batch.labels, wb) + penalty;
                ParamVector grad = grad_loss(model, batch.features, batch.labels, pg, wb);
                adam_step(model.params.values, grad.values, state, config);
                ++batches;
            }
            epoch_loss /= static_cast<double>(batches);
        }
        result.loss_trace.push_back(epoch_loss);
    }
    result.model = std::move(model);
    return result;
}

double accuracy(const MlpModel& model, const Dataset& data) {
    if (data.size() == 0) throw std::invalid_argument("accuracy: empty dataset");
    Matrix probs = mlp_forward(model, data.features);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < probs.rows; ++i) {
        const double* row = probs.row_ptr(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < probs.cols; ++j) {
            if (row[j] > row[best]) best = j;
        }
        if (static_cast<int>(best) == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(probs.rows);
}

}  // namespace ficsr
