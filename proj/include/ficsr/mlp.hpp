#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ficsr/dataset.hpp"
#include "ficsr/matrix.hpp"

namespace ficsr {

struct LayerShape {
    std::size_t in = 0;
    std::size_t out = 0;
};

// Flattened view of all weights and biases. Layout per layer:
// weights (in*out, row-major) followed by biases (out).
struct ParamVector {
    std::vector<LayerShape> layer_shapes;
    std::vector<double> values;

    static std::size_t total_size(const std::vector<LayerShape>& shapes);
    std::size_t weight_offset(std::size_t layer) const;
    std::size_t bias_offset(std::size_t layer) const;
};

enum class Activation { Relu, Tanh };

struct MlpModel {
    ParamVector params;
    Activation hidden_activation = Activation::Relu;
    int n_classes = 0;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t epochs = 1500;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;
    std::size_t minibatch_size = 0;  // 0 = full batch
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// Penalty hook added to the training loss. Given the current parameter
// values, returns the penalty value and accumulates its gradient into
// grad (same length, pre-zeroed by the caller).
using LossAugmenter =
    std::function<double(const std::vector<double>& params, std::vector<double>& grad)>;

struct TrainResult {
    MlpModel model;
    std::vector<double> loss_trace;  // one entry per epoch
};

// Scaled-uniform init, bound +/- sqrt(6/(in+out)); biases zero.
MlpModel mlp_init(const std::vector<LayerShape>& shapes, std::uint64_t seed,
                  Activation hidden_activation = Activation::Relu);

// Class probabilities, one row per input row; rows sum to 1.
Matrix mlp_forward(const MlpModel& model, const Matrix& x);

// Mean negative log of the true-class probability, probabilities floored
// at 1e-12 before the log. Optional per-example weights scale each term.
double cross_entropy(const Matrix& probs, const std::vector<int>& labels,
                     const std::vector<double>* example_weights = nullptr);

// Gradient of cross_entropy w.r.t. every parameter, plus an optional
// additive penalty gradient.
ParamVector grad_loss(const MlpModel& model, const Matrix& x, const std::vector<int>& y,
                      const std::vector<double>* extra_penalty_grad = nullptr,
                      const std::vector<double>* example_weights = nullptr);

// Standard Adam with bias correction; updates params and state in place.
void adam_step(std::vector<double>& params, const std::vector<double>& grad,
               AdamState& state, const TrainConfig& config);

// Full-batch (or minibatched) Adam on cross_entropy plus the augmenter.
TrainResult train(MlpModel model, const Dataset& data, const TrainConfig& config,
                  const LossAugmenter* augmenter = nullptr,
                  const std::vector<double>* example_weights = nullptr);

// Fraction of rows whose argmax probability matches the label.
double accuracy(const MlpModel& model, const Dataset& data);

}  // namespace ficsr
