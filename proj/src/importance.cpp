#include "ficsr/importance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ficsr {

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double diff = a[j] - b[j];
        acc += diff * diff;
    }
    return acc;
}

// Kernel design matrix: K(i, l) = exp(-||x_i - c_l||^2 / (2 sigma^2))
Matrix kernel_design(const Matrix& x, const Matrix& centers, double sigma) {
    if (x.cols != centers.cols) throw std::invalid_argument("kernel: dimension mismatch");
    Matrix k(x.rows, centers.rows);
    const double denom = 2.0 * sigma * sigma;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        for (std::size_t l = 0; l < centers.rows; ++l) {
            k(ii, l) = std::exp(-sq_dist(x.row_ptr(ii), centers.row_ptr(l), x.cols) / denom);
        }
    }
    return k;
}

// H = (1/n) K^T K for a design matrix K.
Matrix second_moment(const Matrix& k) {
    Matrix h;
    kernels::matmul_transa(k, k, h);
    for (double& v : h.data) v /= static_cast<double>(k.rows);
    return h;
}

// Cholesky solve of the SPD system a x = b; a is overwritten.
std::vector<double> cholesky_solve(Matrix a, std::vector<double> b) {
    const std::size_t m = a.rows;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= a(i, k) * a(j, k);
            if (i == j) {
                if (sum <= 0.0) {
                    throw std::runtime_error(
                        "ulsif: kernel system not positive definite; increase the ridge");
                }
                a(i, j) = std::sqrt(sum);
            } else {
                a(i, j) = sum / a(j, j);
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        double sum = b[i];
        for (std::size_t k = 0; k < i; ++k) sum -= a(i, k) * b[k];
        b[i] = sum / a(i, i);
    }
    for (std::size_t i = m; i-- > 0;) {
        double sum = b[i];
        for (std::size_t k = i + 1; k < m; ++k) sum -= a(k, i) * b[k];
        b[i] = sum / a(i, i);
    }
    return b;
}

Matrix draw_centers(const Matrix& test_x, std::size_t m_centers, std::uint64_t seed) {
    if (m_centers == 0 || m_centers > test_x.rows) {
        throw std::invalid_argument("ulsif: m_centers must be in [1, n_test]");
    }
    std::vector<std::size_t> idx(test_x.rows);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    Matrix centers(m_centers, test_x.cols);
    for (std::size_t l = 0; l < m_centers; ++l) {
        std::copy_n(test_x.row_ptr(idx[l]), test_x.cols, centers.row_ptr(l));
    }
    return centers;
}

void check_symmetric(const Matrix& h) {
    for (std::size_t i = 0; i < h.rows; ++i) {
        for (std::size_t j = i + 1; j < h.cols; ++j) {
            if (std::abs(h(i, j) - h(j, i)) > 1e-10) {
                throw std::runtime_error("ulsif: assembled kernel moment matrix is asymmetric");
            }
        }
    }
}

}  // namespace

double median_heuristic_width(const Matrix& train_x, const Matrix& test_x, std::uint64_t seed) {
    if (train_x.cols != test_x.cols) throw std::invalid_argument("width: dimension mismatch");
    const std::size_t n = train_x.rows + test_x.rows;
    auto row = [&](std::size_t i) {
        return i < train_x.rows ? train_x.row_ptr(i) : test_x.row_ptr(i - train_x.rows);
    };
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::size_t cap = 500;
    if (n > cap) {
        std::mt19937_64 rng(seed);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(cap);
    }
    std::vector<double> dists;
    dists.reserve(idx.size() * (idx.size() - 1) / 2);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = i + 1; j < idx.size(); ++j) {
            dists.push_back(std::sqrt(sq_dist(row(idx[i]), row(idx[j]), train_x.cols)));
        }
    }
    if (dists.empty()) return 1.0;
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2),
                     dists.end());
    const double med = dists[dists.size() / 2];
    return med > 1e-12 ? med : 1.0;
}

KernelRatioModel rulsif_fit(const Matrix& train_x, const Matrix& test_x, double mixture,
                            double kernel_width, double ridge, std::size_t m_centers,
                            std::uint64_t seed) {
    if (train_x.rows == 0 || test_x.rows == 0) {
        throw std::invalid_argument("ulsif: empty sample");
    }
    if (!(mixture >= 0.0 && mixture < 1.0)) {
        throw std::invalid_argument("rulsif: mixture must be in [0,1)");
    }
    if (kernel_width <= 0.0) throw std::invalid_argument("ulsif: kernel_width must be > 0");
    if (ridge <= 0.0) throw std::invalid_argument("ulsif: ridge must be > 0");

    KernelRatioModel model;
    model.centers = draw_centers(test_x, m_centers, seed);
    model.kernel_width = kernel_width;
    model.mixture = mixture;
    model.ridge = ridge;

    const Matrix k_train = kernel_design(train_x, model.centers, kernel_width);
    Matrix h = second_moment(k_train);
    if (mixture != 0.0) {
        const Matrix k_test = kernel_design(test_x, model.centers, kernel_width);
        const Matrix h_test = second_moment(k_test);
        for (std::size_t k = 0; k < h.data.size(); ++k) {
            h.data[k] = (1.0 - mixture) * h.data[k] + mixture * h_test.data[k];
        }
    }
    check_symmetric(h);
    for (std::size_t i = 0; i < h.rows; ++i) h(i, i) += ridge;

    const Matrix k_test_mean = kernel_design(test_x, model.centers, kernel_width);
    std::vector<double> hvec(m_centers, 0.0);
    for (std::size_t i = 0; i < k_test_mean.rows; ++i) {
        const double* row = k_test_mean.row_ptr(i);
        for (std::size_t l = 0; l < m_centers; ++l) hvec[l] += row[l];
    }
    for (double& v : hvec) v /= static_cast<double>(test_x.rows);

    model.alpha = cholesky_solve(std::move(h), std::move(hvec));
    return model;
}

KernelRatioModel ulsif_fit(const Matrix& train_x, const Matrix& test_x, double kernel_width,
                           double ridge, std::size_t m_centers, std::uint64_t seed) {
    return rulsif_fit(train_x, test_x, 0.0, kernel_width, ridge, m_centers, seed);
}

ImportanceWeights weights_at(const KernelRatioModel& model, const Matrix& x) {
    const Matrix k = kernel_design(x, model.centers, model.kernel_width);
    ImportanceWeights out;
    out.values.assign(x.rows, 0.0);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double* row = k.row_ptr(i);
        double acc = 0.0;
        for (std::size_t l = 0; l < model.centers.rows; ++l) acc += model.alpha[l] * row[l];
        if (acc < 0.0) {
            acc = 0.0;
            out.clipped_count += 1;
        }
        out.values[i] = acc;
    }
    return out;
}

std::vector<double> flatten_weights(const ImportanceWeights& weights, double flatten_exponent) {
    if (!(flatten_exponent >= 0.0 && flatten_exponent <= 1.0)) {
        throw std::invalid_argument("flatten_weights: exponent must be in [0,1]");
    }
    std::vector<double> out(weights.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        // convention 0^0 = 1
        out[i] = flatten_exponent == 0.0 ? 1.0 : std::pow(weights.values[i], flatten_exponent);
    }
    return out;
}

double weighted_erm_loss(const MlpModel& model, const Dataset& data,
                         const ImportanceWeights& weights, double flatten_exponent) {
    if (weights.values.size() != data.size()) {
        throw std::invalid_argument("weighted_erm_loss: weight length mismatch");
    }
    const std::vector<double> w = flatten_weights(weights, flatten_exponent);
    const Matrix probs = mlp_forward(model, data.features);
    return cross_entropy(probs, data.labels, &w);
}

}  // namespace ficsr
