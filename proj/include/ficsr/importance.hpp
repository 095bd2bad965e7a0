#pragma once

#include <cstdint>
#include <vector>

#include "ficsr/dataset.hpp"
#include "ficsr/matrix.hpp"
#include "ficsr/mlp.hpp"

namespace ficsr {

// Gaussian-kernel density-ratio model, centers drawn from the test sample.
struct KernelRatioModel {
    Matrix centers;              // m x d
    std::vector<double> alpha;   // length m
    double kernel_width = 1.0;   // sigma > 0
    double mixture = 0.0;        // 0 = plain uLSIF
    double ridge = 1e-3;
};

struct ImportanceWeights {
    std::vector<double> values;      // >= 0 after clipping
    std::size_t clipped_count = 0;   // entries clipped to 0
};

// Median pairwise distance over the pooled sample (subsampled for large n).
double median_heuristic_width(const Matrix& train_x, const Matrix& test_x, std::uint64_t seed);

KernelRatioModel ulsif_fit(const Matrix& train_x, const Matrix& test_x, double kernel_width,
                           double ridge, std::size_t m_centers, std::uint64_t seed);

// Relative density-ratio fit; the mixture-weighted second-moment matrix
// (1-mixture)*H_train + mixture*H_test replaces uLSIF's H_train, so
// mixture = 0 reproduces ulsif_fit exactly.
KernelRatioModel rulsif_fit(const Matrix& train_x, const Matrix& test_x, double mixture,
                            double kernel_width, double ridge, std::size_t m_centers,
                            std::uint64_t seed);

ImportanceWeights weights_at(const KernelRatioModel& model, const Matrix& x);

// (1/n) sum_j CE_j * w_j^flatten_exponent, with 0^0 = 1.
double weighted_erm_loss(const MlpModel& model, const Dataset& data,
                         const ImportanceWeights& weights, double flatten_exponent);

// Per-example weights w^flatten_exponent, for weighted training.
std::vector<double> flatten_weights(const ImportanceWeights& weights, double flatten_exponent);

}  // namespace ficsr
