#pragma once

#include <vector>

#include "ficsr/dataset.hpp"
#include "ficsr/mlp.hpp"

namespace ficsr {

// Per-parameter empirical Fisher values, squared-score diagonal.
struct FisherDiagonal {
    std::vector<double> values;   // one entry per parameter, all >= 0
    std::size_t sample_count = 0;
};

// Gradient of log P(y|x) at a single example.
ParamVector per_example_score(const MlpModel& model, const std::vector<double>& x, int y);

// F_j = mean_i score_{i,j}^2 over the dataset.
FisherDiagonal empirical_fisher_diag(const MlpModel& model, const Dataset& data);

// 1/2 sum_j F_j (theta_j - theta_ref_j)^2
double kl_quadratic(const FisherDiagonal& fisher, const std::vector<double>& theta_ref,
                    const std::vector<double>& theta);

// Per-parameter variance lower bounds 1/(n F_j); +infinity where F_j = 0.
std::vector<double> crlb_bound(const FisherDiagonal& fisher, std::size_t n);

}  // namespace ficsr
