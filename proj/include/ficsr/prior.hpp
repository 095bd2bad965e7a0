#pragma once

#include <string>
#include <vector>

#include "ficsr/dataset.hpp"
#include "ficsr/fisher.hpp"
#include "ficsr/mlp.hpp"

namespace ficsr {

// Running mean of fitted fragment parameters and Fisher diagonals.
// Memory is 2 * param_len reals plus a counter, independent of data size.
struct GlobalPrior {
    std::vector<double> theta_bar;
    std::vector<double> fisher_bar;
    std::size_t fragments_seen = 0;

    bool inert() const { return fragments_seen == 0; }

    std::string to_json() const;
    static GlobalPrior from_json(const std::string& text);
};

enum class PenaltyMode {
    Anchored,   // lambda * sum_j Fbar_j (theta_j - thetabar_j)^2
    TraceOnly,  // lambda * sum_j Fbar_j, parameter-independent (diagnostic)
};

struct PenaltyConfig {
    double lambda = 0.1;
    PenaltyMode mode = PenaltyMode::Anchored;
};

GlobalPrior prior_init(std::size_t param_len);

GlobalPrior prior_accumulate(GlobalPrior prior, const std::vector<double>& theta_fit,
                             const FisherDiagonal& fisher_fit);

double ficsr_penalty(const GlobalPrior& prior, const std::vector<double>& theta,
                     const PenaltyConfig& config);

std::vector<double> ficsr_penalty_grad(const GlobalPrior& prior, const std::vector<double>& theta,
                                       const PenaltyConfig& config);

double penalized_loss(const MlpModel& model, const Dataset& batch, const GlobalPrior& prior,
                      const PenaltyConfig& config);

// Augmenter handing the penalty and its gradient to train().
LossAugmenter make_penalty_augmenter(const GlobalPrior& prior, const PenaltyConfig& config);

}  // namespace ficsr
