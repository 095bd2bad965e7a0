#include "ficsr/prior.hpp"

#include <stdexcept>

#include <json.hpp>

namespace ficsr {

GlobalPrior prior_init(std::size_t param_len) {
    if (param_len == 0) throw std::invalid_argument("prior_init: param_len must be >= 1");
    GlobalPrior p;
    p.theta_bar.assign(param_len, 0.0);
    p.fisher_bar.assign(param_len, 0.0);
    return p;
}

GlobalPrior prior_accumulate(GlobalPrior prior, const std::vector<double>& theta_fit,
                             const FisherDiagonal& fisher_fit) {
    if (theta_fit.size() != prior.theta_bar.size() ||
        fisher_fit.values.size() != prior.fisher_bar.size()) {
        throw std::invalid_argument("prior_accumulate: length mismatch");
    }
    prior.fragments_seen += 1;
    const double k = static_cast<double>(prior.fragments_seen);
    for (std::size_t j = 0; j < theta_fit.size(); ++j) {
        prior.theta_bar[j] += (theta_fit[j] - prior.theta_bar[j]) / k;
        prior.fisher_bar[j] += (fisher_fit.values[j] - prior.fisher_bar[j]) / k;
    }
    return prior;
}

double ficsr_penalty(const GlobalPrior& prior, const std::vector<double>& theta,
                     const PenaltyConfig& config) {
    if (theta.size() != prior.theta_bar.size()) {
        throw std::invalid_argument("ficsr_penalty: length mismatch");
    }
    if (prior.inert() || config.lambda == 0.0) return 0.0;
    double acc = 0.0;
    if (config.mode == PenaltyMode::TraceOnly) {
        for (double f : prior.fisher_bar) acc += f;
    } else {
        for (std::size_t j = 0; j < theta.size(); ++j) {
            const double d = theta[j] - prior.theta_bar[j];
            acc += prior.fisher_bar[j] * d * d;
        }
    }
    return config.lambda * acc;
}

std::vector<double> ficsr_penalty_grad(const GlobalPrior& prior, const std::vector<double>& theta,
                                       const PenaltyConfig& config) {
    if (theta.size() != prior.theta_bar.size()) {
        throw std::invalid_argument("ficsr_penalty_grad: length mismatch");
    }
    std::vector<double> grad(theta.size(), 0.0);
    if (prior.inert() || config.lambda == 0.0 || config.mode == PenaltyMode::TraceOnly) {
        return grad;
    }
    for (std::size_t j = 0; j < theta.size(); ++j) {
        grad[j] = 2.0 * config.lambda * prior.fisher_bar[j] * (theta[j] - prior.theta_bar[j]);
    }
    return grad;
}

double penalized_loss(const MlpModel& model, const Dataset& batch, const GlobalPrior& prior,
                      const PenaltyConfig& config) {
    Matrix probs = mlp_forward(model, batch.features);
    return cross_entropy(probs, batch.labels) + ficsr_penalty(prior, model.params.values, config);
}

LossAugmenter make_penalty_augmenter(const GlobalPrior& prior, const PenaltyConfig& config) {
    return [&prior, config](const std::vector<double>& params, std::vector<double>& grad) {
        std::vector<double> g = ficsr_penalty_grad(prior, params, config);
        for (std::size_t j = 0; j < g.size(); ++j) grad[j] += g[j];
        return ficsr_penalty(prior, params, config);
    };
}

std::string GlobalPrior::to_json() const {
    nlohmann::json j;
    j["theta_bar"] = theta_bar;
    j["fisher_bar"] = fisher_bar;
    j["fragments_seen"] = fragments_seen;
    return j.dump();
}

GlobalPrior GlobalPrior::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    GlobalPrior p;
    p.theta_bar = j.at("theta_bar").get<std::vector<double>>();
    p.fisher_bar = j.at("fisher_bar").get<std::vector<double>>();
    p.fragments_seen = j.at("fragments_seen").get<std::size_t>();
    if (p.theta_bar.size() != p.fisher_bar.size()) {
        throw std::invalid_argument("GlobalPrior::from_json: inconsistent lengths");
    }
    for (double f : p.fisher_bar) {
        if (f < 0.0) throw std::invalid_argument("GlobalPrior::from_json: negative Fisher entry");
    }
    return p;
}

}  // namespace ficsr
