#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ficsr/dataset.hpp"
#include "ficsr/mlp.hpp"
#include "ficsr/prior.hpp"
#include "ficsr/shift.hpp"
#include "ficsr/stats.hpp"

namespace ficsr {

enum class FragmentMode { Batch, Fold };

// Index partition of a training split into batches or folds.
struct FragmentPlan {
    FragmentMode mode = FragmentMode::Batch;
    std::vector<std::vector<std::size_t>> fragments;
    double ratio_or_k = 0.0;
    std::uint64_t seed = 0;
};

// floor(1/ratio) batches of size floor(n*ratio); remainder appended to
// the last batch.
FragmentPlan make_batch_plan(std::size_t n, double ratio, std::uint64_t seed);

// k folds, sizes differing by at most 1.
FragmentPlan make_fold_plan(std::size_t n, std::size_t k, std::uint64_t seed);

enum class Method { StCv, Ficsr, Erm, Iwerm, Eiwerm, Riwerm };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct BlobParams {
    std::size_t n_train = 2000;
    std::size_t n_test = 500;
    std::size_t d = 5;
    double class_sep = 2.0;
    double test_mean_shift = 0.0;
};

struct ExperimentConfig {
    enum class Source { Blobs, Csv };
    Source source = Source::Blobs;
    BlobParams blobs;
    std::string csv_path;
    std::string csv_label_column;
    char csv_delimiter = ',';
    bool csv_header = true;

    ShiftSpec shift;
    FragmentMode fragment_mode = FragmentMode::Batch;
    double batch_ratio = 0.1;
    std::size_t k_folds = 5;

    TrainConfig train;
    PenaltyConfig penalty;
    Method method = Method::StCv;
    std::size_t trials = 1;
    std::uint64_t base_seed = 0;
    double validation_fraction = 0.2;
    std::size_t hidden_width = 4;

    bool warm_start = true;          // diagnostic switch; FICsR default on
    double flatten_exponent = 0.5;   // EIWERM
    double riwerm_mixture = 0.5;
    double ulsif_ridge = 1e-3;
    std::size_t m_centers_cap = 100;
};

// One trial's summary for one method.
struct TrialReport {
    std::uint64_t trial_seed = 0;
    FragmentReport report;
    std::vector<std::string> warnings;
    std::size_t clipped_weight_count = 0;  // importance methods only
};

struct ExperimentResult {
    std::string protocol;
    Method method = Method::StCv;
    std::vector<TrialReport> trials;
    double mean_mu = 0.0;  // mean of per-trial mu
};

// Deterministic per-trial sub-seed derivation.
std::uint64_t derive_seed(std::uint64_t trial_seed, std::uint64_t tag);

// The (shifted, standardized) training split plus the fixed validation
// split for one trial.
struct TrialData {
    Dataset train;
    Dataset validation;
    std::vector<std::string> warnings;
};

TrialData prepare_trial(const ExperimentConfig& config, std::uint64_t trial_seed);

// BL1: train on the integral training split, validation accuracy.
ExperimentResult run_integral_cv(const ExperimentConfig& config);

// BL2 / E1: independent per-fragment training, delta vs BL1.
ExperimentResult run_fragmented_stcv(const ExperimentConfig& config);

// E2: sequential FICsR over the fragments, delta vs the matching
// fragmented st-CV mean.
ExperimentResult run_ficsr_sequential(const ExperimentConfig& config);

// E3 / E4 / BL3: k-fold setting for either method; delta of the FICsR
// variant is vs the st-CV fold-wise mean.
ExperimentResult run_kfold(const ExperimentConfig& config, Method method);

// Importance-weighting baselines (erm / iwerm / eiwerm / riwerm) on the
// integral training split with weights fit against the validation sample.
ExperimentResult run_weighted_baseline(const ExperimentConfig& config, Method method);

std::map<double, ExperimentResult> lambda_sweep(const ExperimentConfig& config,
                                                const std::vector<double>& grid);

struct NoisePair {
    ExperimentResult stcv;
    ExperimentResult ficsr;
};

std::map<double, NoisePair> noise_ablation(const ExperimentConfig& config,
                                           const std::vector<double>& std_list);

}  // namespace ficsr
