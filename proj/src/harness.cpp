#include "ficsr/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "ficsr/csvio.hpp"
#include "ficsr/fisher.hpp"
#include "ficsr/importance.hpp"

namespace ficsr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::vector<LayerShape> model_shapes(const ExperimentConfig& config, const Dataset& train) {
    return {{train.dim(), config.hidden_width},
            {config.hidden_width, static_cast<std::size_t>(train.n_classes)}};
}

// Synthetic raster dataset for the rotation-shift path: horizontal vs
// vertical bar on a 9x9 grid plus pixel noise. Train angles follow
// Beta(a, b), the validation side Beta(b, a).
std::pair<Dataset, Dataset> make_rotated_bars(std::size_t n_train, std::size_t n_val, double a,
                                              double b, std::uint64_t seed) {
    constexpr std::size_t kSide = 9;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::bernoulli_distribution coin(0.5);
    auto make = [&](std::size_t n, double beta_a, double beta_b) {
        Dataset ds;
        ds.n_classes = 2;
        ds.features = Matrix(n, kSide * kSide);
        ds.labels.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const int label = coin(rng) ? 1 : 0;
            ds.labels[i] = label;
            Image img;
            img.width = kSide;
            img.height = kSide;
            img.pixels.assign(kSide * kSide, 0.0);
            for (std::size_t t = 0; t < kSide; ++t) {
                if (label == 0) {
                    img.pixels[(kSide / 2) * kSide + t] = 1.0;  // horizontal bar
                } else {
                    img.pixels[t * kSide + kSide / 2] = 1.0;  // vertical bar
                }
            }
            const double angle = 180.0 * beta_sample(beta_a, beta_b, rng);
            Image rot = rotate_single(img, angle);
            for (std::size_t p = 0; p < rot.pixels.size(); ++p) {
                ds.features(i, p) = rot.pixels[p] + noise(rng);
            }
        }
        return ds;
    };
    Dataset train = make(n_train, a, b);
    Dataset val = make(n_val, b, a);
    return {std::move(train), std::move(val)};
}

Dataset load_config_csv(const ExperimentConfig& config) {
    CsvDatasetSchema schema;
    schema.path = config.csv_path;
    schema.label_column = config.csv_label_column;
    schema.delimiter = config.csv_delimiter;
    schema.header = config.csv_header;
    return load_csv_dataset(schema);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t trial_seed, std::uint64_t tag) {
    return splitmix64(trial_seed ^ splitmix64(tag));
}

FragmentPlan make_batch_plan(std::size_t n, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio <= 1.0)) {
        throw std::invalid_argument("make_batch_plan: ratio must be in (0,1]");
    }
    const std::size_t frag_size = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * ratio));
    if (frag_size == 0) throw std::invalid_argument("make_batch_plan: fragment size 0");
    const std::size_t n_frags = static_cast<std::size_t>(std::floor(1.0 / ratio));

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    FragmentPlan plan;
    plan.mode = FragmentMode::Batch;
    plan.ratio_or_k = ratio;
    plan.seed = seed;
    plan.fragments.resize(n_frags);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < n_frags; ++f) {
        for (std::size_t i = 0; i < frag_size; ++i) plan.fragments[f].push_back(idx[pos++]);
    }
    // remainder goes to the last fragment
    while (pos < n) plan.fragments.back().push_back(idx[pos++]);
    return plan;
}

FragmentPlan make_fold_plan(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > n) throw std::invalid_argument("make_fold_plan: need 2 <= k <= n");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    FragmentPlan plan;
    plan.mode = FragmentMode::Fold;
    plan.ratio_or_k = static_cast<double>(k);
    plan.seed = seed;
    plan.fragments.resize(k);
    for (std::size_t i = 0; i < n; ++i) plan.fragments[i % k].push_back(idx[i]);
    return plan;
}

std::string method_name(Method m) {
    switch (m) {
        case Method::StCv: return "st_cv";
        case Method::Ficsr: return "ficsr";
        case Method::Erm: return "erm";
        case Method::Iwerm: return "iwerm";
        case Method::Eiwerm: return "eiwerm";
        case Method::Riwerm: return "riwerm";
    }
    return "unknown";
}

Method method_from_name(const std::string& name) {
    if (name == "st_cv") return Method::StCv;
    if (name == "ficsr") return Method::Ficsr;
    if (name == "erm") return Method::Erm;
    if (name == "iwerm") return Method::Iwerm;
    if (name == "eiwerm") return Method::Eiwerm;
    if (name == "riwerm") return Method::Riwerm;
    throw std::invalid_argument("unknown method: " + name +
                                " (valid: st_cv ficsr erm iwerm eiwerm riwerm)");
}

TrialData prepare_trial(const ExperimentConfig& config, std::uint64_t trial_seed) {
    TrialData out;

    if (config.shift.kind == ShiftKind::BetaRotation) {
        const std::size_t n_val = std::max<std::size_t>(
            2, static_cast<std::size_t>(std::floor(config.validation_fraction *
                                                   static_cast<double>(config.blobs.n_train))));
        auto [train, val] = make_rotated_bars(config.blobs.n_train, n_val, config.shift.a,
                                              config.shift.b,
                                              derive_seed(trial_seed, config.shift.seed + 11));
        out.train = std::move(train);
        out.validation = std::move(val);
    } else {
        Dataset full;
        Dataset shifted_val;
        bool use_test_as_val = false;
        if (config.source == ExperimentConfig::Source::Blobs) {
            auto [train, test] = gen_gaussian_blobs(config.blobs.n_train, config.blobs.n_test,
                                                    config.blobs.d, config.blobs.class_sep,
                                                    config.blobs.test_mean_shift,
                                                    derive_seed(trial_seed, 1));
            full = std::move(train);
            if (config.blobs.test_mean_shift != 0.0) {
                shifted_val = std::move(test);
                use_test_as_val = true;
            }
        } else {
            full = load_config_csv(config);
        }
        if (use_test_as_val) {
            out.train = std::move(full);
            out.validation = std::move(shifted_val);
        } else {
            auto [train, val] = holdout_split(full, config.validation_fraction,
                                              derive_seed(trial_seed, 2));
            out.train = std::move(train);
            out.validation = std::move(val);
        }
        switch (config.shift.kind) {
            case ShiftKind::BiasedSubsample: {
                SubsampleResult res =
                    biased_subsample(out.train, config.shift.severity,
                                     config.shift.keep_fraction,
                                     derive_seed(trial_seed, config.shift.seed + 3));
                out.train = std::move(res.data);
                out.warnings.insert(out.warnings.end(), res.warnings.begin(),
                                    res.warnings.end());
                break;
            }
            case ShiftKind::GaussianNoise:
                out.train = gaussian_noise_inject(out.train, config.shift.std,
                                                  derive_seed(trial_seed, config.shift.seed + 3));
                break;
            default:
                break;
        }
    }

    // standardize on the training split only
    Standardizer st = Standardizer::fit(out.train.features);
    out.train.features = st.transform(out.train.features);
    out.validation.features = st.transform(out.validation.features);

    // degenerate split check
    std::vector<bool> seen(static_cast<std::size_t>(std::max(out.train.n_classes, 1)), false);
    for (int y : out.train.labels) seen[static_cast<std::size_t>(y)] = true;
    for (std::size_t c = 0; c < seen.size(); ++c) {
        if (!seen[c]) {
            out.warnings.push_back("class " + std::to_string(c) +
                                   " absent from the training split");
        }
    }
    return out;
}

namespace {

double train_fragment_plain(const ExperimentConfig& config, const Dataset& frag,
                            const Dataset& validation, std::uint64_t init_seed,
                            MlpModel* fitted = nullptr) {
    MlpModel model = mlp_init(model_shapes(config, frag), init_seed);
    TrainResult res = train(std::move(model), frag, config.train);
    const double acc = accuracy(res.model, validation);
    if (fitted) *fitted = std::move(res.model);
    return acc;
}

double integral_accuracy(const ExperimentConfig& config, const TrialData& data,
                         std::uint64_t trial_seed) {
    return train_fragment_plain(config, data.train, data.validation,
                                derive_seed(trial_seed, 50));
}

std::vector<double> stcv_fragment_accuracies(const ExperimentConfig& config,
                                             const TrialData& data, const FragmentPlan& plan,
                                             std::uint64_t trial_seed) {
    std::vector<double> accs;
    accs.reserve(plan.fragments.size());
    for (std::size_t f = 0; f < plan.fragments.size(); ++f) {
        Dataset frag = select_rows(data.train, plan.fragments[f]);
        accs.push_back(train_fragment_plain(config, frag, data.validation,
                                            derive_seed(trial_seed, 100 + f)));
    }
    return accs;
}

std::vector<double> ficsr_fragment_accuracies(const ExperimentConfig& config,
                                              const TrialData& data, const FragmentPlan& plan,
                                              std::uint64_t trial_seed) {
    const std::vector<LayerShape> shapes = model_shapes(config, data.train);
    GlobalPrior prior = prior_init(ParamVector::total_size(shapes));
    std::vector<double> accs;
    accs.reserve(plan.fragments.size());
    for (std::size_t f = 0; f < plan.fragments.size(); ++f) {
        Dataset frag = select_rows(data.train, plan.fragments[f]);
        MlpModel model = mlp_init(shapes, derive_seed(trial_seed, 100 + f));
        if (config.warm_start && !prior.inert()) {
            model.params.values = prior.theta_bar;
        }
        TrainResult res;
        if (config.penalty.lambda == 0.0 && !config.warm_start) {
            // exact reduction to per-fragment st-CV
            res = train(std::move(model), frag, config.train);
        } else {
            LossAugmenter aug = make_penalty_augmenter(prior, config.penalty);
            res = train(std::move(model), frag, config.train, &aug);
        }
        accs.push_back(accuracy(res.model, data.validation));
        FisherDiagonal fisher = empirical_fisher_diag(res.model, frag);
        prior = prior_accumulate(std::move(prior), res.model.params.values, fisher);
    }
    return accs;
}

}  // namespace

ExperimentResult run_integral_cv(const ExperimentConfig& config) {
    ExperimentResult out;
    out.protocol = "bl1";
    out.method = Method::StCv;
    for (std::size_t t = 0; t < config.trials; ++t) {
        const std::uint64_t trial_seed = config.base_seed + t;
        TrialData data = prepare_trial(config, trial_seed);
        const double acc = integral_accuracy(config, data, trial_seed);
        TrialReport tr;
        tr.trial_seed = trial_seed;
        tr.report = summarize({acc}, acc);
        tr.warnings = data.warnings;
        out.trials.push_back(std::move(tr));
        out.mean_mu += acc;
    }
    out.mean_mu /= static_cast<double>(config.trials);
    return out;
}

ExperimentResult run_fragmented_stcv(const ExperimentConfig& config) {
    ExperimentResult out;
    out.protocol = "e1";
    out.method = Method::StCv;
    for (std::size_t t = 0; t < config.trials; ++t) {
        const std::uint64_t trial_seed = config.base_seed + t;
        TrialData data = prepare_trial(config, trial_seed);
        const double baseline = integral_accuracy(config, data, trial_seed);
        FragmentPlan plan =
            make_batch_plan(data.train.size(), config.batch_ratio, derive_seed(trial_seed, 7));
        std::vector<double> accs = stcv_fragment_accuracies(config, data, plan, trial_seed);
        TrialReport tr;
        tr.trial_seed = trial_seed;
        tr.report = summarize(accs, baseline);
        tr.warnings = data.warnings;
        out.mean_mu += tr.report.mean_mu;
        out.trials.push_back(std::move(tr));
    }
    out.mean_mu /= static_cast<double>(config.trials);
    return out;
}

ExperimentResult run_ficsr_sequential(const ExperimentConfig& config) {
    ExperimentResult out;
    out.protocol = "e2";
    out.method = Method::Ficsr;
    for (std::size_t t = 0; t < config.trials; ++t) {
        const std::uint64_t trial_seed = config.base_seed + t;
        TrialData data = prepare_trial(config, trial_seed);
        FragmentPlan plan =
            make_batch_plan(data.train.size(), config.batch_ratio, derive_seed(trial_seed, 7));
        // matching st-CV mean on the same plan and seeds is the baseline
        std::vector<double> stcv_accs = stcv_fragment_accuracies(config, data, plan, trial_seed);
        const double baseline =
            std::accumulate(stcv_accs.begin(), stcv_accs.end(), 0.0) /
            static_cast<double>(stcv_accs.size());
        std::vector<double> accs = ficsr_fragment_accuracies(config, data, plan, trial_seed);
        TrialReport tr;
        tr.trial_seed = trial_seed;
        tr.report = summarize(accs, baseline);
        tr.warnings = data.warnings;
        out.mean_mu += tr.report.mean_mu;
        out.trials.push_back(std::move(tr));
    }
    out.mean_mu /= static_cast<double>(config.trials);
    return out;
}

ExperimentResult run_kfold(const ExperimentConfig& config, Method method) {
    if (method != Method::StCv && method != Method::Ficsr) {
        throw std::invalid_argument("run_kfold: method must be st_cv or ficsr");
    }
    ExperimentResult out;
    out.protocol = method == Method::StCv ? "e3" : "e4";
    out.method = method;
    for (std::size_t t = 0; t < config.trials; ++t) {
        const std::uint64_t trial_seed = config.base_seed + t;
        TrialData data = prepare_trial(config, trial_seed);
        FragmentPlan plan =
            make_fold_plan(data.train.size(), config.k_folds, derive_seed(trial_seed, 7));
        const std::vector<LayerShape> shapes = model_shapes(config, data.train);

        auto fold_train_set = [&](std::size_t hold) {
            std::vector<std::size_t> idx;
            for (std::size_t f = 0; f < plan.fragments.size(); ++f) {
                if (f == hold) continue;
                idx.insert(idx.end(), plan.fragments[f].begin(), plan.fragments[f].end());
            }
            return select_rows(data.train, idx);
        };

        std::vector<double> stcv_accs(plan.fragments.size());
        for (std::size_t f = 0; f < plan.fragments.size(); ++f) {
            Dataset tr_set = fold_train_set(f);
            Dataset ev = select_rows(data.train, plan.fragments[f]);
            stcv_accs[f] = train_fragment_plain(config, tr_set, ev,
                                                derive_seed(trial_seed, 100 + f));
        }

        std::vector<double> accs;
        double baseline = 0.0;
        if (method == Method::StCv) {
            accs = stcv_accs;
            baseline = integral_accuracy(config, data, trial_seed);  // BL1 reference
        } else {
            baseline = std::accumulate(stcv_accs.begin(), stcv_accs.end(), 0.0) /
                       static_cast<double>(stcv_accs.size());
            GlobalPrior prior = prior_init(ParamVector::total_size(shapes));
            for (std::size_t f = 0; f < plan.fragments.size(); ++f) {
                Dataset tr_set = fold_train_set(f);
                Dataset ev = select_rows(data.train, plan.fragments[f]);
                MlpModel model = mlp_init(shapes, derive_seed(trial_seed, 100 + f));
                if (config.warm_start && !prior.inert()) {
                    model.params.values = prior.theta_bar;
                }
                TrainResult res;
                if (config.penalty.lambda == 0.0 && !config.warm_start) {
                    res = train(std::move(model), tr_set, config.train);
                } else {
                    LossAugmenter aug = make_penalty_augmenter(prior, config.penalty);
                    res = train(std::move(model), tr_set, config.train, &aug);
                }
                accs.push_back(accuracy(res.model, ev));
                FisherDiagonal fisher = empirical_fisher_diag(res.model, tr_set);
                prior = prior_accumulate(std::move(prior), res.model.params.values, fisher);
            }
        }
        TrialReport tr;
        tr.trial_seed = trial_seed;
        tr.report = summarize(accs, baseline);
        tr.warnings = data.warnings;
        out.mean_mu += tr.report.mean_mu;
        out.trials.push_back(std::move(tr));
    }
    out.mean_mu /= static_cast<double>(config.trials);
    return out;
}

ExperimentResult run_weighted_baseline(const ExperimentConfig& config, Method method) {
    if (method == Method::StCv || method == Method::Ficsr) {
        throw std::invalid_argument("run_weighted_baseline: expects erm/iwerm/eiwerm/riwerm");
    }
    ExperimentResult out;
    out.protocol = "benchmark_baselines";
    out.method = method;
    for (std::size_t t = 0; t < config.trials; ++t) {
        const std::uint64_t trial_seed = config.base_seed + t;
        TrialData data = prepare_trial(config, trial_seed);
        const double erm_acc = integral_accuracy(config, data, trial_seed);

        double acc = erm_acc;
        std::size_t clipped = 0;
        if (method != Method::Erm) {
            const double width = median_heuristic_width(data.train.features,
                                                        data.validation.features,
                                                        derive_seed(trial_seed, 9));
            const std::size_t m = std::min(config.m_centers_cap, data.validation.size());
            KernelRatioModel ratio;
            if (method == Method::Riwerm) {
                ratio = rulsif_fit(data.train.features, data.validation.features,
                                   config.riwerm_mixture, width, config.ulsif_ridge, m,
                                   derive_seed(trial_seed, 9));
            } else {
                ratio = ulsif_fit(data.train.features, data.validation.features, width,
                                  config.ulsif_ridge, m, derive_seed(trial_seed, 9));
            }
            ImportanceWeights weights = weights_at(ratio, data.train.features);
            clipped = weights.clipped_count;
            const double exponent = method == Method::Eiwerm ? config.flatten_exponent : 1.0;
            const std::vector<double> w = flatten_weights(weights, exponent);
            MlpModel model = mlp_init(model_shapes(config, data.train),
                                      derive_seed(trial_seed, 50));
            TrainResult res = train(std::move(model), data.train, config.train, nullptr, &w);
            acc = accuracy(res.model, data.validation);
        }
        TrialReport tr;
        tr.trial_seed = trial_seed;
        tr.report = summarize({acc}, erm_acc);
        tr.warnings = data.warnings;
        tr.clipped_weight_count = clipped;
        out.mean_mu += acc;
        out.trials.push_back(std::move(tr));
    }
    out.mean_mu /= static_cast<double>(config.trials);
    return out;
}

std::map<double, ExperimentResult> lambda_sweep(const ExperimentConfig& config,
                                                const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("lambda_sweep: empty grid");
    std::map<double, ExperimentResult> out;
    for (double lambda : grid) {
        if (lambda < 0.0) throw std::invalid_argument("lambda_sweep: lambda must be >= 0");
        ExperimentConfig c = config;
        c.penalty.lambda = lambda;
        out[lambda] = run_ficsr_sequential(c);
    }
    return out;
}

std::map<double, NoisePair> noise_ablation(const ExperimentConfig& config,
                                           const std::vector<double>& std_list) {
    std::map<double, NoisePair> out;
    for (double std : std_list) {
        if (std < 0.0) throw std::invalid_argument("noise_ablation: std must be >= 0");
        ExperimentConfig c = config;
        c.shift.kind = ShiftKind::GaussianNoise;
        c.shift.std = std;
        NoisePair pair;
        pair.stcv = run_fragmented_stcv(c);
        pair.ficsr = run_ficsr_sequential(c);
        out[std] = std::move(pair);
    }
    return out;
}

}  // namespace ficsr
