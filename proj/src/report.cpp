#include "ficsr/report.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace ficsr {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& path, const std::string& message) {
    throw std::runtime_error("config error at " + path + ": " + message);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& path) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key)) config_error(path + "/" + key, "unknown key");
    }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    return obj.at(key).get<T>();
}

// Shortest round-trip decimal representation, locale independent.
std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
}

}  // namespace

std::string shift_kind_name(ShiftKind kind) {
    switch (kind) {
        case ShiftKind::None: return "none";
        case ShiftKind::BetaRotation: return "beta_rotation";
        case ShiftKind::BiasedSubsample: return "biased_subsample";
        case ShiftKind::GaussianNoise: return "gaussian_noise";
    }
    return "unknown";
}

std::string dataset_name(const ExperimentConfig& config) {
    if (config.shift.kind == ShiftKind::BetaRotation) return "rotated_bars";
    if (config.source == ExperimentConfig::Source::Csv) {
        return std::filesystem::path(config.csv_path).filename().string();
    }
    return "blobs";
}

ExperimentFile parse_experiment_file(const json& j) {
    if (!j.is_object()) config_error("/", "experiment file must be a JSON object");
    reject_unknown_keys(j, {"schema_version", "protocol", "method", "dataset", "shift",
                            "fragment", "train", "penalty", "trials", "base_seed",
                            "validation_fraction", "hidden_width", "warm_start",
                            "flatten_exponent", "riwerm_mixture", "ulsif_ridge",
                            "m_centers_cap", "lambda_grid", "noise_std_list"},
                        "");
    ExperimentFile file;
    if (!j.contains("protocol")) config_error("/protocol", "missing");
    file.protocol = j.at("protocol").get<std::string>();
    static const std::set<std::string> kProtocols = {
        "e1", "e2", "e3", "e4", "lambda_sweep", "noise_ablation", "benchmark_baselines"};
    if (!kProtocols.count(file.protocol)) {
        std::string valid;
        for (const auto& p : kProtocols) valid += (valid.empty() ? "" : " ") + p;
        config_error("/protocol", "unknown protocol '" + file.protocol + "' (valid: " + valid + ")");
    }

    ExperimentConfig& c = file.config;
    if (j.contains("method")) c.method = method_from_name(j.at("method").get<std::string>());

    if (j.contains("dataset")) {
        const json& d = j.at("dataset");
        reject_unknown_keys(d, {"source", "n_train", "n_test", "d", "class_sep",
                                "test_mean_shift", "path", "label_column", "delimiter",
                                "header"},
                            "/dataset");
        const std::string source = get_or<std::string>(d, "source", "blobs");
        if (source == "blobs") {
            c.source = ExperimentConfig::Source::Blobs;
            c.blobs.n_train = get_or<std::size_t>(d, "n_train", c.blobs.n_train);
            c.blobs.n_test = get_or<std::size_t>(d, "n_test", c.blobs.n_test);
            c.blobs.d = get_or<std::size_t>(d, "d", c.blobs.d);
            c.blobs.class_sep = get_or<double>(d, "class_sep", c.blobs.class_sep);
            c.blobs.test_mean_shift = get_or<double>(d, "test_mean_shift",
                                                     c.blobs.test_mean_shift);
        } else if (source == "csv") {
            c.source = ExperimentConfig::Source::Csv;
            if (!d.contains("path")) config_error("/dataset/path", "missing for csv source");
            c.csv_path = d.at("path").get<std::string>();
            if (!d.contains("label_column")) {
                config_error("/dataset/label_column", "missing for csv source");
            }
            c.csv_label_column = d.at("label_column").get<std::string>();
            const std::string delim = get_or<std::string>(d, "delimiter", ",");
            if (delim.size() != 1) config_error("/dataset/delimiter", "must be one character");
            c.csv_delimiter = delim[0];
            c.csv_header = get_or<bool>(d, "header", true);
        } else {
            config_error("/dataset/source", "must be 'blobs' or 'csv'");
        }
    }

    if (j.contains("shift")) {
        const json& s = j.at("shift");
        reject_unknown_keys(s, {"kind", "a", "b", "severity", "keep_fraction", "std", "seed"},
                            "/shift");
        const std::string kind = get_or<std::string>(s, "kind", "none");
        if (kind == "none") {
            c.shift.kind = ShiftKind::None;
        } else if (kind == "beta_rotation") {
            c.shift.kind = ShiftKind::BetaRotation;
        } else if (kind == "biased_subsample") {
            c.shift.kind = ShiftKind::BiasedSubsample;
        } else if (kind == "gaussian_noise") {
            c.shift.kind = ShiftKind::GaussianNoise;
        } else {
            config_error("/shift/kind",
                         "must be none | beta_rotation | biased_subsample | gaussian_noise");
        }
        c.shift.a = get_or<double>(s, "a", c.shift.a);
        c.shift.b = get_or<double>(s, "b", c.shift.b);
        c.shift.severity = get_or<double>(s, "severity", c.shift.severity);
        c.shift.keep_fraction = get_or<double>(s, "keep_fraction", c.shift.keep_fraction);
        c.shift.std = get_or<double>(s, "std", c.shift.std);
        c.shift.seed = get_or<std::uint64_t>(s, "seed", c.shift.seed);
    }

    if (j.contains("fragment")) {
        const json& f = j.at("fragment");
        reject_unknown_keys(f, {"mode", "ratio", "k"}, "/fragment");
        const std::string mode = get_or<std::string>(f, "mode", "batch");
        if (mode == "batch") {
            c.fragment_mode = FragmentMode::Batch;
        } else if (mode == "fold") {
            c.fragment_mode = FragmentMode::Fold;
        } else {
            config_error("/fragment/mode", "must be 'batch' or 'fold'");
        }
        c.batch_ratio = get_or<double>(f, "ratio", c.batch_ratio);
        c.k_folds = get_or<std::size_t>(f, "k", c.k_folds);
    }

    if (j.contains("train")) {
        const json& t = j.at("train");
        reject_unknown_keys(t, {"learning_rate", "epochs", "adam_beta1", "adam_beta2",
                                "adam_eps", "minibatch_size"},
                            "/train");
        c.train.learning_rate = get_or<double>(t, "learning_rate", c.train.learning_rate);
        c.train.epochs = get_or<std::size_t>(t, "epochs", c.train.epochs);
        c.train.adam_beta1 = get_or<double>(t, "adam_beta1", c.train.adam_beta1);
        c.train.adam_beta2 = get_or<double>(t, "adam_beta2", c.train.adam_beta2);
        c.train.adam_eps = get_or<double>(t, "adam_eps", c.train.adam_eps);
        c.train.minibatch_size = get_or<std::size_t>(t, "minibatch_size", c.train.minibatch_size);
    }

    if (j.contains("penalty")) {
        const json& p = j.at("penalty");
        reject_unknown_keys(p, {"lambda", "mode"}, "/penalty");
        c.penalty.lambda = get_or<double>(p, "lambda", c.penalty.lambda);
        if (c.penalty.lambda < 0.0) config_error("/penalty/lambda", "must be >= 0");
        const std::string mode = get_or<std::string>(p, "mode", "anchored");
        if (mode == "anchored") {
            c.penalty.mode = PenaltyMode::Anchored;
        } else if (mode == "trace_only") {
            c.penalty.mode = PenaltyMode::TraceOnly;
        } else {
            config_error("/penalty/mode", "must be 'anchored' or 'trace_only'");
        }
    }

    c.trials = get_or<std::size_t>(j, "trials", c.trials);
    if (c.trials < 1) config_error("/trials", "must be >= 1");
    c.base_seed = get_or<std::uint64_t>(j, "base_seed", c.base_seed);
    c.validation_fraction = get_or<double>(j, "validation_fraction", c.validation_fraction);
    if (!(c.validation_fraction > 0.0 && c.validation_fraction < 1.0)) {
        config_error("/validation_fraction", "must be in (0,1)");
    }
    c.hidden_width = get_or<std::size_t>(j, "hidden_width", c.hidden_width);
    c.warm_start = get_or<bool>(j, "warm_start", c.warm_start);
    c.flatten_exponent = get_or<double>(j, "flatten_exponent", c.flatten_exponent);
    c.riwerm_mixture = get_or<double>(j, "riwerm_mixture", c.riwerm_mixture);
    c.ulsif_ridge = get_or<double>(j, "ulsif_ridge", c.ulsif_ridge);
    c.m_centers_cap = get_or<std::size_t>(j, "m_centers_cap", c.m_centers_cap);

    if (j.contains("lambda_grid")) {
        file.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
        if (file.lambda_grid.empty()) config_error("/lambda_grid", "must be non-empty");
    }
    if (j.contains("noise_std_list")) {
        file.noise_std_list = j.at("noise_std_list").get<std::vector<double>>();
        if (file.noise_std_list.empty()) config_error("/noise_std_list", "must be non-empty");
    }
    return file;
}

void append_rows(std::vector<ReportRow>& rows, const ExperimentResult& result,
                 const ExperimentConfig& config, double lambda_override) {
    const double lambda = lambda_override >= 0.0 ? lambda_override
                          : (result.method == Method::Ficsr ? config.penalty.lambda : 0.0);
    for (const TrialReport& trial : result.trials) {
        for (std::size_t f = 0; f < trial.report.per_fragment_accuracy.size(); ++f) {
            ReportRow row;
            row.protocol = result.protocol;
            row.method = method_name(result.method);
            row.dataset = dataset_name(config);
            row.shift_kind = shift_kind_name(config.shift.kind);
            row.lambda = lambda;
            row.fragment_index = f;
            row.accuracy = trial.report.per_fragment_accuracy[f];
            row.mu = trial.report.mean_mu;
            row.var_pop = trial.report.var_population;
            row.var_sample = trial.report.var_sample;
            row.delta_percent = trial.report.delta_percent;
            row.seed = trial.trial_seed;
            rows.push_back(std::move(row));
        }
    }
}

namespace {

json result_to_json(const ExperimentResult& r) {
    json out;
    out["protocol"] = r.protocol;
    out["method"] = method_name(r.method);
    out["mean_mu"] = r.mean_mu;
    json trials = json::array();
    for (const TrialReport& t : r.trials) {
        json jt;
        jt["trial_seed"] = t.trial_seed;
        jt["per_fragment_accuracy"] = t.report.per_fragment_accuracy;
        jt["mu"] = t.report.mean_mu;
        jt["var_population"] = t.report.var_population;
        jt["var_sample"] = t.report.var_sample;
        jt["baseline_accuracy"] = t.report.baseline_accuracy;
        jt["delta_percent"] = t.report.delta_percent;
        jt["warnings"] = t.warnings;
        jt["clipped_weight_count"] = t.clipped_weight_count;
        trials.push_back(std::move(jt));
    }
    out["trials"] = std::move(trials);
    return out;
}

json row_to_json(const ReportRow& r) {
    return json{{"protocol", r.protocol},
                {"method", r.method},
                {"dataset", r.dataset},
                {"shift_kind", r.shift_kind},
                {"lambda", r.lambda},
                {"fragment_index", r.fragment_index},
                {"accuracy", r.accuracy},
                {"mu", r.mu},
                {"var_pop", r.var_pop},
                {"var_sample", r.var_sample},
                {"delta_percent", r.delta_percent},
                {"seed", r.seed}};
}

ReportRow row_from_json(const json& j) {
    ReportRow r;
    r.protocol = j.at("protocol").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.dataset = j.at("dataset").get<std::string>();
    r.shift_kind = j.at("shift_kind").get<std::string>();
    r.lambda = j.at("lambda").get<double>();
    r.fragment_index = j.at("fragment_index").get<std::size_t>();
    r.accuracy = j.at("accuracy").get<double>();
    r.mu = j.at("mu").get<double>();
    r.var_pop = j.at("var_pop").get<double>();
    r.var_sample = j.at("var_sample").get<double>();
    r.delta_percent = j.at("delta_percent").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
}

}  // namespace

json ReportDocument::to_json() const {
    json j;
    j["schema_version"] = schema_version;
    j["tool_version"] = tool_version;
    j["config"] = config_echo;
    j["protocol"] = protocol;
    j["results"] = results;
    json rows_json = json::array();
    for (const ReportRow& r : rows) rows_json.push_back(row_to_json(r));
    j["rows"] = std::move(rows_json);
    j["timings"] = timings;
    return j;
}

ReportDocument ReportDocument::from_json(const json& j) {
    ReportDocument doc;
    doc.schema_version = j.at("schema_version").get<int>();
    doc.tool_version = j.at("tool_version").get<std::string>();
    doc.config_echo = j.at("config");
    doc.protocol = j.at("protocol").get<std::string>();
    doc.results = j.at("results");
    for (const json& r : j.at("rows")) doc.rows.push_back(row_from_json(r));
    doc.timings = j.at("timings");
    return doc;
}

void emit_report(const ReportDocument& doc, const std::string& json_path,
                 const std::string& csv_path) {
    {
        std::ofstream out(json_path);
        if (!out) throw std::runtime_error("emit_report: cannot write " + json_path);
        out << doc.to_json().dump(2) << "\n";
    }
    std::ofstream out(csv_path, std::ios::binary);  // binary keeps \n on every platform
    if (!out) throw std::runtime_error("emit_report: cannot write " + csv_path);
    out << "protocol,method,dataset,shift_kind,lambda,fragment_index,accuracy,mu,"
           "var_pop,var_sample,delta_percent,seed\n";
    for (const ReportRow& r : doc.rows) {
        out << r.protocol << ',' << r.method << ',' << r.dataset << ',' << r.shift_kind << ','
            << format_double(r.lambda) << ',' << r.fragment_index << ','
            << format_double(r.accuracy) << ',' << format_double(r.mu) << ','
            << format_double(r.var_pop) << ',' << format_double(r.var_sample) << ','
            << format_fixed2(r.delta_percent) << ',' << r.seed << '\n';
    }
}

int run_experiment(const std::string& config_path, const std::string& out_dir) {
    json config_json;
    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config file " << config_path << "\n";
            return 2;
        }
        config_json = json::parse(in);
    } catch (const json::parse_error& e) {
        std::cerr << "error: invalid JSON in " << config_path << ": " << e.what() << "\n";
        return 2;
    }

    try {
        const ExperimentFile file = parse_experiment_file(config_json);
        const ExperimentConfig& c = file.config;

        ReportDocument doc;
        doc.config_echo = config_json;
        doc.protocol = file.protocol;

        const auto t0 = std::chrono::steady_clock::now();
        if (file.protocol == "e1") {
            ExperimentResult res = run_fragmented_stcv(c);
            doc.results = result_to_json(res);
            append_rows(doc.rows, res, c);
        } else if (file.protocol == "e2") {
            ExperimentResult res = run_ficsr_sequential(c);
            doc.results = result_to_json(res);
            // paired Wilcoxon of per-trial mu against the matched st-CV baseline
            std::vector<double> mu_ficsr;
            std::vector<double> mu_stcv;
            for (const TrialReport& t : res.trials) {
                mu_ficsr.push_back(t.report.mean_mu);
                mu_stcv.push_back(t.report.baseline_accuracy);
            }
            if (mu_ficsr.size() >= 5) {
                const WilcoxonResult w = wilcoxon_signed_rank(mu_ficsr, mu_stcv);
                doc.results["wilcoxon"] = {{"statistic_w", w.statistic_w},
                                           {"p_value", w.p_value},
                                           {"significant_at_5pct", w.significant_at_5pct},
                                           {"n_used", w.n_used}};
            }
            append_rows(doc.rows, res, c);
        } else if (file.protocol == "e3") {
            ExperimentResult res = run_kfold(c, Method::StCv);
            doc.results = result_to_json(res);
            append_rows(doc.rows, res, c);
        } else if (file.protocol == "e4") {
            ExperimentResult res = run_kfold(c, Method::Ficsr);
            doc.results = result_to_json(res);
            append_rows(doc.rows, res, c);
        } else if (file.protocol == "lambda_sweep") {
            const auto sweep = lambda_sweep(c, file.lambda_grid);
            doc.results = json::object();
            for (const auto& [lambda, res] : sweep) {
                doc.results[format_double(lambda)] = result_to_json(res);
                append_rows(doc.rows, res, c, lambda);
            }
        } else if (file.protocol == "noise_ablation") {
            const auto levels = noise_ablation(c, file.noise_std_list);
            doc.results = json::object();
            for (const auto& [std, pair] : levels) {
                json entry;
                entry["st_cv"] = result_to_json(pair.stcv);
                entry["ficsr"] = result_to_json(pair.ficsr);
                entry["delta_mu"] = pair.ficsr.mean_mu - pair.stcv.mean_mu;
                doc.results[format_double(std)] = std::move(entry);
                ExperimentConfig noisy = c;
                noisy.shift.kind = ShiftKind::GaussianNoise;
                noisy.shift.std = std;
                append_rows(doc.rows, pair.stcv, noisy);
                append_rows(doc.rows, pair.ficsr, noisy);
            }
        } else if (file.protocol == "benchmark_baselines") {
            doc.results = json::object();
            for (Method m : {Method::Erm, Method::Iwerm, Method::Eiwerm, Method::Riwerm}) {
                ExperimentResult res = run_weighted_baseline(c, m);
                doc.results[method_name(m)] = result_to_json(res);
                append_rows(doc.rows, res, c);
            }
        }
        const auto t1 = std::chrono::steady_clock::now();
        doc.timings = {{"wall_clock_seconds",
                        std::chrono::duration<double>(t1 - t0).count()}};

        std::filesystem::create_directories(out_dir);
        const std::string json_path = (std::filesystem::path(out_dir) / "report.json").string();
        const std::string csv_path = (std::filesystem::path(out_dir) / "summary.csv").string();
        emit_report(doc, json_path, csv_path);
        std::cout << "wrote " << json_path << " and " << csv_path << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ficsr
