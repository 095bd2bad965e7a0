#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "ficsr/csvio.hpp"
#include "ficsr/report.hpp"

using namespace ficsr;
using nlohmann::json;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = (std::filesystem::temp_directory_path() / name).string();
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("csv loader maps labels in first-appearance order") {
    TempFile f("ficsr_t1.csv", "x1,x2,y\n1,2,a\n3,4,b\n5,6,a\n");
    CsvDatasetSchema schema;
    schema.path = f.path;
    schema.label_column = "y";
    Dataset ds = load_csv_dataset(schema);
    CHECK(ds.size() == 3);
    CHECK(ds.dim() == 2);
    CHECK(ds.n_classes == 2);
    CHECK(ds.labels == std::vector<int>{0, 1, 0});
    CHECK(ds.features(1, 0) == 3.0);
    CHECK(ds.features(2, 1) == 6.0);
}

TEST_CASE("csv loader accepts a numeric label column without a header") {
    TempFile f("ficsr_t2.csv", "0.5;1.5;cat\n2.5;3.5;dog\n");
    CsvDatasetSchema schema;
    schema.path = f.path;
    schema.label_column = "2";
    schema.delimiter = ';';
    schema.header = false;
    Dataset ds = load_csv_dataset(schema);
    CHECK(ds.size() == 2);
    CHECK(ds.dim() == 2);
    CHECK(ds.labels == std::vector<int>{0, 1});
}

TEST_CASE("csv loader errors name the offending location") {
    CsvDatasetSchema schema;
    schema.label_column = "y";

    TempFile ragged("ficsr_t3.csv", "x,y\n1,a\n1,2,a\n");
    schema.path = ragged.path;
    CHECK_THROWS_WITH_AS(load_csv_dataset(schema), doctest::Contains("row 3"),
                         std::runtime_error);

    TempFile bad_cell("ficsr_t4.csv", "x1,x2,y\n1,2,a\n3,oops,b\n");
    schema.path = bad_cell.path;
    try {
        load_csv_dataset(schema);
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 3") != std::string::npos);
        CHECK(msg.find("column 2") != std::string::npos);
        CHECK(msg.find("oops") != std::string::npos);
    }

    TempFile ok("ficsr_t5.csv", "x,y\n1,a\n2,b\n");
    schema.path = ok.path;
    schema.label_column = "missing";
    CHECK_THROWS_AS(load_csv_dataset(schema), std::runtime_error);

    TempFile one_class("ficsr_t6.csv", "x,y\n1,a\n2,a\n");
    schema.path = one_class.path;
    schema.label_column = "y";
    CHECK_THROWS_AS(load_csv_dataset(schema), std::runtime_error);

    TempFile header_only("ficsr_t7.csv", "x,y\n");
    schema.path = header_only.path;
    CHECK_THROWS_AS(load_csv_dataset(schema), std::runtime_error);
}

TEST_CASE("experiment parser fills defaults and reads nested sections") {
    json j = {{"protocol", "e2"},
              {"dataset", {{"source", "blobs"}, {"n_train", 300}, {"d", 3}}},
              {"shift", {{"kind", "biased_subsample"}, {"severity", 2.0}}},
              {"fragment", {{"mode", "batch"}, {"ratio", 0.25}}},
              {"train", {{"epochs", 40}, {"learning_rate", 0.01}}},
              {"penalty", {{"lambda", 0.07}}},
              {"trials", 3},
              {"base_seed", 11}};
    ExperimentFile file = parse_experiment_file(j);
    CHECK(file.protocol == "e2");
    CHECK(file.config.blobs.n_train == 300);
    CHECK(file.config.blobs.d == 3);
    CHECK(file.config.blobs.n_test == 500);  // default retained
    CHECK(file.config.shift.kind == ShiftKind::BiasedSubsample);
    CHECK(file.config.shift.severity == 2.0);
    CHECK(file.config.batch_ratio == 0.25);
    CHECK(file.config.train.epochs == 40);
    CHECK(file.config.penalty.lambda == 0.07);
    CHECK(file.config.trials == 3);
    CHECK(file.config.base_seed == 11);
    CHECK(file.lambda_grid == std::vector<double>{0.01, 0.04, 0.07, 0.1});
    CHECK(file.noise_std_list == std::vector<double>{1, 10, 25, 50, 75, 100});
}

TEST_CASE("experiment parser rejects unknown keys with their path") {
    json j = {{"protocol", "e1"}, {"bogus_key", 1}};
    CHECK_THROWS_WITH_AS(parse_experiment_file(j), doctest::Contains("/bogus_key"),
                         std::runtime_error);

    json nested = {{"protocol", "e1"}, {"train", {{"epochs", 5}, {"lr", 0.1}}}};
    CHECK_THROWS_WITH_AS(parse_experiment_file(nested), doctest::Contains("/train/lr"),
                         std::runtime_error);
}

TEST_CASE("experiment parser rejects an unknown protocol listing the valid ones") {
    json j = {{"protocol", "e9"}};
    try {
        parse_experiment_file(j);
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("e9") != std::string::npos);
        CHECK(msg.find("lambda_sweep") != std::string::npos);
        CHECK(msg.find("noise_ablation") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_experiment_file(json{{"trials", 2}}), std::runtime_error);
    CHECK_THROWS_AS(parse_experiment_file(json::array()), std::runtime_error);
}

TEST_CASE("experiment parser validates ranges") {
    CHECK_THROWS_AS(parse_experiment_file(json{{"protocol", "e1"}, {"trials", 0}}),
                    std::runtime_error);
    CHECK_THROWS_AS(
        parse_experiment_file(json{{"protocol", "e1"}, {"validation_fraction", 1.5}}),
        std::runtime_error);
    CHECK_THROWS_AS(
        parse_experiment_file(json{{"protocol", "e2"}, {"penalty", {{"lambda", -0.1}}}}),
        std::runtime_error);
    CHECK_THROWS_AS(
        parse_experiment_file(json{{"protocol", "lambda_sweep"},
                                   {"lambda_grid", json::array()}}),
        std::runtime_error);
}

TEST_CASE("report document JSON round trip and CSV emission") {
    ReportDocument doc;
    doc.config_echo = {{"protocol", "e1"}};
    doc.protocol = "e1";
    doc.results = {{"mean_mu", 0.9}};
    doc.timings = {{"wall_clock_seconds", 1.25}};
    ReportRow row;
    row.protocol = "e1";
    row.method = "st_cv";
    row.dataset = "blobs";
    row.shift_kind = "none";
    row.lambda = 0.1;
    row.fragment_index = 2;
    row.accuracy = 0.875;
    row.mu = 0.9;
    row.var_pop = 0.0004;
    row.var_sample = 0.0008;
    row.delta_percent = -6.4345;
    row.seed = 17;
    doc.rows.push_back(row);

    ReportDocument back = ReportDocument::from_json(doc.to_json());
    CHECK(back.schema_version == doc.schema_version);
    CHECK(back.tool_version == doc.tool_version);
    CHECK(back.protocol == "e1");
    REQUIRE(back.rows.size() == 1);
    CHECK(back.rows[0].accuracy == row.accuracy);
    CHECK(back.rows[0].seed == 17);
    CHECK(back.to_json() == doc.to_json());

    const auto dir = std::filesystem::temp_directory_path();
    const std::string jp = (dir / "ficsr_report.json").string();
    const std::string cp = (dir / "ficsr_summary.csv").string();
    emit_report(doc, jp, cp);
    const std::string csv = slurp(cp);
    CHECK(csv ==
          "protocol,method,dataset,shift_kind,lambda,fragment_index,accuracy,mu,"
          "var_pop,var_sample,delta_percent,seed\n"
          "e1,st_cv,blobs,none,0.1,2,0.875,0.9,4e-04,8e-04,-6.43,17\n");

    ReportDocument reread = ReportDocument::from_json(json::parse(slurp(jp)));
    CHECK(reread.to_json() == doc.to_json());
    std::remove(jp.c_str());
    std::remove(cp.c_str());
}

TEST_CASE("append_rows expands one row per fragment with trial seeds") {
    ExperimentResult res;
    res.protocol = "e2";
    res.method = Method::Ficsr;
    TrialReport tr;
    tr.trial_seed = 3;
    tr.report = summarize({0.8, 0.9}, 0.85);
    res.trials.push_back(tr);
    tr.trial_seed = 4;
    res.trials.push_back(tr);

    ExperimentConfig config;
    config.penalty.lambda = 0.04;
    std::vector<ReportRow> rows;
    append_rows(rows, res, config);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].lambda == 0.04);
    CHECK(rows[0].fragment_index == 0);
    CHECK(rows[1].fragment_index == 1);
    CHECK(rows[1].accuracy == 0.9);
    CHECK(rows[2].seed == 4);
    CHECK(rows[0].dataset == "blobs");
    CHECK(rows[0].method == "ficsr");

    // st-CV rows carry lambda 0, overrides win for sweeps
    res.method = Method::StCv;
    rows.clear();
    append_rows(rows, res, config);
    CHECK(rows[0].lambda == 0.0);
    rows.clear();
    append_rows(rows, res, config, 0.07);
    CHECK(rows[0].lambda == 0.07);
}

TEST_CASE("run_experiment reports bad inputs via exit codes") {
    CHECK(run_experiment("/nonexistent/config.json", "/tmp/ficsr_out") == 2);
    TempFile bad_json("ficsr_bad.json", "{not json");
    CHECK(run_experiment(bad_json.path, "/tmp/ficsr_out") == 2);
    TempFile bad_cfg("ficsr_badcfg.json", "{\"protocol\": \"e9\"}");
    CHECK(run_experiment(bad_cfg.path, "/tmp/ficsr_out") == 1);
}
