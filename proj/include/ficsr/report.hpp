#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ficsr/harness.hpp"

namespace ficsr {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

// One CSV summary row per (method context, trial, fragment).
struct ReportRow {
    std::string protocol;
    std::string method;
    std::string dataset;
    std::string shift_kind;
    double lambda = 0.0;
    std::size_t fragment_index = 0;
    double accuracy = 0.0;
    double mu = 0.0;
    double var_pop = 0.0;
    double var_sample = 0.0;
    double delta_percent = 0.0;
    std::uint64_t seed = 0;
};

struct ReportDocument {
    int schema_version = kReportSchemaVersion;
    std::string tool_version = kToolVersion;
    nlohmann::json config_echo;
    std::string protocol;
    nlohmann::json results;   // structured per-protocol payload
    std::vector<ReportRow> rows;
    nlohmann::json timings;   // wall-clock; excluded from the CSV

    nlohmann::json to_json() const;
    static ReportDocument from_json(const nlohmann::json& j);
};

// Parsed experiment file: the protocol name plus the harness config.
struct ExperimentFile {
    std::string protocol;
    ExperimentConfig config;
    std::vector<double> lambda_grid = {0.01, 0.04, 0.07, 0.1};
    std::vector<double> noise_std_list = {1, 10, 25, 50, 75, 100};
};

// Strict parse; unknown keys are rejected with their JSON path.
ExperimentFile parse_experiment_file(const nlohmann::json& j);

std::string dataset_name(const ExperimentConfig& config);
std::string shift_kind_name(ShiftKind kind);

// Appends the rows of one experiment result.
void append_rows(std::vector<ReportRow>& rows, const ExperimentResult& result,
                 const ExperimentConfig& config, double lambda_override = -1.0);

void emit_report(const ReportDocument& doc, const std::string& json_path,
                 const std::string& csv_path);

// Runs the protocol named in the config file and writes report.json plus
// summary.csv under out_dir. Returns the process exit code.
int run_experiment(const std::string& config_path, const std::string& out_dir);

}  // namespace ficsr
