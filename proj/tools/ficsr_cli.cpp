#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ficsr/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"FICsR experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    long long trials_override = -1;
    long long seed_override = -1;

    CLI::App* run = app.add_subcommand("run", "run the protocol named in a config file");
    run->add_option("config", config_path, "experiment config JSON")->required();
    run->add_option("--out-dir", out_dir, "output directory for report.json and summary.csv");
    run->add_option("--trials", trials_override, "override the config's trial count");
    run->add_option("--seed", seed_override, "override the config's base seed");

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "check a config file and exit");
    validate->add_option("config", validate_path, "experiment config JSON")->required();

    app.add_subcommand("version", "print the tool version");

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand("version")) {
        std::cout << "ficsr " << ficsr::kToolVersion << "\n";
        return 0;
    }

    if (app.got_subcommand("validate")) {
        try {
            std::ifstream in(validate_path);
            if (!in) {
                std::cerr << "error: cannot open " << validate_path << "\n";
                return 2;
            }
            ficsr::parse_experiment_file(nlohmann::json::parse(in));
            std::cout << "ok\n";
            return 0;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }

    // run: apply flag overrides by rewriting the parsed JSON before dispatch
    nlohmann::json config_json;
    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open " << config_path << "\n";
            return 2;
        }
        config_json = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (trials_override >= 0) config_json["trials"] = trials_override;
    if (seed_override >= 0) config_json["base_seed"] = seed_override;

    const std::string patched = (std::filesystem::path(out_dir) / ".config.effective.json").string();
    try {
        std::filesystem::create_directories(out_dir);
        std::ofstream out(patched);
        out << config_json.dump(2) << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return ficsr::run_experiment(patched, out_dir);
}
