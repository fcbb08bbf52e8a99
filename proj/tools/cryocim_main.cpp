#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cryocim/errors.hpp"
#include "cryocim/scenario.hpp"
#include "cryocim/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"cryocim: behavioral simulator of a cryogenic compute-in-memory "
                 "crosspoint array"};
    app.require_subcommand(1);

    std::string run_path;
    std::string out_dir;
    auto* run_cmd = app.add_subcommand("run", "execute a scenario file and write artifacts");
    run_cmd->add_option("scenario", run_path, "scenario JSON file")->required();
    run_cmd->add_option("--out", out_dir,
                        "output directory (default: $CRYOCIM_OUT_DIR, then ./out)");

    std::string check_path;
    auto* check_cmd = app.add_subcommand("check", "validate a scenario file without running it");
    check_cmd->add_option("scenario", check_path, "scenario JSON file")->required();

    auto* version_cmd = app.add_subcommand("version", "print the tool version");

    CLI11_PARSE(app, argc, argv);

    if (version_cmd->parsed()) {
        std::cout << "cryocim " << cryocim::kVersion << "\n";
        return 0;
    }

    if (check_cmd->parsed()) {
        const auto violations = cryocim::check_scenario(check_path);
        if (violations.empty()) {
            std::cout << "OK\n";
            return 0;
        }
        std::cout << check_path << ": " << violations.size() << " violation(s)\n";
        for (const auto& v : violations) std::cout << "  - " << v << "\n";
        return 2;
    }

    if (out_dir.empty()) {
        if (const char* env = std::getenv("CRYOCIM_OUT_DIR")) out_dir = env;
        if (out_dir.empty()) out_dir = "out";
    }

    cryocim::Scenario scenario;
    try {
        scenario = cryocim::load_scenario(run_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    try {
        cryocim::run_scenario(scenario, out_dir);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    std::cout << "ok: " << scenario.name << " (" << scenario.script.size()
              << " operations) -> " << out_dir << "\n";
    return 0;
}
