// SPDX-License-Identifier: Apache-2.0
//
// enclosure run --config <path> [--out <dir>]
// enclosure verify [--suite <name>]
// enclosure dump-config [--config <path>]
#include "enclosure/error.hpp"
#include "enclosure/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace enclosure;

int main(int argc, char** argv)
{
    CLI::App app{"Time-domain enclosure method for the Stokes system"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    auto* run = app.add_subcommand("run", "Sweep tau, extract the distance and write sweep.csv/report.txt");
    run->add_option("--config", config_path, "Configuration file")->required();
    run->add_option("--out", out_dir, "Output directory (overrides output.dir)");

    std::string suite;
    auto* verify = app.add_subcommand("verify", "Run the oracle suites");
    verify->add_option("--suite", suite, "One suite")
        ->check(CLI::IsMember(verify_suite_names()));

    std::string dump_path;
    auto* dump = app.add_subcommand("dump-config", "Print the effective configuration");
    dump->add_option("--config", dump_path, "Configuration file (defaults if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : exit_config;
    }

    // an unreadable config file is a configuration error
    const auto load = [](const std::string& path) {
        try {
            return load_config(path);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::io_error)
                throw Error(ErrorCode::validation_error, e.what());
            throw;
        }
    };
    try {
        if (*run) {
            const ExperimentConfig config = load(config_path);
            const RunOutcome r =
                run_experiment(config, out_dir.empty() ? config.output_dir : out_dir, &std::cerr);
            if (r.code != exit_success)
                std::cerr << "error: " << r.message << "\n";
            if (r.report)
                std::cout << "dist_estimate = " << r.report->dist_estimate << "\n";
            return r.code;
        }
        if (*verify) {
            bool ok = true;
            for (const SuiteResult& s : run_verify(suite)) {
                std::cout << (s.passed ? "PASS " : "FAIL ") << s.name << ": " << s.detail << "\n";
                ok = ok && s.passed;
            }
            return ok ? exit_success : exit_solver;
        }
        if (*dump) {
            std::cout << dump_config(dump_path.empty() ? ExperimentConfig{} : load(dump_path));
            return exit_success;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    }
    return exit_success;
}
