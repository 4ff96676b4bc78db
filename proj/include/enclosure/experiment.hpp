// SPDX-License-Identifier: Apache-2.0
//
// Experiment orchestration, CSV/report emission and the oracle suites.
#pragma once

#include "enclosure/config.hpp"
#include "enclosure/error.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace enclosure {

enum ExitCode : int {
    exit_success = 0,
    exit_io = 1,
    exit_config = 2,
    exit_solver = 3,
    exit_reconstruction = 4,
};

ExitCode exit_code_for(ErrorCode code);

inline constexpr const char* sweep_csv_header =
    "tau,tau_tilde,log_J,log_E,log_I_interior,I_boundary,boundary_residual,remainder_bound,"
    "cancellation_flag";

std::string format_sweep_csv(const SweepResult& result);

struct TruthComparison {
    double dist = 0.0;
    double recovered = 0.0; ///< d_D(z1) or R_D(z2)
    double dist_relative_error = 0.0;
    double recovered_error = 0.0;
};

TruthComparison compare_with_truth(const Scene& scene, const ProbeSpec& probe,
                                   const ExtractionReport& report);

std::string format_report(const ExperimentConfig& config, const SweepResult& result,
                          const ExtractionReport* report, const std::string& failure);

/// Writes to a temporary sibling and renames it into place.
void write_atomic(const std::string& path, const std::string& contents);

struct RunOutcome {
    ExitCode code = exit_success;
    std::string message;
    std::optional<SweepResult> sweep;
    std::optional<ExtractionReport> report;
};

/// Sweep, extract, classify; writes sweep.csv and report.txt into out_dir.
RunOutcome run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                          std::ostream* log = nullptr);

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<std::string> verify_suite_names();
/// Runs one named suite ("probe-oracle", "brinkmanlet", "green") or all when empty.
std::vector<SuiteResult> run_verify(const std::string& suite = {});

} // namespace enclosure
