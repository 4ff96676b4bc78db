// SPDX-License-Identifier: Apache-2.0
#include "enclosure/experiment.hpp"

#include "enclosure/error.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace enclosure {

ExitCode exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::parse_error:
    case ErrorCode::validation_error:
    case ErrorCode::obstacle_not_interior:
    case ErrorCode::nonpositive_radius:
    case ErrorCode::nonpositive_material:
    case ErrorCode::probe_touches_obstacle:
    case ErrorCode::probe_intersects_domain:
    case ErrorCode::invalid_probe:
    case ErrorCode::too_few_nodes:
    case ErrorCode::malformed_region:
        return exit_config;
    case ErrorCode::fit_degenerate:
    case ErrorCode::negative_distance:
    case ErrorCode::inconsistent_estimate:
        return exit_reconstruction;
    case ErrorCode::io_error:
        return exit_io;
    default:
        return exit_solver;
    }
}

std::string format_sweep_csv(const SweepResult& result)
{
    std::string out = std::string(sweep_csv_header) + "\n";
    const auto num = [](double x) {
        char buf[64];
        const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
        return std::string(buf, r.ptr);
    };
    for (const IndicatorSample& s : result.samples) {
        out += num(s.tau) + "," + num(s.tau_tilde) + "," + num(s.J.log_abs) + "," +
               num(s.E.log_abs) + "," + num(s.I_interior.log_abs) + "," +
               (s.I_boundary ? num(*s.I_boundary) : std::string("nan")) + "," +
               num(s.solver_residual) + "," + num(s.remainder_bound()) + "," +
               (s.cancellation_flag ? "1" : "0") + "\n";
    }
    return out;
}

TruthComparison compare_with_truth(const Scene& scene, const ProbeSpec& probe,
                                   const ExtractionReport& report)
{
    TruthComparison t;
    t.dist = dist_D_K(scene, probe);
    const SphereDistances dr = d_and_R(scene.obstacle, probe.center);
    t.recovered = probe.kind == ProbeKind::exterior ? dr.distance : dr.farthest;
    t.dist_relative_error = std::abs(report.dist_estimate - t.dist) / t.dist;
    t.recovered_error = std::abs(report.recovered - t.recovered);
    return t;
}

std::string format_report(const ExperimentConfig& config, const SweepResult& result,
                          const ExtractionReport* report, const std::string& failure)
{
    std::ostringstream o;
    o.precision(10);
    const bool ext = config.probe.kind == ProbeKind::exterior;
    o << "probe = " << (ext ? "ext" : "int") << "\n";
    o << "samples = " << result.samples.size() << " of " << config.grid.count << "\n";
    for (const SweepFailure& f : result.failures)
        o << "failed tau = " << f.tau << ": " << f.what << "\n";
    if (!report) {
        o << "reconstruction failure: " << failure << "\n";
        return o.str();
    }
    const double spread = std::abs(report->dist_estimate - report->two_point_estimate);
    o << "dist_estimate = " << report->dist_estimate << "\n";
    o << "two_point_estimate = " << report->two_point_estimate << "\n";
    o << "kappa = " << report->kappa_estimate << "\n";
    o << "coefficient_normalized_estimate = " << report->normalized_estimate
      << " (kappa " << report->normalized_kappa << ")\n";
    o << "intercept = " << report->intercept << "\n";
    o << "fit_rms = " << report->fit_rms << "\n";
    o << (ext ? "d_D" : "R_D") << " = " << report->recovered << " ± " << spread << "\n";
    const TruthComparison t = compare_with_truth(config.scene, config.probe, *report);
    o << "truth dist = " << t.dist << " (relative error " << t.dist_relative_error << ")\n";
    o << "truth " << (ext ? "d_D" : "R_D") << " = " << t.recovered << " (error "
      << t.recovered_error << ")\n";
    for (double T : config.thresholds) {
        const ClassifierResult c =
            classify_threshold(result, T, config.scene.medium, config.extraction);
        o << "classifier T* = " << T << ": " << to_string(c.verdict)
          << " (limiting slope " << c.limiting_slope << ")";
        if (c.verdict == Verdict::critical)
            o << ", envelope " << (c.envelope_bounded ? "bounded" : "unbounded");
        o << "\n";
    }
    return o.str();
}

void write_atomic(const std::string& path, const std::string& contents)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::io_error, "cannot write " + tmp);
        out << contents;
        out.flush();
        if (!out)
            throw Error(ErrorCode::io_error, "short write to " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw Error(ErrorCode::io_error, "cannot rename " + tmp + ": " + ec.message());
}

RunOutcome run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                          std::ostream* log)
{
    RunOutcome outcome;
    try {
        validate_config(config);
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec)
            throw Error(ErrorCode::io_error, "cannot create " + out_dir + ": " + ec.message());
        SweepProgress progress;
        if (log && config.verbosity > 0)
            progress = [log](double tau, int i, int n) {
                *log << "tau " << tau << " (" << i + 1 << "/" << n << ")\n" << std::flush;
            };
        outcome.sweep =
            sweep(config.scene, {config.probe}, config.grid, config.indicator, progress).front();
        write_atomic(out_dir + "/sweep.csv", format_sweep_csv(*outcome.sweep));
        std::string failure;
        try {
            outcome.report = extract_distance(*outcome.sweep, config.scene.medium, config.extraction);
        } catch (const Error& e) {
            if (exit_code_for(e.code()) != exit_reconstruction)
                throw;
            failure = e.what();
            outcome.code = exit_reconstruction;
            outcome.message = failure;
        }
        write_atomic(out_dir + "/report.txt",
                     format_report(config, *outcome.sweep,
                                   outcome.report ? &*outcome.report : nullptr, failure));
    } catch (const Error& e) {
        outcome.code = exit_code_for(e.code());
        outcome.message = e.what();
    }
    return outcome;
}

} // namespace enclosure
