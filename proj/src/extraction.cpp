// SPDX-License-Identifier: Apache-2.0
#include "enclosure/extraction.hpp"

#include "enclosure/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace enclosure {
namespace {

std::vector<double> column(const std::vector<IndicatorSample>& s, std::size_t from,
                           double (*get)(const IndicatorSample&))
{
    std::vector<double> out;
    for (std::size_t i = from; i < s.size(); ++i)
        out.push_back(get(s[i]));
    return out;
}

double tau_of(const IndicatorSample& s) { return s.tau; }
double log_I_of(const IndicatorSample& s) { return s.I_interior.log_abs; }

void require_samples(const SweepResult& r)
{
    if (r.samples.size() < 8)
        throw Error(ErrorCode::too_few_valid_samples, "at least 8 indicator samples are required");
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        if (r.samples[i].I_interior.sign != 1)
            throw Error(ErrorCode::inconsistent_estimate, "indicator sample is not positive");
        if (i > 0 && !(r.samples[i].tau > r.samples[i - 1].tau))
            throw Error(ErrorCode::validation_error, "sweep taus must increase");
    }
}

} // namespace

std::vector<double> TauGrid::values() const
{
    if (count < 2 || !(tau_min > 0.0) || !(tau_max > tau_min))
        throw Error(ErrorCode::validation_error, "tau grid needs 0 < tau_min < tau_max, count >= 2");
    std::vector<double> out(static_cast<std::size_t>(count));
    const double step = std::log(tau_max / tau_min) / (count - 1);
    for (int k = 0; k < count; ++k)
        out[static_cast<std::size_t>(k)] = tau_min * std::exp(step * k);
    out.front() = tau_min;
    out.back() = tau_max;
    return out;
}

std::vector<SweepResult> sweep(const Scene& scene, const std::vector<ProbeSpec>& probes,
                               const TauGrid& grid, const IndicatorOptions& options,
                               const SweepProgress& progress)
{
    if (grid.count < 8)
        throw Error(ErrorCode::validation_error, "sweep grid needs at least 8 points");
    std::vector<SweepResult> out(probes.size());
    for (std::size_t k = 0; k < probes.size(); ++k) {
        out[k].grid = grid;
        out[k].probe = probes[k];
    }
    const std::vector<double> taus = grid.values();
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (progress)
            progress(taus[i], static_cast<int>(i), grid.count);
        try {
            const auto samples = sample_indicators(scene, probes, taus[i], options);
            for (std::size_t k = 0; k < probes.size(); ++k)
                out[k].samples.push_back(samples[k]);
        } catch (const Error& e) {
            // configuration errors are fatal; numerical ones are recorded
            switch (e.code()) {
            case ErrorCode::solver_failed:
            case ErrorCode::quadrature_not_converged:
                for (SweepResult& r : out)
                    r.failures.push_back({taus[i], e.what()});
                break;
            default:
                throw;
            }
        }
    }
    for (const SweepResult& r : out)
        if (r.samples.size() < 8)
            throw Error(ErrorCode::too_few_valid_samples,
                        "fewer than 8 tau values produced a valid sample");
    return out;
}

SweepResult sweep(const Scene& scene, const ProbeSpec& probe, const TauGrid& grid,
                  const IndicatorOptions& options)
{
    return sweep(scene, std::vector<ProbeSpec>{probe}, grid, options).front();
}

AsymptoticFit fit_asymptotic(const std::vector<double>& tau, const std::vector<double>& log_I,
                             const Medium& medium)
{
    const auto n = static_cast<Eigen::Index>(tau.size());
    if (n < 3 || log_I.size() != tau.size())
        throw Error(ErrorCode::fit_degenerate, "the fit needs at least three points");
    const double k = 2.0 * std::sqrt(medium.rho / medium.mu);
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = tau[static_cast<std::size_t>(i)];
        A(i, 0) = -k * std::sqrt(t);
        A(i, 1) = std::log(t);
        A(i, 2) = 1.0;
        b[i] = log_I[static_cast<std::size_t>(i)];
    }
    // scale columns so the rank decision is not about units
    const Eigen::Vector3d scale = A.colwise().norm().cwiseInverse().transpose();
    const Eigen::MatrixXd As = A * scale.asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
    qr.setThreshold(1e-10);
    if (qr.rank() < 3)
        throw Error(ErrorCode::fit_degenerate, "collinear design in the asymptotic fit");
    const Eigen::Vector3d x = scale.asDiagonal() * qr.solve(b);
    AsymptoticFit fit;
    fit.d = x[0];
    fit.kappa = x[1];
    fit.c = x[2];
    const Eigen::VectorXd r = b - A * x;
    fit.residuals.assign(r.data(), r.data() + r.size());
    fit.rms = std::sqrt(r.squaredNorm() / static_cast<double>(n));
    return fit;
}

std::size_t tail_start(std::size_t n, double fraction)
{
    const auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
    return n - std::min(n, std::max<std::size_t>(3, keep));
}

std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::diverges:
        return "diverges";
    case Verdict::decays:
        return "decays";
    case Verdict::critical:
        return "critical";
    }
    return "unknown";
}

ExtractionReport extract_distance(const SweepResult& result, const Medium& medium,
                                  const ExtractionOptions& options)
{
    require_samples(result);
    const std::size_t from = tail_start(result.samples.size(), options.tail_fraction);
    const auto tau = column(result.samples, from, tau_of);
    const auto log_I = column(result.samples, from, log_I_of);
    const AsymptoticFit fit = fit_asymptotic(tau, log_I, medium);

    ExtractionReport report;
    report.kind = result.probe.kind;
    report.dist_estimate = fit.d;
    report.kappa_estimate = fit.kappa;
    report.intercept = fit.c;
    report.fit_residuals = fit.residuals;
    report.fit_rms = fit.rms;
    report.tail_begin = from;
    const double k = 2.0 * std::sqrt(medium.rho / medium.mu);
    report.two_point_estimate =
        -(log_I.back() - log_I.front()) / (k * (std::sqrt(tau.back()) - std::sqrt(tau.front())));
    std::vector<double> normalized(log_I);
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const SpectralParam s = SpectralParam::make(tau[i], medium);
        normalized[i] -= 2.0 * (radial_coefficient(result.probe, s).log_abs -
                                radial_coefficient_asymptotic(result.probe, s).log_abs);
    }
    const AsymptoticFit nfit = fit_asymptotic(tau, normalized, medium);
    report.normalized_estimate = nfit.d;
    report.normalized_kappa = nfit.kappa;
    if (!(fit.d > 0.0))
        throw Error(ErrorCode::negative_distance, "fitted distance is not positive");
    report.recovered = recover_sphere_quantity(report, result.probe);
    return report;
}

double recover_sphere_quantity(const ExtractionReport& report, const ProbeSpec& probe)
{
    if (!(report.dist_estimate > 0.0))
        throw Error(ErrorCode::negative_distance, "distance estimate is not positive");
    if (probe.kind == ProbeKind::exterior)
        return report.dist_estimate + probe.eta;
    const double R = probe.r1 - report.dist_estimate;
    if (!(R > 0.0))
        throw Error(ErrorCode::inconsistent_estimate,
                    "distance estimate exceeds r1; recovered R_D would be nonpositive");
    return R;
}

ClassifierResult classify_threshold(const SweepResult& result, double T_star, const Medium& medium,
                                    const ExtractionOptions& options)
{
    require_samples(result);
    const std::size_t from = tail_start(result.samples.size(), options.tail_fraction);
    const auto tau = column(result.samples, from, tau_of);
    const auto log_I = column(result.samples, from, log_I_of);
    const AsymptoticFit fit = fit_asymptotic(tau, log_I, medium);

    ClassifierResult out;
    out.T_star = T_star;
    out.limiting_slope = T_star - 2.0 * std::sqrt(medium.rho / medium.mu) * fit.d;
    if (out.limiting_slope > options.slope_tolerance)
        out.verdict = Verdict::diverges;
    else if (out.limiting_slope < -options.slope_tolerance)
        out.verdict = Verdict::decays;
    else
        out.verdict = Verdict::critical;

    // envelope h = log I + sqrt(tau) T* - 3 log tau; bounded means no growth in sqrt(tau)
    const std::size_t n = tau.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    out.envelope_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::sqrt(tau[i]);
        const double h = log_I[i] + x * T_star - 3.0 * std::log(tau[i]);
        out.envelope_max = std::max(out.envelope_max, h);
        sx += x;
        sy += h;
        sxx += x * x;
        sxy += x * h;
    }
    const double dn = static_cast<double>(n);
    out.envelope_slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
    out.envelope_bounded = out.envelope_slope <= options.slope_tolerance;
    return out;
}

} // namespace enclosure
