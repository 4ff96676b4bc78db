// SPDX-License-Identifier: Apache-2.0
//
// Sweeps over tau, the asymptotic fit of log I, recovery of the sphere
// quantities and the threshold classifier.
#pragma once

#include "enclosure/indicator.hpp"

#include <functional>
#include <string>
#include <vector>

namespace enclosure {

/// Geometric grid tau_min * q^k, k = 0..count-1, ending at tau_max.
struct TauGrid {
    double tau_min = 50.0;
    double tau_max = 3200.0;
    int count = 24;

    std::vector<double> values() const;
};

struct SweepFailure {
    double tau;
    std::string what;
};

struct SweepResult {
    TauGrid grid;
    ProbeSpec probe;
    std::vector<IndicatorSample> samples; ///< successful samples, tau increasing
    std::vector<SweepFailure> failures;
};

using SweepProgress = std::function<void(double tau, int index, int count)>;

/// One sweep per probe; each tau is factored once for all probes.
std::vector<SweepResult> sweep(const Scene& scene, const std::vector<ProbeSpec>& probes,
                               const TauGrid& grid, const IndicatorOptions& options = {},
                               const SweepProgress& progress = {});
SweepResult sweep(const Scene& scene, const ProbeSpec& probe, const TauGrid& grid,
                  const IndicatorOptions& options = {});

/// Least-squares fit of log I = -2 sqrt(rho/mu) d sqrt(tau) + kappa log tau + c.
struct AsymptoticFit {
    double d = 0.0;
    double kappa = 0.0;
    double c = 0.0;
    std::vector<double> residuals;
    double rms = 0.0;
};

AsymptoticFit fit_asymptotic(const std::vector<double>& tau, const std::vector<double>& log_I,
                             const Medium& medium);

/// Last ceil(fraction * n) samples, at least three.
std::size_t tail_start(std::size_t n, double fraction);

enum class Verdict { diverges, decays, critical };
std::string_view to_string(Verdict v);

struct ClassifierResult {
    double T_star = 0.0;
    Verdict verdict = Verdict::critical;
    double limiting_slope = 0.0; ///< T_star - 2 sqrt(rho/mu) d_fit
    double envelope_slope = 0.0; ///< slope in sqrt(tau) of g - 3 log tau on the tail
    double envelope_max = 0.0;   ///< max over the tail of g - 3 log tau
    bool envelope_bounded = true;
};

struct ExtractionOptions {
    double tail_fraction = 0.6;
    double slope_tolerance = 0.02;
};

struct ExtractionReport {
    ProbeKind kind = ProbeKind::exterior;
    double dist_estimate = 0.0;
    double kappa_estimate = 0.0;
    double intercept = 0.0;
    std::vector<double> fit_residuals;
    double fit_rms = 0.0;
    double two_point_estimate = 0.0;
    /// Same fit after dividing I by the squared ratio of the probe coefficient
    /// to its large-tau form; a diagnostic, not the reported estimate.
    double normalized_estimate = 0.0;
    double normalized_kappa = 0.0;
    double recovered = 0.0; ///< d_D(z1) or R_D(z2)
    std::size_t tail_begin = 0;
};

ExtractionReport extract_distance(const SweepResult& result, const Medium& medium,
                                  const ExtractionOptions& options = {});

/// Exterior: d_D(z1) = dist + eta. Interior: R_D(z2) = r1 - dist.
double recover_sphere_quantity(const ExtractionReport& report, const ProbeSpec& probe);

ClassifierResult classify_threshold(const SweepResult& result, double T_star, const Medium& medium,
                                    const ExtractionOptions& options = {});

} // namespace enclosure
