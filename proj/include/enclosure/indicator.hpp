// SPDX-License-Identifier: Apache-2.0
//
// The indicator function I(tau) = J + E by the interior energy route, the
// boundary-integral route as a cross-check, and the Green-identity check.
#pragma once

#include "enclosure/brinkman.hpp"
#include "enclosure/geometry.hpp"
#include "enclosure/probe.hpp"

#include <optional>
#include <vector>

namespace enclosure {

/// Running sum of terms m * exp(l) kept as mantissa and reference exponent.
class LogSum {
public:
    void add(double mantissa, double log_scale);
    ScaledValue value() const;
    /// log of the sum of |terms|
    double log_abs_total() const;

private:
    double ref_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
    double abs_sum_ = 0.0;
};

/// Resolution of the energy and surface quadratures. Radial panels grow
/// geometrically from a first panel of width layer_width / tau_tilde.
struct QuadratureOptions {
    int radial = 10;
    double panel_ratio = 2.0;
    double layer_width = 0.5;
    int polar = 40;
    int azimuthal = 40;
    int surface_polar = 64;
    int surface_azimuthal = 64;
};

/// Unit vector from the obstacle center toward the part of D nearest the probe support.
Vec3 hot_direction(const Scene& scene, const ProbeSpec& probe);

VolumeQuadrature obstacle_quadrature(const Scene& scene, const ProbeSpec& probe,
                                     const SpectralParam& s, const QuadratureOptions& q);
VolumeQuadrature exterior_quadrature(const Scene& scene, const ProbeSpec& probe,
                                     const SpectralParam& s, const QuadratureOptions& q);

/// Product rules on dOmega and dD with the polar axis through the hot spot.
SurfaceQuadrature boundary_quadrature(const Scene& scene, const ProbeSpec& probe,
                                      const QuadratureOptions& q);
SurfaceQuadrature obstacle_surface_quadrature(const Scene& scene, const ProbeSpec& probe,
                                              const QuadratureOptions& q);

/// J = int_D 2 mu |Sym grad w00|^2 + tau rho |w00|^2
ScaledValue energy_J(const Scene& scene, const ProbeSpec& probe, const SpectralParam& s,
                     const VolumeQuadrature& quad_D);

/// E = int_{Omega \ D} 2 mu |Sym grad R|^2 + tau rho |R|^2, for several models at once.
std::vector<ScaledValue> energy_E(const Scene& scene, const SpectralParam& s,
                                  const std::vector<const MfsModel*>& models,
                                  const VolumeQuadrature& quad_shell);
ScaledValue energy_E(const Scene& scene, const SpectralParam& s, const MfsModel& model,
                     const VolumeQuadrature& quad_shell);

struct BoundaryIndicator {
    ScaledValue value;
    double cancellation_digits = 0.0; ///< log10(int |integrand| / |int integrand|)
    bool unreliable = false;
};

/// int_{dOmega} sigma(R) n . w00 dS
BoundaryIndicator indicator_boundary(const Scene& scene, const ProbeSpec& probe,
                                     const SpectralParam& s, const MfsModel& model,
                                     const SurfaceQuadrature& quad_Omega,
                                     double max_cancellation_digits = 8.0);

/// Both sides of the Green identity for w = w00 + R:
///   outer    = int_{dOmega} (sigma(w) n . w00 - sigma(w00) n . w) dS
///   obstacle = int_{dD} sigma(w) n . w00 dS  (n the outward normal of D)
struct GreenCheck {
    ScaledValue outer;
    ScaledValue obstacle;
    double relative_mismatch = 0.0;
};

GreenCheck green_identity(const Scene& scene, const ProbeSpec& probe, const SpectralParam& s,
                          const MfsModel& model, const SurfaceQuadrature& quad_Omega,
                          const SurfaceQuadrature& quad_D);

struct IndicatorOptions {
    MfsOptions mfs;
    QuadratureOptions quadrature;
    double cancellation_cap = 15.0; ///< boundary route only for tau_tilde up to this
    double remainder_constant = 1.0;
};

struct IndicatorSample {
    double tau = 0.0;
    double tau_tilde = 0.0;
    ScaledValue J;
    ScaledValue E;
    ScaledValue I_interior;
    std::optional<double> I_boundary;
    double cancellation_digits = 0.0;
    bool cancellation_flag = false;
    double log_remainder_bound = 0.0; ///< log of C e^{-tau T} (sqrt J + 1)
    double solver_residual = 0.0;

    double remainder_bound() const { return std::exp(log_remainder_bound); }
};

/// One factorization serves every probe at this tau.
std::vector<IndicatorSample> sample_indicators(const Scene& scene,
                                               const std::vector<ProbeSpec>& probes, double tau,
                                               const IndicatorOptions& options = {});

IndicatorSample sample_indicator(const Scene& scene, const ProbeSpec& probe, double tau,
                                 const IndicatorOptions& options = {});

} // namespace enclosure
