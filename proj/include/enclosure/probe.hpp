// SPDX-License-Identifier: Apache-2.0
//
// Probe initial data, the closed-form Laplace-domain probe fields and the
// independent direct-quadrature oracle for them.
#pragma once

#include "enclosure/geometry.hpp"

#include <cmath>
#include <limits>

namespace enclosure {

enum class ProbeKind { exterior, interior };

/// Exterior probe: Phi = (eta^2 - |x-p|^2)^m on B_eta(p).
/// Interior probe: Phi = (r2^2 - |x-p|^2)^m (r1^2 - |x-p|^2)^m on the shell r1 < |x-p| < r2.
struct ProbeSpec {
    ProbeKind kind = ProbeKind::exterior;
    Vec3 center = Vec3::Zero();
    double eta = 0.5;
    double r1 = 1.5;
    double r2 = 2.0;
    int m = 4;
    Vec3 direction = Vec3::UnitZ(); ///< the unit vector a

    static ProbeSpec exterior(const Vec3& center, double eta, int m, const Vec3& direction);
    static ProbeSpec interior(const Vec3& center, double r1, double r2, int m,
                              const Vec3& direction);
};

/// Checks the probe invariants on their own and against the domain ball.
void validate_probe(const ProbeSpec& probe, const Scene& scene);
void validate_probe(const ProbeSpec& probe);

struct SpectralParam {
    double tau = 1.0;
    double tau_tilde = 1.0; ///< sqrt(tau * rho / mu)
    Medium medium;

    static SpectralParam make(double tau, const Medium& medium);
};

struct FieldSample {
    Vec3 velocity = Vec3::Zero();
    double pressure = 0.0;
    Mat3 grad_velocity = Mat3::Zero(); ///< (i, j) = d u_i / d x_j
    Mat3 stress = Mat3::Zero();

    double divergence() const { return grad_velocity.trace(); }
    Mat3 strain_rate() const { return 0.5 * (grad_velocity + grad_velocity.transpose()); }
};

/// sigma = -p I + 2 mu Sym(grad u)
Mat3 cauchy_stress(const Mat3& grad_velocity, double pressure, double mu);

/// A real number stored as sign * exp(log_abs).
struct ScaledValue {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 0;

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

/// A field sample whose true value is mantissa * exp(log_scale).
struct ScaledFieldSample {
    FieldSample mantissa;
    double log_scale = 0.0;

    FieldSample value() const;
};

double initial_data(const ProbeSpec& probe, const Vec3& x);

/// a_m (exterior) or b_m (interior), by converged Gauss-Legendre quadrature.
ScaledValue radial_coefficient(const ProbeSpec& probe, const SpectralParam& s);

/// Leading-order large-tau_tilde form of radial_coefficient.
ScaledValue radial_coefficient_asymptotic(const ProbeSpec& probe, const SpectralParam& s);

/// Closed-form v00(x): the vector potential whose curl is the probe field.
/// Valid outside the probe support on the probe-kind side (|x-p| > eta or |x-p| < r1).
Vec3 probe_potential(const ProbeSpec& probe, const SpectralParam& s, const Vec3& x);

/// Closed-form w00 = curl v00 with analytic gradient; pressure is zero.
ScaledFieldSample probe_field_scaled(const ProbeSpec& probe, const SpectralParam& s, const Vec3& x);
ScaledFieldSample probe_field_scaled(const ProbeSpec& probe, const SpectralParam& s, const Vec3& x,
                                     const ScaledValue& coefficient);
FieldSample probe_field(const ProbeSpec& probe, const SpectralParam& s, const Vec3& x);

struct OracleOptions {
    double tolerance = 1e-7;
    int base_nodes = 16;
    int max_levels = 5;
    int azimuthal = 8;
};

struct OracleResult {
    Vec3 potential = Vec3::Zero();
    int levels = 0;
    double relative_change = 0.0;
};

/// v00(x) by direct tensor quadrature of the Yukawa convolution over the probe support.
OracleResult probe_field_oracle(const ProbeSpec& probe, const SpectralParam& s, const Vec3& x,
                                const OracleOptions& options = {});

/// Net flux of w00 through the quadrature surface (zero for a closed surface
/// outside the probe support).
double flux_compatibility(const ProbeSpec& probe, const SpectralParam& s,
                          const SurfaceQuadrature& quadrature);

} // namespace enclosure
