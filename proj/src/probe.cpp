// SPDX-License-Identifier: Apache-2.0
#include "enclosure/probe.hpp"

#include "enclosure/error.hpp"
#include "enclosure/gauss_legendre.hpp"

#include <cmath>
#include <numbers>

namespace enclosure {
namespace {

constexpr double pi = std::numbers::pi;

// Gauss-Legendre on the panels [breaks[k], breaks[k+1]], doubling from 64
// nodes until the relative change drops below 1e-12 (cap 1024).
template <class F>
double converged_integral(F&& f, const std::vector<double>& breaks)
{
    double previous = 0.0;
    for (int n = 64; n <= 1024; n *= 2) {
        double sum = 0.0;
        for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
            sum += integrate_gl(f, breaks[k], breaks[k + 1], n);
        if (n > 64 && std::abs(sum - previous) <= 1e-12 * std::abs(sum))
            return sum;
        previous = sum;
    }
    throw Error(ErrorCode::quadrature_not_converged,
                "radial coefficient did not converge with 1024 Gauss-Legendre nodes");
}

// Radial profile g(r) of the potential and the pieces of its Hessian,
// all sharing the factor exp(log_scale):
//   g'(r) = d1,  Hess g = A xhat xhat^T + B I  with A = g'' - g'/r, B = g'/r.
struct RadialProfile {
    double g;
    double d1;
    double A;
    double B;
    double log_scale;
};

// g = exp(-k r) / r
RadialProfile decaying_profile(double k, double r)
{
    const double r2 = r * r;
    const double r3 = r2 * r;
    return {1.0 / r, -(1.0 / r2 + k / r), k * k / r + 3.0 * k / r2 + 3.0 / r3,
            -(1.0 / r3 + k / r2), -k * r};
}

// g = sinh(k r) / r = k S(z), z = k r, S(z) = sinh(z) / z
RadialProfile growing_profile(double k, double r)
{
    const double z = k * r;
    double S, Sp_over_z, Sa; // S, S'/z, S'' - S'/z
    double log_scale = 0.0;
    if (z <= 1.0) {
        const double z2 = z * z;
        S = 0.0;
        Sp_over_z = 0.0;
        Sa = 0.0;
        double pw = 1.0;        // z^{2k}
        double fact = 1.0;      // (2k+1)!
        double pw_m2 = 0.0;     // z^{2k-2}
        for (int j = 0; j < 20; ++j) {
            if (j > 0)
                fact *= (2.0 * j) * (2.0 * j + 1.0);
            S += pw / fact;
            if (j >= 1) {
                Sp_over_z += 2.0 * j * pw_m2 / fact;
                Sa += 2.0 * j * (2.0 * j - 2.0) * pw_m2 / fact;
            }
            pw_m2 = pw;
            pw *= z2;
        }
    } else {
        const double E = std::exp(-2.0 * z);
        const double z2 = z * z;
        const double z3 = z2 * z;
        S = (1.0 - E) / z;
        Sp_over_z = (z * (1.0 + E) - (1.0 - E)) / z3;
        Sa = (z2 * (1.0 - E) - 3.0 * z * (1.0 + E) + 3.0 * (1.0 - E)) / z3;
        log_scale = z - std::log(2.0);
    }
    const double k2 = k * k;
    const double k3 = k2 * k;
    return {k * S, k3 * Sp_over_z * r, k3 * Sa, k3 * Sp_over_z, log_scale};
}

ScaledValue log_form(double value, double log_offset)
{
    if (value == 0.0)
        return {};
    return {std::log(std::abs(value)) + log_offset, value > 0.0 ? 1 : -1};
}

// Signed log amplitude multiplying the radial profile in v00 = amp * g(r) * a.
ScaledValue amplitude(const ProbeSpec& probe, const SpectralParam& s,
                      const ScaledValue& coefficient)
{
    ScaledValue amp = coefficient;
    amp.log_abs -= std::log(s.medium.mu);
    if (probe.kind == ProbeKind::exterior)
        amp.log_abs += 2.0 * (1.0 + probe.m) * std::log(probe.eta);
    return amp;
}

RadialProfile profile_for(const ProbeSpec& probe, double k, double r)
{
    return probe.kind == ProbeKind::exterior ? decaying_profile(k, r) : growing_profile(k, r);
}

void check_region(const ProbeSpec& probe, double r)
{
    if (probe.kind == ProbeKind::exterior && !(r > probe.eta))
        throw Error(ErrorCode::wrong_region, "exterior probe field needs |x - p| > eta");
    if (probe.kind == ProbeKind::interior && !(r < probe.r1))
        throw Error(ErrorCode::wrong_region, "interior probe field needs |x - p| < R1");
}

} // namespace

ProbeSpec ProbeSpec::exterior(const Vec3& center, double eta, int m, const Vec3& direction)
{
    ProbeSpec p;
    p.kind = ProbeKind::exterior;
    p.center = center;
    p.eta = eta;
    p.m = m;
    p.direction = direction;
    return p;
}

ProbeSpec ProbeSpec::interior(const Vec3& center, double r1, double r2, int m,
                              const Vec3& direction)
{
    ProbeSpec p;
    p.kind = ProbeKind::interior;
    p.center = center;
    p.r1 = r1;
    p.r2 = r2;
    p.m = m;
    p.direction = direction;
    return p;
}

void validate_probe(const ProbeSpec& probe)
{
    if (probe.m < 4)
        throw Error(ErrorCode::invalid_probe, "smoothness index m must be >= 4");
    if (std::abs(probe.direction.norm() - 1.0) > 1e-12)
        throw Error(ErrorCode::invalid_probe, "direction a must be a unit vector");
    if (probe.kind == ProbeKind::exterior && !(probe.eta > 0.0))
        throw Error(ErrorCode::invalid_probe, "eta must be positive");
    if (probe.kind == ProbeKind::interior && !(probe.r1 > 0.0 && probe.r2 > probe.r1))
        throw Error(ErrorCode::invalid_probe, "interior probe needs 0 < R1 < R2");
}

void validate_probe(const ProbeSpec& probe, const Scene& scene)
{
    validate_probe(probe);
    const double offset = (probe.center - scene.domain.center).norm();
    if (probe.kind == ProbeKind::exterior && !(offset > scene.domain.radius + probe.eta))
        throw Error(ErrorCode::probe_intersects_domain,
                    "exterior probe ball must not meet the closed domain");
    if (probe.kind == ProbeKind::interior && !(offset + scene.domain.radius < probe.r1))
        throw Error(ErrorCode::probe_intersects_domain,
                    "domain must lie inside the inner probe sphere");
}

SpectralParam SpectralParam::make(double tau, const Medium& medium)
{
    return {tau, std::sqrt(tau * medium.rho / medium.mu), medium};
}

Mat3 cauchy_stress(const Mat3& grad_velocity, double pressure, double mu)
{
    return -pressure * Mat3::Identity() + mu * (grad_velocity + grad_velocity.transpose());
}

FieldSample ScaledFieldSample::value() const
{
    const double f = std::exp(log_scale);
    FieldSample out;
    out.velocity = f * mantissa.velocity;
    out.pressure = f * mantissa.pressure;
    out.grad_velocity = f * mantissa.grad_velocity;
    out.stress = f * mantissa.stress;
    return out;
}

double initial_data(const ProbeSpec& probe, const Vec3& x)
{
    const double r2 = (x - probe.center).squaredNorm();
    if (probe.kind == ProbeKind::exterior) {
        const double e2 = probe.eta * probe.eta;
        return r2 < e2 ? std::pow(e2 - r2, probe.m) : 0.0;
    }
    const double a2 = probe.r1 * probe.r1;
    const double b2 = probe.r2 * probe.r2;
    if (r2 <= a2 || r2 >= b2)
        return 0.0;
    return std::pow(b2 - r2, probe.m) * std::pow(a2 - r2, probe.m);
}

ScaledValue radial_coefficient(const ProbeSpec& probe, const SpectralParam& s)
{
    const double k = s.tau_tilde;
    if (!(k > 0.0))
        throw Error(ErrorCode::invalid_probe, "tau_tilde must be positive");
    const int m = probe.m;
    if (probe.kind == ProbeKind::exterior) {
        // a_m = e^x / k * int_0^1 s (1-s^2)^m (e^{x(s-1)} - e^{-x(s+1)}) / 2 ds, x = eta k
        const double x = probe.eta * k;
        const auto f = [&](double t) {
            return t * std::pow(1.0 - t * t, m) * 0.5 * std::exp(x * (t - 1.0)) *
                   -std::expm1(-2.0 * x * t);
        };
        const double split = 1.0 - std::min(1.0, 60.0 / x);
        std::vector<double> breaks = split > 0.0 ? std::vector<double>{0.0, split, 1.0}
                                                 : std::vector<double>{0.0, 1.0};
        return log_form(converged_integral(f, breaks), x - std::log(k));
    }
    // b_m = (-1)^m e^{-R1 k} / k * int s (R2^2-s^2)^m (s^2-R1^2)^m e^{-(s-R1)k} ds
    const double a = probe.r1;
    const double b = probe.r2;
    const auto f = [&](double t) {
        return t * std::pow(b * b - t * t, m) * std::pow(t * t - a * a, m) *
               std::exp(-(t - a) * k);
    };
    const double split = a + std::min(b - a, 60.0 / k);
    std::vector<double> breaks =
        split < b ? std::vector<double>{a, split, b} : std::vector<double>{a, b};
    ScaledValue out = log_form(converged_integral(f, breaks), -a * k - std::log(k));
    if (m % 2 == 1)
        out.sign = -out.sign;
    return out;
}

ScaledValue radial_coefficient_asymptotic(const ProbeSpec& probe, const SpectralParam& s)
{
    const double k = s.tau_tilde;
    const int m = probe.m;
    const double log_fact = std::lgamma(m + 1.0);
    if (probe.kind == ProbeKind::exterior) {
        const double x = probe.eta * k;
        return {std::log(probe.eta) + (m - 1) * std::log(2.0) + log_fact + x -
                    (m + 2) * std::log(x),
                1};
    }
    const double a = probe.r1;
    const double b = probe.r2;
    return {m * std::log(2.0) + log_fact + (m + 1) * std::log(a) + m * std::log(b * b - a * a) -
                a * k - (m + 2) * std::log(k),
            m % 2 == 0 ? 1 : -1};
}

Vec3 probe_potential(const ProbeSpec& probe, const SpectralParam& s, const Vec3& x)
{
    const double r = (x - probe.center).norm();
    check_region(probe, r);
    const ScaledValue amp = amplitude(probe, s, radial_coefficient(probe, s));
    const RadialProfile prof = profile_for(probe, s.tau_tilde, r);
    return amp.sign * prof.g * std::exp(amp.log_abs + prof.log_scale) * probe.direction;
}

ScaledFieldSample probe_field_scaled(const ProbeSpec& probe, const SpectralParam& s, const Vec3& x,
                                     const ScaledValue& coefficient)
{
    const Vec3 d = x - probe.center;
    const double r = d.norm();
    check_region(probe, r);
    const ScaledValue amp = amplitude(probe, s, coefficient);
    const RadialProfile prof = profile_for(probe, s.tau_tilde, r);
    const Vec3 xhat = r > 0.0 ? Vec3(d / r) : Vec3::Zero();
    const Vec3& a = probe.direction;
    const Vec3 xa = xhat.cross(a);

    Mat3 cross_a; // (i, k) = eps_{ikl} a_l, i.e. v -> v x a
    cross_a << 0.0, a.z(), -a.y(), -a.z(), 0.0, a.x(), a.y(), -a.x(), 0.0;

    ScaledFieldSample out;
    out.log_scale = amp.log_abs + prof.log_scale;
    const double c = amp.sign;
    out.mantissa.velocity = c * prof.d1 * xa;
    out.mantissa.grad_velocity = c * (prof.A * xa * xhat.transpose() + prof.B * cross_a);
    out.mantissa.pressure = 0.0;
    out.mantissa.stress = cauchy_stress(out.mantissa.grad_velocity, 0.0, s.medium.mu);
    return out;
}

ScaledFieldSample probe_field_scaled(const ProbeSpec& probe, const SpectralParam& s, const Vec3& x)
{
    return probe_field_scaled(probe, s, x, radial_coefficient(probe, s));
}

FieldSample probe_field(const ProbeSpec& probe, const SpectralParam& s, const Vec3& x)
{
    return probe_field_scaled(probe, s, x).value();
}

OracleResult probe_field_oracle(const ProbeSpec& probe, const SpectralParam& s, const Vec3& x,
                                const OracleOptions& options)
{
    const Vec3 offset = x - probe.center;
    const double dist = offset.norm();
    const double lo = probe.kind == ProbeKind::exterior ? 0.0 : probe.r1;
    const double hi = probe.kind == ProbeKind::exterior ? probe.eta : probe.r2;
    if (dist >= lo && dist <= hi)
        throw Error(ErrorCode::wrong_region, "oracle point lies in the probe support");

    // Spherical coordinates about p with the polar axis through x.
    const Vec3 e3 = dist > 0.0 ? Vec3(offset / dist) : Vec3::UnitZ();
    const Vec3 helper = std::abs(e3.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = (helper - helper.dot(e3) * e3).normalized();
    const Vec3 e2 = e3.cross(e1);
    const double k = s.tau_tilde;

    const auto integrate = [&](int n) {
        const GaussRule& gl = gauss_legendre(n);
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        const double dphi = 2.0 * pi / options.azimuthal;
        double sum = 0.0;
        for (int ir = 0; ir < n; ++ir) {
            const double rho = mid + half * gl.nodes[ir];
            const double wr = half * gl.weights[ir] * rho * rho;
            for (int iu = 0; iu < n; ++iu) {
                const double u = gl.nodes[iu];
                const double st = std::sqrt(std::max(0.0, 1.0 - u * u));
                for (int ip = 0; ip < options.azimuthal; ++ip) {
                    const double phi = (ip + 0.5) * dphi;
                    const Vec3 y = probe.center +
                                   rho * (st * std::cos(phi) * e1 + st * std::sin(phi) * e2 +
                                          u * e3);
                    const double R = (x - y).norm();
                    sum += wr * gl.weights[iu] * dphi * std::exp(-k * R) / R * initial_data(probe, y);
                }
            }
        }
        return sum / (4.0 * pi * s.medium.mu);
    };

    OracleResult result;
    double previous = integrate(options.base_nodes);
    for (int level = 1; level <= options.max_levels; ++level) {
        const double current = integrate(options.base_nodes << level);
        const double change = std::abs(current - previous) / std::abs(current);
        result.levels = level;
        result.relative_change = change;
        result.potential = current * probe.direction;
        if (change <= options.tolerance)
            return result;
        previous = current;
    }
    throw Error(ErrorCode::oracle_not_converged, "oracle refinement ladder did not certify");
}

double flux_compatibility(const ProbeSpec& probe, const SpectralParam& s,
                          const SurfaceQuadrature& quadrature)
{
    const ScaledValue coefficient = radial_coefficient(probe, s);
    double flux = 0.0;
    for (std::size_t i = 0; i < quadrature.size(); ++i) {
        const FieldSample w = probe_field_scaled(probe, s, quadrature.nodes[i], coefficient).value();
        flux += quadrature.weights[i] * w.velocity.dot(quadrature.normals[i]);
    }
    return flux;
}

} // namespace enclosure
