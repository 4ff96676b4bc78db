// SPDX-License-Identifier: Apache-2.0
#include "enclosure/indicator.hpp"

#include "enclosure/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace enclosure {
namespace {

constexpr double ninf = -std::numeric_limits<double>::infinity();

double energy_density(const FieldSample& f, const SpectralParam& s)
{
    const double mu = s.medium.mu;
    return 2.0 * mu * f.strain_rate().squaredNorm() + s.tau * s.medium.rho * f.velocity.squaredNorm();
}

// Geometric panel count so that the smallest panel is at most width.
int panels_for(double length, double width, double ratio, bool both_ends)
{
    if (!(length > width))
        return both_ends ? 2 : 1;
    const double span = both_ends ? 0.5 * length : length;
    const int n = static_cast<int>(std::ceil(std::log1p(span * (ratio - 1.0) / width) / std::log(ratio)));
    return both_ends ? 2 * std::max(1, n) : std::max(1, n);
}

double softplus(double a) { return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a))); }

// Field of w00 + R at x, as a mantissa sharing exp(log_scale).
struct TotalField {
    FieldSample w00;
    FieldSample total;
    double w00_scale;
    double log_scale;
};

TotalField total_field(const ScaledFieldSample& w, const ScaledFieldSample& r)
{
    TotalField out;
    out.log_scale = std::max(w.log_scale, r.log_scale);
    const double a = std::exp(w.log_scale - out.log_scale);
    const double b = std::exp(r.log_scale - out.log_scale);
    out.w00 = w.mantissa;
    out.w00_scale = w.log_scale;
    out.total.velocity = a * w.mantissa.velocity + b * r.mantissa.velocity;
    out.total.grad_velocity = a * w.mantissa.grad_velocity + b * r.mantissa.grad_velocity;
    out.total.pressure = a * w.mantissa.pressure + b * r.mantissa.pressure;
    out.total.stress = a * w.mantissa.stress + b * r.mantissa.stress;
    return out;
}

double relative_gap(const ScaledValue& a, const ScaledValue& b)
{
    const double ref = std::max(a.log_abs, b.log_abs);
    if (!std::isfinite(ref))
        return 0.0;
    const double x = a.sign * std::exp(a.log_abs - ref);
    const double y = b.sign * std::exp(b.log_abs - ref);
    return std::abs(x - y) / std::max(std::abs(x), std::abs(y));
}

} // namespace

void LogSum::add(double mantissa, double log_scale)
{
    if (mantissa == 0.0 || log_scale == ninf)
        return;
    const double l = log_scale + std::log(std::abs(mantissa));
    const double m = mantissa > 0.0 ? 1.0 : -1.0;
    if (l > ref_) {
        const double shrink = std::exp(ref_ - l);
        sum_ *= shrink;
        abs_sum_ *= shrink;
        ref_ = l;
    }
    const double t = std::exp(l - ref_);
    sum_ += m * t;
    abs_sum_ += t;
}

ScaledValue LogSum::value() const
{
    if (sum_ == 0.0)
        return {};
    return {ref_ + std::log(std::abs(sum_)), sum_ > 0.0 ? 1 : -1};
}

double LogSum::log_abs_total() const { return abs_sum_ > 0.0 ? ref_ + std::log(abs_sum_) : ninf; }

Vec3 hot_direction(const Scene& scene, const ProbeSpec& probe)
{
    const Vec3 d = probe.kind == ProbeKind::exterior ? Vec3(probe.center - scene.obstacle.center)
                                                      : Vec3(scene.obstacle.center - probe.center);
    const double n = d.norm();
    return n > 1e-12 * scene.obstacle.radius ? Vec3(d / n) : Vec3::UnitX();
}

VolumeQuadrature obstacle_quadrature(const Scene& scene, const ProbeSpec& probe,
                                     const SpectralParam& s, const QuadratureOptions& q)
{
    VolumeRule rule;
    rule.radial = q.radial;
    rule.panel_ratio = q.panel_ratio;
    rule.cluster = VolumeRule::Cluster::outer;
    rule.radial_panels =
        panels_for(scene.obstacle.radius, q.layer_width / s.tau_tilde, q.panel_ratio, false);
    rule.polar = q.polar;
    rule.azimuthal = q.azimuthal;
    rule.axis = hot_direction(scene, probe);
    return region_quadrature(scene.obstacle, rule);
}

VolumeQuadrature exterior_quadrature(const Scene& scene, const ProbeSpec& probe,
                                     const SpectralParam& s, const QuadratureOptions& q)
{
    VolumeRule rule;
    rule.radial = q.radial;
    rule.panel_ratio = q.panel_ratio;
    rule.cluster = VolumeRule::Cluster::both;
    const double longest = scene.domain.radius +
                           (scene.domain.center - scene.obstacle.center).norm() -
                           scene.obstacle.radius;
    rule.radial_panels = panels_for(longest, q.layer_width / s.tau_tilde, q.panel_ratio, true);
    rule.polar = q.polar;
    rule.azimuthal = q.azimuthal;
    rule.axis = hot_direction(scene, probe);
    return region_quadrature(BallMinusBall{scene.domain, scene.obstacle}, rule);
}

SurfaceQuadrature boundary_quadrature(const Scene& scene, const ProbeSpec& probe,
                                      const QuadratureOptions& q)
{
    const Vec3 hot = hot_direction(scene, probe);
    Vec3 axis = scene.obstacle.center + scene.obstacle.radius * hot - scene.domain.center;
    if (axis.norm() < 1e-12 * scene.domain.radius)
        axis = hot;
    return sphere_product_quadrature(scene.domain, q.surface_polar, q.surface_azimuthal, axis);
}

SurfaceQuadrature obstacle_surface_quadrature(const Scene& scene, const ProbeSpec& probe,
                                              const QuadratureOptions& q)
{
    return sphere_product_quadrature(scene.obstacle, q.surface_polar, q.surface_azimuthal,
                                     hot_direction(scene, probe));
}

ScaledValue energy_J(const Scene& scene, const ProbeSpec& probe, const SpectralParam& s,
                     const VolumeQuadrature& quad_D)
{
    (void)scene;
    const ScaledValue coef = radial_coefficient(probe, s);
    LogSum sum;
    for (std::size_t i = 0; i < quad_D.size(); ++i) {
        const ScaledFieldSample w = probe_field_scaled(probe, s, quad_D.nodes[i], coef);
        sum.add(quad_D.weights[i] * energy_density(w.mantissa, s), 2.0 * w.log_scale);
    }
    return sum.value();
}

std::vector<ScaledValue> energy_E(const Scene& scene, const SpectralParam& s,
                                  const std::vector<const MfsModel*>& models,
                                  const VolumeQuadrature& quad_shell)
{
    (void)scene;
    std::vector<LogSum> sums(models.size());
    for (std::size_t i = 0; i < quad_shell.size(); ++i) {
        const auto fields = evaluate_models_scaled(models, quad_shell.nodes[i]);
        for (std::size_t m = 0; m < models.size(); ++m)
            sums[m].add(quad_shell.weights[i] * energy_density(fields[m].mantissa, s),
                        2.0 * fields[m].log_scale);
    }
    std::vector<ScaledValue> out;
    for (const LogSum& sum : sums)
        out.push_back(sum.value());
    return out;
}

ScaledValue energy_E(const Scene& scene, const SpectralParam& s, const MfsModel& model,
                     const VolumeQuadrature& quad_shell)
{
    return energy_E(scene, s, std::vector<const MfsModel*>{&model}, quad_shell).front();
}

BoundaryIndicator indicator_boundary(const Scene& scene, const ProbeSpec& probe,
                                     const SpectralParam& s, const MfsModel& model,
                                     const SurfaceQuadrature& quad_Omega,
                                     double max_cancellation_digits)
{
    (void)scene;
    const ScaledValue coef = radial_coefficient(probe, s);
    LogSum sum;
    for (std::size_t i = 0; i < quad_Omega.size(); ++i) {
        const Vec3& x = quad_Omega.nodes[i];
        const ScaledFieldSample r = evaluate_model_scaled(model, x);
        const ScaledFieldSample w = probe_field_scaled(probe, s, x, coef);
        const double t = (r.mantissa.stress * quad_Omega.normals[i]).dot(w.mantissa.velocity);
        sum.add(quad_Omega.weights[i] * t, r.log_scale + w.log_scale);
    }
    BoundaryIndicator out;
    out.value = sum.value();
    out.cancellation_digits = out.value.sign == 0
                                  ? std::numeric_limits<double>::infinity()
                                  : (sum.log_abs_total() - out.value.log_abs) / std::log(10.0);
    out.unreliable = !(out.cancellation_digits <= max_cancellation_digits);
    return out;
}

GreenCheck green_identity(const Scene& scene, const ProbeSpec& probe, const SpectralParam& s,
                          const MfsModel& model, const SurfaceQuadrature& quad_Omega,
                          const SurfaceQuadrature& quad_D)
{
    (void)scene;
    const ScaledValue coef = radial_coefficient(probe, s);
    LogSum outer;
    for (std::size_t i = 0; i < quad_Omega.size(); ++i) {
        const Vec3& x = quad_Omega.nodes[i];
        const Vec3& n = quad_Omega.normals[i];
        const TotalField f =
            total_field(probe_field_scaled(probe, s, x, coef), evaluate_model_scaled(model, x));
        const double t = (f.total.stress * n).dot(f.w00.velocity) -
                         (f.w00.stress * n).dot(f.total.velocity);
        outer.add(quad_Omega.weights[i] * t, f.log_scale + f.w00_scale);
    }
    LogSum inner;
    for (std::size_t i = 0; i < quad_D.size(); ++i) {
        const Vec3& x = quad_D.nodes[i];
        const TotalField f =
            total_field(probe_field_scaled(probe, s, x, coef), evaluate_model_scaled(model, x));
        const double t = (f.total.stress * quad_D.normals[i]).dot(f.w00.velocity);
        inner.add(quad_D.weights[i] * t, f.log_scale + f.w00_scale);
    }
    GreenCheck out;
    out.outer = outer.value();
    out.obstacle = inner.value();
    out.relative_mismatch = relative_gap(out.outer, out.obstacle);
    return out;
}

std::vector<IndicatorSample> sample_indicators(const Scene& scene,
                                               const std::vector<ProbeSpec>& probes, double tau,
                                               const IndicatorOptions& options)
{
    validate_scene(scene);
    for (const ProbeSpec& p : probes) {
        validate_probe(p, scene);
        dist_D_K(scene, p);
    }
    const SpectralParam s = SpectralParam::make(tau, scene.medium);
    const MfsSystem system(scene, s, options.mfs);
    std::vector<MfsModel> models;
    models.reserve(probes.size());
    for (const ProbeSpec& p : probes)
        models.push_back(system.solve(p));

    std::vector<IndicatorSample> out(probes.size());
    // probes sharing a hot direction share the exterior quadrature pass
    std::vector<bool> done(probes.size(), false);
    for (std::size_t k = 0; k < probes.size(); ++k) {
        if (done[k])
            continue;
        const Vec3 axis = hot_direction(scene, probes[k]);
        std::vector<std::size_t> group;
        for (std::size_t j = k; j < probes.size(); ++j)
            if (!done[j] && (hot_direction(scene, probes[j]) - axis).norm() < 1e-12) {
                group.push_back(j);
                done[j] = true;
            }
        std::vector<const MfsModel*> group_models;
        for (std::size_t j : group)
            group_models.push_back(&models[j]);
        const auto E = energy_E(scene, s, group_models,
                                exterior_quadrature(scene, probes[k], s, options.quadrature));
        for (std::size_t g = 0; g < group.size(); ++g)
            out[group[g]].E = E[g];
    }

    for (std::size_t k = 0; k < probes.size(); ++k) {
        IndicatorSample& sample = out[k];
        sample.tau = tau;
        sample.tau_tilde = s.tau_tilde;
        sample.J = energy_J(scene, probes[k], s, obstacle_quadrature(scene, probes[k], s,
                                                                     options.quadrature));
        LogSum total;
        total.add(sample.J.sign, sample.J.log_abs);
        total.add(sample.E.sign, sample.E.log_abs);
        sample.I_interior = total.value();
        sample.solver_residual = models[k].boundary_residual;
        sample.log_remainder_bound = std::log(options.remainder_constant) - tau * scene.horizon +
                                     softplus(0.5 * sample.J.log_abs);
        if (s.tau_tilde <= options.cancellation_cap) {
            const BoundaryIndicator b = indicator_boundary(
                scene, probes[k], s, models[k],
                boundary_quadrature(scene, probes[k], options.quadrature));
            sample.I_boundary = b.value.value();
            sample.cancellation_digits = b.cancellation_digits;
            sample.cancellation_flag = b.unreliable;
        } else {
            sample.cancellation_flag = true;
        }
    }
    return out;
}

IndicatorSample sample_indicator(const Scene& scene, const ProbeSpec& probe, double tau,
                                 const IndicatorOptions& options)
{
    return sample_indicators(scene, {probe}, tau, options).front();
}

} // namespace enclosure
