// SPDX-License-Identifier: Apache-2.0
#include "enclosure/experiment.hpp"

#include "enclosure/error.hpp"

#include <cmath>
#include <sstream>

namespace enclosure {
namespace {

Scene reference_scene()
{
    return {{Vec3::Zero(), 1.0}, {Vec3(0.3, 0.0, 0.0), 0.2}, {1.0, 1.0}, 10.0};
}

std::string sci(double x)
{
    std::ostringstream o;
    o.precision(2);
    o << std::scientific << x;
    return o.str();
}

// Closed-form probe potential against direct quadrature at a few points of the domain.
SuiteResult probe_oracle_suite()
{
    const Scene scene = reference_scene();
    const Vec3 a(0.0, 0.6, 0.8);
    const ProbeSpec probes[] = {ProbeSpec::exterior(Vec3(2, 0, 0), 0.5, 4, a),
                                ProbeSpec::interior(Vec3::Zero(), 1.5, 2.0, 4, a)};
    const Vec3 points[] = {Vec3(0.5, 0.1, -0.2), Vec3(-0.3, 0.6, 0.2), Vec3(0.0, -0.4, 0.7)};
    double worst = 0.0;
    for (const ProbeSpec& p : probes)
        for (double tt : {1.0, 5.0}) {
            const SpectralParam s = SpectralParam::make(tt * tt, scene.medium);
            for (const Vec3& x : points) {
                const Vec3 oracle = probe_field_oracle(p, s, x).potential;
                worst = std::max(worst,
                                 (probe_potential(p, s, x) - oracle).norm() / oracle.norm());
            }
        }
    return {"probe-oracle", worst <= 1e-6, "max relative deviation " + sci(worst)};
}

// Fourth-order finite-difference residual of the resolvent Stokes system.
SuiteResult brinkmanlet_suite()
{
    const double h = 1e-4;
    double worst = 0.0, worst_div = 0.0;
    for (double lambda : {1.0, 5.0, 20.0}) {
        const Brinkmanlet b{Vec3(0.1, -0.2, 0.3), Vec3(0.3, -0.5, 0.8), lambda, 1.0};
        const auto u = [&](const Vec3& x) -> Vec3 { return brinkmanlet_eval(b, x).velocity; };
        const auto p = [&](const Vec3& x) { return brinkmanlet_eval(b, x).pressure; };
        for (const Vec3& d : {Vec3(0.4, 0.1, 0.2), Vec3(-0.2, 0.5, -0.6), Vec3(0.9, -0.7, 0.3)}) {
            const Vec3 x = b.source + d;
            Vec3 lap = Vec3::Zero(), gp;
            for (int k = 0; k < 3; ++k) {
                Vec3 e = Vec3::Zero();
                e[k] = h;
                lap += (-u(x + 2 * e) + 16 * u(x + e) - 30 * u(x) + 16 * u(x - e) - u(x - 2 * e)) /
                       (12 * h * h);
                gp[k] = (-p(x + 2 * e) + 8 * p(x + e) - 8 * p(x - e) + p(x - 2 * e)) / (12 * h);
            }
            const FieldSample f = brinkmanlet_eval(b, x);
            const double tau_rho = lambda * lambda * b.mu;
            worst = std::max(worst, (b.mu * lap - gp - tau_rho * f.velocity).norm() /
                                        (tau_rho * f.velocity.norm()));
            worst_div = std::max(worst_div, std::abs(f.divergence()) / f.grad_velocity.norm());
        }
    }
    return {"brinkmanlet", worst <= 1e-5 && worst_div <= 1e-7,
            "PDE residual " + sci(worst) + ", divergence " + sci(worst_div)};
}

// Green identity for the solved total field at tau = 25.
SuiteResult green_suite()
{
    const Scene scene = reference_scene();
    const SpectralParam s = SpectralParam::make(25.0, scene.medium);
    MfsOptions o;
    o.inner_sources = 150;
    o.outer_sources = 200;
    const MfsSystem system(scene, s, o);
    const QuadratureOptions q;
    double worst = 0.0;
    for (const ProbeSpec& p : {ProbeSpec::exterior(Vec3(2, 0, 0), 0.5, 4, Vec3::UnitZ()),
                               ProbeSpec::interior(Vec3::Zero(), 1.5, 2.0, 4, Vec3::UnitZ())}) {
        const MfsModel m = system.solve(p);
        const GreenCheck g = green_identity(scene, p, s, m, boundary_quadrature(scene, p, q),
                                            obstacle_surface_quadrature(scene, p, q));
        worst = std::max(worst, g.relative_mismatch);
    }
    return {"green", worst <= 1e-6, "relative mismatch " + sci(worst)};
}

} // namespace

std::vector<std::string> verify_suite_names()
{
    return {"probe-oracle", "brinkmanlet", "green"};
}

std::vector<SuiteResult> run_verify(const std::string& suite)
{
    std::vector<SuiteResult> out;
    const auto wanted = [&](const char* name) { return suite.empty() || suite == name; };
    if (wanted("probe-oracle"))
        out.push_back(probe_oracle_suite());
    if (wanted("brinkmanlet"))
        out.push_back(brinkmanlet_suite());
    if (wanted("green"))
        out.push_back(green_suite());
    if (out.empty())
        throw Error(ErrorCode::validation_error, "unknown suite '" + suite + "'");
    return out;
}

} // namespace enclosure
