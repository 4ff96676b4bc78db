// SPDX-License-Identifier: Apache-2.0
#include "enclosure/geometry.hpp"

#include "enclosure/error.hpp"
#include "enclosure/gauss_legendre.hpp"
#include "enclosure/probe.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

namespace enclosure {
namespace {

constexpr double pi = std::numbers::pi;

// Orthonormal frame (e1, e2, axis) with the given axis as third vector.
std::array<Vec3, 3> frame_for(const Vec3& axis)
{
    const Vec3 e3 = axis.normalized();
    const Vec3 helper = std::abs(e3.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = (helper - helper.dot(e3) * e3).normalized();
    const Vec3 e2 = e3.cross(e1);
    return {e1, e2, e3};
}

// Composite Gauss-Legendre nodes on [a, b] with geometric panels growing away
// from the clustered end.
void radial_rule(double a, double b, const VolumeRule& rule, std::vector<double>& nodes,
                 std::vector<double>& weights)
{
    nodes.clear();
    weights.clear();
    const int panels = std::max(1, rule.radial_panels);
    const double q = (rule.panel_ratio > 0.0 && rule.cluster != VolumeRule::Cluster::none)
                         ? rule.panel_ratio
                         : 1.0;
    // Panel widths in units of the smallest one; Cluster::both mirrors the
    // sequence so both ends get the smallest panel.
    std::vector<double> widths;
    if (rule.cluster == VolumeRule::Cluster::both) {
        const int half = (panels + 1) / 2;
        for (int k = 0; k < half; ++k)
            widths.push_back(std::pow(q, k));
        for (int k = panels - half - 1; k >= 0; --k)
            widths.push_back(std::pow(q, k));
    } else {
        for (int k = 0; k < panels; ++k)
            widths.push_back(std::pow(q, k));
        if (rule.cluster == VolumeRule::Cluster::outer)
            std::reverse(widths.begin(), widths.end());
    }
    const double total = std::accumulate(widths.begin(), widths.end(), 0.0);
    std::vector<double> breaks{a};
    for (double w : widths)
        breaks.push_back(breaks.back() + (b - a) * w / total);
    breaks.back() = b;
    const GaussRule& gl = gauss_legendre(rule.radial);
    for (int k = 0; k < panels; ++k) {
        const double half = 0.5 * (breaks[k + 1] - breaks[k]);
        const double mid = 0.5 * (breaks[k + 1] + breaks[k]);
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            nodes.push_back(mid + half * gl.nodes[i]);
            weights.push_back(half * gl.weights[i]);
        }
    }
}

// Distance from `from` (inside the ball) to the ball surface along unit `dir`.
double exit_distance(const Ball& ball, const Vec3& from, const Vec3& dir)
{
    const Vec3 d = from - ball.center;
    const double b = dir.dot(d);
    const double c = d.squaredNorm() - ball.radius * ball.radius;
    return -b + std::sqrt(b * b - c);
}

struct RadialSpan {
    Vec3 center;
    double inner;
    const Ball* outer_ball; // non-null: variable outer limit
    double outer;
};

VolumeQuadrature tensor_rule(const RadialSpan& span, const VolumeRule& rule)
{
    if (rule.polar < 1 || rule.azimuthal < 1 || rule.radial < 1)
        throw Error(ErrorCode::malformed_region, "volume rule needs positive node counts");
    const auto [e1, e2, e3] = frame_for(rule.axis);
    const GaussRule& polar = gauss_legendre(rule.polar);
    VolumeQuadrature q;
    std::vector<double> rn, rw;
    const double dphi = 2.0 * pi / rule.azimuthal;
    for (std::size_t iu = 0; iu < polar.nodes.size(); ++iu) {
        const double u = polar.nodes[iu];
        const double st = std::sqrt(std::max(0.0, 1.0 - u * u));
        for (int ip = 0; ip < rule.azimuthal; ++ip) {
            const double phi = (ip + 0.5) * dphi;
            const Vec3 dir = st * std::cos(phi) * e1 + st * std::sin(phi) * e2 + u * e3;
            const double outer =
                span.outer_ball ? exit_distance(*span.outer_ball, span.center, dir) : span.outer;
            radial_rule(span.inner, outer, rule, rn, rw);
            for (std::size_t ir = 0; ir < rn.size(); ++ir) {
                q.nodes.push_back(span.center + rn[ir] * dir);
                q.weights.push_back(rw[ir] * rn[ir] * rn[ir] * polar.weights[iu] * dphi);
            }
        }
    }
    return q;
}

} // namespace

Scene validate_scene(const Scene& scene)
{
    if (!(scene.domain.radius > 0.0) || !(scene.obstacle.radius > 0.0))
        throw Error(ErrorCode::nonpositive_radius, "domain and obstacle radii must be positive");
    if (!(scene.medium.rho > 0.0) || !(scene.medium.mu > 0.0))
        throw Error(ErrorCode::nonpositive_material, "rho and mu must be positive");
    if (!(scene.horizon > 0.0))
        throw Error(ErrorCode::nonpositive_material, "horizon T must be positive");
    const double reach =
        (scene.obstacle.center - scene.domain.center).norm() + scene.obstacle.radius;
    if (!(reach < scene.domain.radius))
        throw Error(ErrorCode::obstacle_not_interior,
                    "closure of the obstacle must lie strictly inside the domain");
    return scene;
}

SphereDistances d_and_R(const Ball& obstacle, const Vec3& z)
{
    const double r = (z - obstacle.center).norm();
    return {std::max(r - obstacle.radius, 0.0), r + obstacle.radius};
}

double dist_D_K(const Scene& scene, const ProbeSpec& probe)
{
    const SphereDistances dr = d_and_R(scene.obstacle, probe.center);
    const double dist =
        probe.kind == ProbeKind::exterior ? dr.distance - probe.eta : probe.r1 - dr.farthest;
    if (!(dist > 0.0))
        throw Error(ErrorCode::probe_touches_obstacle, "probe support reaches the obstacle");
    return dist;
}

double SurfaceQuadrature::total_weight() const
{
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double VolumeQuadrature::total_weight() const
{
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

SurfaceQuadrature sphere_quadrature(const Ball& ball, int node_count)
{
    if (node_count < 50)
        throw Error(ErrorCode::too_few_nodes, "sphere quadrature needs at least 50 nodes");
    const double golden_angle = pi * (3.0 - std::sqrt(5.0));
    const int n = node_count;
    SurfaceQuadrature q;
    q.nodes.reserve(n);
    q.normals.reserve(n);
    std::vector<Vec3> dirs(n);
    // Upper half from the Fibonacci spiral, lower half as antipodes so odd
    // moments vanish exactly.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / n;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden_angle * i;
        dirs[i] = Vec3(rho * std::cos(phi), rho * std::sin(phi), z);
        if (n - 1 - i != i)
            dirs[n - 1 - i] = -dirs[i];
    }
    const double w = 4.0 * pi * ball.radius * ball.radius / n;
    for (const Vec3& d : dirs) {
        q.normals.push_back(d);
        q.nodes.push_back(ball.center + ball.radius * d);
    }
    q.weights.assign(n, w);
    return q;
}

SurfaceQuadrature sphere_product_quadrature(const Ball& ball, int polar, int azimuthal,
                                            const Vec3& axis)
{
    if (polar * azimuthal < 50)
        throw Error(ErrorCode::too_few_nodes, "sphere quadrature needs at least 50 nodes");
    const auto [e1, e2, e3] = frame_for(axis);
    const GaussRule& gl = gauss_legendre(polar);
    const double dphi = 2.0 * pi / azimuthal;
    const double r2 = ball.radius * ball.radius;
    SurfaceQuadrature q;
    for (int iu = 0; iu < polar; ++iu) {
        const double u = gl.nodes[iu];
        const double st = std::sqrt(std::max(0.0, 1.0 - u * u));
        for (int ip = 0; ip < azimuthal; ++ip) {
            const double phi = (ip + 0.5) * dphi;
            const Vec3 d = st * std::cos(phi) * e1 + st * std::sin(phi) * e2 + u * e3;
            q.normals.push_back(d);
            q.nodes.push_back(ball.center + ball.radius * d);
            q.weights.push_back(r2 * gl.weights[iu] * dphi);
        }
    }
    return q;
}

double region_volume(const Region& region)
{
    const auto ball_volume = [](double r) { return 4.0 / 3.0 * pi * r * r * r; };
    return std::visit(
        [&](const auto& reg) -> double {
            using T = std::decay_t<decltype(reg)>;
            if constexpr (std::is_same_v<T, Ball>)
                return ball_volume(reg.radius);
            else if constexpr (std::is_same_v<T, Shell>)
                return ball_volume(reg.outer_radius) - ball_volume(reg.inner_radius);
            else
                return ball_volume(reg.outer.radius) - ball_volume(reg.removed.radius);
        },
        region);
}

VolumeQuadrature region_quadrature(const Region& region, const VolumeRule& rule)
{
    return std::visit(
        [&](const auto& reg) -> VolumeQuadrature {
            using T = std::decay_t<decltype(reg)>;
            if constexpr (std::is_same_v<T, Ball>) {
                if (!(reg.radius > 0.0))
                    throw Error(ErrorCode::malformed_region, "ball radius must be positive");
                return tensor_rule({reg.center, 0.0, nullptr, reg.radius}, rule);
            } else if constexpr (std::is_same_v<T, Shell>) {
                if (!(reg.inner_radius > 0.0) || !(reg.outer_radius > reg.inner_radius))
                    throw Error(ErrorCode::malformed_region, "shell needs 0 < inner < outer");
                return tensor_rule({reg.center, reg.inner_radius, nullptr, reg.outer_radius},
                                   rule);
            } else {
                const double reach =
                    (reg.removed.center - reg.outer.center).norm() + reg.removed.radius;
                if (!(reg.removed.radius > 0.0) || !(reach < reg.outer.radius))
                    throw Error(ErrorCode::malformed_region,
                                "removed ball must lie strictly inside the outer ball");
                return tensor_rule({reg.removed.center, reg.removed.radius, &reg.outer, 0.0},
                                   rule);
            }
        },
        region);
}

VolumeQuadrature region_quadrature(const Region& region, int node_count)
{
    const int per_axis = std::max(2, static_cast<int>(std::cbrt(static_cast<double>(node_count))));
    VolumeRule rule;
    rule.radial = per_axis;
    rule.polar = per_axis;
    rule.azimuthal = per_axis;
    return region_quadrature(region, rule);
}

} // namespace enclosure
