// SPDX-License-Identifier: Apache-2.0
//
// Ball-in-ball scenes, analytic distance quantities and the surface/volume
// quadrature rules shared by the rest of the library.
#pragma once

#include <Eigen/Dense>

#include <variant>
#include <vector>

namespace enclosure {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct ProbeSpec;

struct Medium {
    double rho = 1.0; ///< mass density
    double mu = 1.0;  ///< viscosity
};

struct Ball {
    Vec3 center = Vec3::Zero();
    double radius = 1.0;
};

/// Fluid domain Omega (a ball) containing the obstacle D (a ball) over [0, T].
struct Scene {
    Ball domain;
    Ball obstacle;
    Medium medium;
    double horizon = 1.0;
};

/// Returns the scene unchanged or throws Error naming the violated invariant.
Scene validate_scene(const Scene& scene);

struct SphereDistances {
    double distance; ///< d_D(z) = dist({z}, D)
    double farthest; ///< R_D(z) = sup_{x in D} |x - z|
};

SphereDistances d_and_R(const Ball& obstacle, const Vec3& z);

/// dist(D, K) for the probe support K; throws probe_touches_obstacle when <= 0.
double dist_D_K(const Scene& scene, const ProbeSpec& probe);

struct SurfaceQuadrature {
    std::vector<Vec3> nodes;
    std::vector<Vec3> normals; ///< unit outward normals
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
    double total_weight() const;
};

/// Equal-weight spherical Fibonacci lattice (antipodally paired); node_count >= 50.
SurfaceQuadrature sphere_quadrature(const Ball& ball, int node_count);

/// Gauss-Legendre in cos(theta) times the periodic trapezoid rule in phi,
/// with the polar axis along `axis`.
SurfaceQuadrature sphere_product_quadrature(const Ball& ball, int polar, int azimuthal,
                                            const Vec3& axis = Vec3::UnitZ());

struct VolumeQuadrature {
    std::vector<Vec3> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
    double total_weight() const;
};

struct Shell {
    Vec3 center = Vec3::Zero();
    double inner_radius = 1.0;
    double outer_radius = 2.0;
};

/// outer \ closure(removed); spherical coordinates are centered on the removed ball.
struct BallMinusBall {
    Ball outer;
    Ball removed;
};

using Region = std::variant<Ball, Shell, BallMinusBall>;

double region_volume(const Region& region);

/// Tensor rule in (radius, cos(theta), phi). The radial interval is split into
/// geometrically graded Gauss-Legendre panels clustered at one end.
struct VolumeRule {
    enum class Cluster { none, inner, outer, both };

    int radial = 16;    ///< nodes per radial panel
    int radial_panels = 1;
    double panel_ratio = 1.0; ///< width growth away from the clustered end
    Cluster cluster = Cluster::none;
    int polar = 16;
    int azimuthal = 16;
    Vec3 axis = Vec3::UnitZ();
};

VolumeQuadrature region_quadrature(const Region& region, const VolumeRule& rule);

/// Convenience form: splits node_count evenly over the three directions.
VolumeQuadrature region_quadrature(const Region& region, int node_count);

} // namespace enclosure
