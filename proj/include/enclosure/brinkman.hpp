// SPDX-License-Identifier: Apache-2.0
//
// Fundamental solution of the resolvent Stokes (Brinkman) system
//   mu Lap u - grad p - tau rho u = -f delta,  div u = 0,
// and a method-of-fundamental-solutions solver for the reflected field.
#pragma once

#include "enclosure/geometry.hpp"
#include "enclosure/probe.hpp"

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <vector>

namespace enclosure {

struct Brinkmanlet {
    Vec3 source = Vec3::Zero();
    Vec3 strength = Vec3::UnitX();
    double lambda = 1.0; ///< sqrt(tau rho / mu)
    double mu = 1.0;
};

/// Velocity tensor G (u = G f), its derivatives dG[k] = d G / d x_k and the
/// pressure vector P (p = P . f) at offset r = x - source.
struct BrinkmanTensor {
    Mat3 G;
    std::array<Mat3, 3> dG;
    Vec3 P;
};

BrinkmanTensor brinkman_tensor(const Vec3& offset, double lambda, double mu);

FieldSample brinkmanlet_eval(const Brinkmanlet& b, const Vec3& x);

struct SourceSet {
    std::vector<Vec3> inner; ///< inside the obstacle
    std::vector<Vec3> outer; ///< outside the domain
};

SourceSet place_sources(const Scene& scene, int inner_count, int outer_count, double alpha = 0.4,
                        double beta = 1.6);

struct MfsOptions {
    int inner_sources = 300;
    int outer_sources = 800;
    double alpha = 0.4;
    double beta = 1.6;
    double collocation_ratio = 2.0;
    double truncation = 1e-12;
};

/// Collocation nodes on both boundaries: fitting nodes and held-out test nodes.
struct Collocation {
    SurfaceQuadrature obstacle;
    SurfaceQuadrature domain;
    SurfaceQuadrature obstacle_test;
    SurfaceQuadrature domain_test;
};

Collocation default_collocation(const Scene& scene, const MfsOptions& options);

/// Target velocities at the collocation nodes, all sharing exp(log_scale).
struct BoundaryData {
    std::vector<Vec3> obstacle;
    std::vector<Vec3> domain;
    std::vector<Vec3> obstacle_test;
    std::vector<Vec3> domain_test;
    double log_scale = 0.0;
};

/// Reflected field as a superposition of brinkmanlets. The physical field is
/// exp(log_scale) times the superposition with the stored coefficients.
struct MfsModel {
    double lambda = 1.0;
    double mu = 1.0;
    Ball domain;
    Ball obstacle;
    std::vector<Vec3> inner_sources;
    std::vector<Vec3> outer_sources;
    std::vector<Vec3> coefficients; ///< inner first, then outer
    double log_scale = 0.0;
    double boundary_residual = 0.0;
    int rank = 0;

    bool residual_too_large() const { return !(boundary_residual <= 1e-4); }
};

/// The collocation matrix at one tau, factored once and reusable for any
/// number of right-hand sides.
class MfsSystem {
public:
    MfsSystem(const Scene& scene, const SpectralParam& s, const MfsOptions& options = {});
    MfsSystem(const Scene& scene, const SpectralParam& s, const MfsOptions& options,
              Collocation collocation);
    ~MfsSystem();
    MfsSystem(MfsSystem&&) noexcept;
    MfsSystem& operator=(MfsSystem&&) noexcept;

    /// Fits R to the target values (mantissas with the shared log scale) at the
    /// fitting nodes; the residual is measured at the held-out nodes relative
    /// to max |target| on the obstacle.
    MfsModel solve(const BoundaryData& target) const;

    /// R = -w00 on the obstacle, R = 0 on the domain boundary.
    MfsModel solve(const ProbeSpec& probe) const;

    const Collocation& collocation() const { return collocation_; }
    const SpectralParam& spectral() const { return s_; }
    int rank() const;

private:
    struct Factor;
    Scene scene_;
    SpectralParam s_;
    MfsOptions options_;
    Collocation collocation_;
    SourceSet sources_;
    std::unique_ptr<Factor> factor_;
};

MfsModel solve_reflected(const Scene& scene, const ProbeSpec& probe, const SpectralParam& s,
                         const MfsOptions& options = {});

/// Samples w00 on a node set with one shared log scale (the largest one).
double probe_samples(const ProbeSpec& probe, const SpectralParam& s, const std::vector<Vec3>& nodes,
                     std::vector<Vec3>& velocity);

/// Field of the model at x in the closure of Omega minus D.
ScaledFieldSample evaluate_model_scaled(const MfsModel& model, const Vec3& x);
FieldSample evaluate_model(const MfsModel& model, const Vec3& x);

/// Several models sharing one source set, evaluated with one pass over the sources.
std::vector<ScaledFieldSample> evaluate_models_scaled(const std::vector<const MfsModel*>& models,
                                                      const Vec3& x);

} // namespace enclosure
