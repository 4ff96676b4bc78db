// SPDX-License-Identifier: Apache-2.0
#include "enclosure/error.hpp"
#include "enclosure/indicator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace enclosure;

namespace {

constexpr double pi = std::numbers::pi;

Scene reference_scene()
{
    return {{Vec3::Zero(), 1.0}, {Vec3(0.3, 0.0, 0.0), 0.2}, {1.0, 1.0}, 10.0};
}

const Vec3 a_dir(0.0, 0.6, 0.8);

ProbeSpec ext_probe(const Vec3& a = a_dir)
{
    return ProbeSpec::exterior(Vec3(2.0, 0.0, 0.0), 0.5, 4, a);
}

ProbeSpec int_probe(const Vec3& a = a_dir)
{
    return ProbeSpec::interior(Vec3::Zero(), 1.5, 2.0, 4, a);
}

double relative(const ScaledValue& x, const ScaledValue& y)
{
    return std::abs(std::expm1(x.log_abs - y.log_abs));
}

} // namespace

TEST(LogSum, AccumulatesAcrossExtremeScales)
{
    LogSum s;
    EXPECT_EQ(s.value().sign, 0);
    s.add(2.0, -1000.0);
    s.add(3.0, -1000.0 + std::log(2.0));
    EXPECT_EQ(s.value().sign, 1);
    EXPECT_NEAR(s.value().log_abs, -1000.0 + std::log(8.0), 1e-13);
    s.add(-1.0, -1200.0);
    EXPECT_NEAR(s.value().log_abs, -1000.0 + std::log(8.0), 1e-13);
    s.add(-16.0, -1000.0);
    EXPECT_EQ(s.value().sign, -1);
    EXPECT_NEAR(s.value().log_abs, -1000.0 + std::log(8.0), 1e-12);
    EXPECT_NEAR(s.log_abs_total(), -1000.0 + std::log(24.0), 1e-12);
}

TEST(LogSum, ExactCancellationGivesZero)
{
    LogSum s;
    s.add(1.5, 10.0);
    s.add(-1.5, 10.0);
    EXPECT_EQ(s.value().sign, 0);
    EXPECT_EQ(s.value().value(), 0.0);
}

TEST(Quadrature, WeightsIntegrateConstants)
{
    const Scene scene = reference_scene();
    const SpectralParam s = SpectralParam::make(400.0, scene.medium);
    const QuadratureOptions q;
    const double vD = 4.0 / 3.0 * pi * 0.008;
    const double vOmega = 4.0 / 3.0 * pi;
    for (const ProbeSpec& p : {ext_probe(), int_probe()}) {
        EXPECT_NEAR(obstacle_quadrature(scene, p, s, q).total_weight(), vD, 1e-12 * vD);
        EXPECT_NEAR(exterior_quadrature(scene, p, s, q).total_weight(), vOmega - vD, 1e-9);
        EXPECT_NEAR(boundary_quadrature(scene, p, q).total_weight(), 4.0 * pi, 1e-12);
        EXPECT_NEAR(obstacle_surface_quadrature(scene, p, q).total_weight(), 4.0 * pi * 0.04,
                    1e-12);
    }
    EXPECT_TRUE(hot_direction(scene, ext_probe()).isApprox(Vec3::UnitX(), 1e-15));
    EXPECT_TRUE(hot_direction(scene, int_probe()).isApprox(Vec3::UnitX(), 1e-15));
}

TEST(EnergyJ, PositiveAndEvenInDirection)
{
    const Scene scene = reference_scene();
    const QuadratureOptions q;
    for (double tau : {25.0, 400.0, 3200.0}) {
        const SpectralParam s = SpectralParam::make(tau, scene.medium);
        for (bool exterior : {true, false}) {
            const ProbeSpec p = exterior ? ext_probe() : int_probe();
            const ProbeSpec flipped = exterior ? ext_probe(-a_dir) : int_probe(-a_dir);
            const ScaledValue J = energy_J(scene, p, s, obstacle_quadrature(scene, p, s, q));
            const ScaledValue Jf =
                energy_J(scene, flipped, s, obstacle_quadrature(scene, flipped, s, q));
            EXPECT_EQ(J.sign, 1);
            EXPECT_NEAR(J.log_abs, Jf.log_abs, 1e-12 * std::abs(J.log_abs));
        }
    }
}

TEST(EnergyJ, ConvergedUnderRefinement)
{
    const Scene scene = reference_scene();
    QuadratureOptions fine;
    fine.radial = 20;
    fine.polar = 80;
    fine.azimuthal = 80;
    for (double tau : {25.0, 400.0, 3200.0}) {
        const SpectralParam s = SpectralParam::make(tau, scene.medium);
        for (const ProbeSpec& p : {ext_probe(), int_probe()}) {
            const ScaledValue J = energy_J(scene, p, s, obstacle_quadrature(scene, p, s, {}));
            const ScaledValue Jr = energy_J(scene, p, s, obstacle_quadrature(scene, p, s, fine));
            EXPECT_LE(relative(J, Jr), 1e-8) << tau;
        }
    }
}

TEST(Indicator, RejectsInadmissibleProbe)
{
    const Scene scene = reference_scene();
    const ProbeSpec touching = ProbeSpec::exterior(Vec3(1.05, 0.0, 0.0), 0.1, 4, a_dir);
    EXPECT_THROW(sample_indicator(scene, touching, 25.0), Error);
}

TEST(Indicator, BoundaryRouteSkippedBeyondCap)
{
    IndicatorOptions o;
    o.mfs.inner_sources = 60;
    o.mfs.outer_sources = 80;
    o.cancellation_cap = 4.0;
    const IndicatorSample s = sample_indicator(reference_scene(), ext_probe(), 25.0, o);
    EXPECT_FALSE(s.I_boundary.has_value());
    EXPECT_TRUE(s.cancellation_flag);
    EXPECT_EQ(s.I_interior.sign, 1);
}

class ReferenceScene : public ::testing::Test {
protected:
    static void SetUpTestSuite()
    {
        const Scene scene = reference_scene();
        samples_ = new std::vector<IndicatorSample>(
            sample_indicators(scene, {ext_probe(), int_probe()}, 25.0));
    }
    static void TearDownTestSuite()
    {
        delete samples_;
        samples_ = nullptr;
    }
    static std::vector<IndicatorSample>* samples_;
};

std::vector<IndicatorSample>* ReferenceScene::samples_ = nullptr;

TEST_F(ReferenceScene, EnergiesArePositive)
{
    for (const IndicatorSample& s : *samples_) {
        EXPECT_EQ(s.J.sign, 1);
        EXPECT_EQ(s.E.sign, 1);
        EXPECT_EQ(s.I_interior.sign, 1);
        EXPECT_NEAR(s.tau_tilde, 5.0, 1e-15);
    }
}

TEST_F(ReferenceScene, BoundaryRouteMatchesEnergyRoute)
{
    for (const IndicatorSample& s : *samples_) {
        ASSERT_TRUE(s.I_boundary.has_value());
        EXPECT_FALSE(s.cancellation_flag);
        EXPECT_LE(std::abs(*s.I_boundary / s.I_interior.value() - 1.0), 1e-3);
        EXPECT_LE(s.solver_residual, 1e-4);
    }
}

TEST_F(ReferenceScene, RemainderIsNegligible)
{
    for (const IndicatorSample& s : *samples_)
        EXPECT_LT(s.log_remainder_bound - s.I_interior.log_abs, std::log(1e-10));
}

TEST(Green, IdentityHoldsForSolvedField)
{
    const Scene scene = reference_scene();
    const SpectralParam s = SpectralParam::make(25.0, scene.medium);
    MfsOptions o;
    o.inner_sources = 150;
    o.outer_sources = 200;
    const MfsSystem system(scene, s, o);
    const QuadratureOptions q;
    for (const ProbeSpec& p : {ext_probe(), int_probe()}) {
        const MfsModel m = system.solve(p);
        const GreenCheck g = green_identity(scene, p, s, m, boundary_quadrature(scene, p, q),
                                            obstacle_surface_quadrature(scene, p, q));
        EXPECT_LE(g.relative_mismatch, 1e-6);
        EXPECT_NE(g.outer.sign, 0);
    }
}
