// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "uavss/analysis.hpp"
#include "uavss/quadrature.hpp"

using namespace uavss;

namespace
{
// (1 + r^2 + z^2)^-2: radial integral 1 / (2 (1 + z^2)), slab [0,1] -> pi/8.
double rational(double r, double z)
{
    double q = 1 + r * r + z * z;
    return 1 / (q * q);
}
TailEnvelope const rational_envelope{1.0, 4.0};
}  // namespace

TEST(GaussKronrod, OneDimensional)
{
    std::vector<double> edges{0, std::numbers::pi};
    auto res = integrate_panels([](double x) { return std::sin(x); }, edges,
                                1e-12, 1e-15, 100);
    EXPECT_TRUE(res.converged);
    EXPECT_NEAR(res.value, 2.0, 1e-13);
    EXPECT_LE(res.est_error, 1e-11);
}

TEST(IntegrateSlab, ZeroIntegrand)
{
    auto res = integrate_slab([](double, double) { return 0.0; },
                              AirspaceSlab{0, 1}, {}, TailEnvelope{1, 3});
    EXPECT_EQ(res.value, 0.0);
    EXPECT_TRUE(res.converged);
}

TEST(IntegrateSlab, GaussianRadialProfile)
{
    // int_0^inf exp(-r^2) r dr = 1/2 over a unit-thick slab.
    // exp(-r^2) <= r^-4 everywhere since r^4 exp(-r^2) <= 4 / e^2.
    auto f = [](double r, double) { return std::exp(-r * r); };
    auto res = integrate_slab(f, AirspaceSlab{0, 1}, {}, TailEnvelope{1, 4});
    EXPECT_TRUE(res.converged);
    EXPECT_NEAR(res.value, 0.5, 1e-8);

    QuadratureConfig fixed;
    fixed.r_truncation_policy = TruncationPolicy::fixed_radius;
    fixed.r_max = 12;
    auto res2 = integrate_slab(f, AirspaceSlab{0, 1}, fixed, std::nullopt);
    EXPECT_NEAR(res2.value, 0.5, 1e-8);
}

TEST(IntegrateSlab, EmptySlabIsExactlyZero)
{
    auto res = integrate_slab(rational, AirspaceSlab{5, 0}, {},
                              rational_envelope);
    EXPECT_EQ(res.value, 0.0);
    EXPECT_EQ(res.est_error, 0.0);
    EXPECT_TRUE(res.converged);
}

TEST(IntegrateSlab, TailBoundNeedsEnvelope)
{
    EXPECT_THROW(integrate_slab(rational, AirspaceSlab{0, 1}, {}, std::nullopt),
                 InvalidParameter);
}

TEST(IntegrateSlab, ErrorTracksTolerance)
{
    double const exact = std::numbers::pi / 8;
    double prev_err = 1;
    for (double tol : {1e-4, 1e-6, 1e-8, 1e-10})
    {
        QuadratureConfig cfg;
        cfg.rel_tol = tol;
        auto res = integrate_slab(rational, AirspaceSlab{0, 1}, cfg,
                                  rational_envelope);
        double err = std::abs(res.value - exact);
        EXPECT_TRUE(res.converged) << tol;
        EXPECT_LE(err, tol * exact) << tol;
        EXPECT_LE(err, res.est_error + 1e-15) << tol;
        EXPECT_LE(err, prev_err + 1e-16);
        prev_err = err;
    }
}

TEST(IntegrateSlab, AdditiveOverSubSlabs)
{
    SystemParams p;
    LosEnvironment env;
    KernelIntegrand f{ground_kernel_coefficient(p), p.alpha_u, LinkState::los,
                      env};
    auto whole = integrate_slab(f, AirspaceSlab{10, 60}, {}, f.envelope());
    auto lower = integrate_slab(f, AirspaceSlab{10, 25}, {}, f.envelope());
    auto upper = integrate_slab(f, AirspaceSlab{35, 35}, {}, f.envelope());
    double tol = 2 * (whole.est_error + lower.est_error + upper.est_error);
    EXPECT_NEAR(whole.value, lower.value + upper.value, tol);
}

TEST(IntegrateSlab, MonotoneInIntegrand)
{
    SystemParams p;
    LosEnvironment env;
    double s = uav_kernel_coefficient(p);
    KernelIntegrand small{s, p.alpha_u, LinkState::nlos, env};
    KernelIntegrand large{2 * s, p.alpha_u, LinkState::nlos, env};
    AirspaceSlab slab{0, 40};
    auto a = integrate_slab(small, slab, {}, small.envelope());
    auto b = integrate_slab(large, slab, {}, large.envelope());
    EXPECT_LT(a.value, b.value);
}

TEST(IntegrateSlab, Deterministic)
{
    SystemParams p;
    LosEnvironment env;
    KernelIntegrand f{ground_kernel_coefficient(p), p.alpha_u, LinkState::nlos,
                      env};
    auto a = integrate_slab(f, AirspaceSlab{3, 17}, {}, f.envelope());
    auto b = integrate_slab(f, AirspaceSlab{3, 17}, {}, f.envelope());
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.est_error, b.est_error);
    EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(IntegrateSlab, ReportsNonConvergence)
{
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-14;
    cfg.max_subdivisions = 1;
    auto wiggly = [](double r, double z) {
        return std::exp(-r * r) * (1 + std::sin(40 * r) * std::cos(25 * z));
    };
    auto res = integrate_slab(wiggly, AirspaceSlab{0, 1}, cfg,
                              TailEnvelope{2, 4});
    EXPECT_FALSE(res.converged);
}

TEST(TailBound, ClosedFormRadii)
{
    EXPECT_NEAR(tail_bound_radius({1, 3}, 1e-12), 1e12, 1e12 * 1e-12);
    for (double k : {1e-3, 1.0, 5e4})
    {
        for (double t : {1e-3, 1e-9})
        {
            EXPECT_NEAR(tail_bound_radius({k, 4}, t), std::sqrt(k / (2 * t)),
                        1e-12 * std::sqrt(k / (2 * t)));
        }
    }
    double r = tail_bound_radius({7, 3.5}, 1e-6);
    EXPECT_NEAR(tail_bound({7, 3.5}, r), 1e-6, 1e-12);
}

TEST(TailBound, NoFiniteRadiusForSlowDecay)
{
    EXPECT_THROW(tail_bound_radius({1, 2}, 1e-6), DivergenceError);
    EXPECT_THROW(tail_bound_radius({1, 1.5}, 1e-6), DivergenceError);
}

TEST(TailBound, KernelEnvelopeShrinksWithTolerance)
{
    SystemParams p;
    LosEnvironment env;
    KernelIntegrand h2{ground_kernel_coefficient(p), p.alpha_u,
                       LinkState::nlos, env};
    double prev = 0;
    for (double tol = 1e-2; tol > 1e-14; tol /= 2)
    {
        double r = tail_bound_radius(h2.envelope(), tol);
        EXPECT_TRUE(std::isfinite(r));
        EXPECT_GT(r, prev);
        prev = r;
    }
}
