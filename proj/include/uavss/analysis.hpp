// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "channel.hpp"
#include "error.hpp"
#include "params.hpp"
#include "quadrature.hpp"

namespace uavss
{

/// Propagation state that weights a UAV interferer in the kernels.
enum class LinkState
{
    los,
    nlos
};

struct GroundCoverageBreakdown
{
    double laplace_ground = 1;
    double laplace_uav_los = 1;
    double laplace_uav_nlos = 1;
    double noise_factor = 1;
    double p1 = 1;
    // Kernel values behind the two UAV factors.
    double h1_kernel = 0;
    double h2_kernel = 0;
};

struct UavCoverageBreakdown
{
    double p_los_serving = 1;
    double laplace_los_branch = 1;
    double laplace_nlos_branch = 1;
    double p2 = 1;
    // Kernels at the LoS-branch argument (beta_u x0^alpha_u) ...
    double h3_kernel = 0;
    double h4_kernel = 0;
    // ... and at the NLoS-branch argument, which carries an extra 1/eta.
    double h3_kernel_nlos_branch = 0;
    double h4_kernel_nlos_branch = 0;
};

//---------------------------------------------------------------------------//
// GROUND INTERFERENCE
//---------------------------------------------------------------------------//

/*!
 * Laplace transform of the ground-network interference at the ground user's
 * success argument, in closed form for Rayleigh fading:
 *
 *   exp(-2 lambda pi^2 beta^(2/alpha) d0^2 / (alpha sin(2 pi / alpha)))
 */
inline double laplace_ground_interference(SystemParams const& p)
{
    if (!(p.alpha_d > 2))
    {
        throw DivergenceError(
            "ground interference transform diverges for alpha_d <= 2");
    }
    double const pi = std::numbers::pi;
    double lambda = p.lambda_d_effective();
    double exponent = 2 * lambda * pi * pi * std::pow(p.beta_d, 2 / p.alpha_d)
                      * p.d0 * p.d0
                      / (p.alpha_d * std::sin(2 * pi / p.alpha_d));
    return std::exp(-exponent);
}

inline double ground_noise_factor(SystemParams const& p)
{
    return std::exp(-p.beta_d * std::pow(p.d0, p.alpha_d) * p.noise / p.p_d);
}

//---------------------------------------------------------------------------//
// UAV INTERFERENCE KERNELS
//---------------------------------------------------------------------------//

/*!
 * Integrand 1 - 1/(1 + s w(theta) x^-alpha) of the UAV interference kernels.
 *
 * `coefficient` is s times the interferer's transmit-power factor, so the
 * mean normalized power at distance x is coefficient * x^-alpha. The weight
 * w is P_LoS(theta) for the LoS component and eta (1 - P_LoS(theta)) for the
 * NLoS one, with theta the elevation of the interferer seen from the user.
 */
struct KernelIntegrand
{
    double coefficient;
    double alpha;
    LinkState state;
    LosEnvironment env;

    double operator()(double r, double z) const noexcept
    {
        double theta = rad_to_deg * std::atan2(z, r);
        double pl = p_los(theta, env);
        double weight = state == LinkState::los ? pl : env.eta * (1 - pl);
        double u = coefficient * weight * std::pow(r * r + z * z, -0.5 * alpha);
        return u / (1 + u);
    }

    TailEnvelope envelope() const noexcept
    {
        double wmax = state == LinkState::los ? 1.0 : env.eta;
        return {coefficient * wmax, alpha};
    }
};

/// Kernel value  int_{h1}^{h2} int_0^inf integrand * r dr dz.
inline QuadratureResult interference_kernel(double coefficient,
                                            LinkState state,
                                            SystemParams const& p,
                                            AirspaceSlab const& slab,
                                            LosEnvironment const& env,
                                            QuadratureConfig const& cfg = {})
{
    if (coefficient == 0 || slab.delta_h == 0)
    {
        return {};
    }
    KernelIntegrand f{coefficient, p.alpha_u, state, env};
    return integrate_slab(f, slab, cfg, f.envelope());
}

/// Radial-only kernel for a planar UAV layer at height h1.
inline QuadratureResult interference_kernel_planar(double coefficient,
                                                   LinkState state,
                                                   SystemParams const& p,
                                                   AirspaceSlab const& slab,
                                                   LosEnvironment const& env,
                                                   QuadratureConfig const& cfg
                                                   = {})
{
    if (coefficient == 0)
    {
        return {};
    }
    KernelIntegrand f{coefficient, p.alpha_u, state, env};
    return integrate_radial(f, slab.h1, cfg, f.envelope());
}

/// Coefficient of the ground user's kernels: beta_d d0^alpha_d P_u / P_d.
inline double ground_kernel_coefficient(SystemParams const& p)
{
    return p.beta_d * std::pow(p.d0, p.alpha_d) * p.p_u / p.p_d;
}

/// Coefficient of the UAV user's kernels at the LoS-branch argument.
inline double uav_kernel_coefficient(SystemParams const& p)
{
    return p.beta_u * std::pow(p.x0, p.alpha_u);
}

inline QuadratureResult kernel_h1(SystemParams const& p,
                                  AirspaceSlab const& slab,
                                  LosEnvironment const& env,
                                  QuadratureConfig const& cfg = {})
{
    return interference_kernel(ground_kernel_coefficient(p), LinkState::los,
                               p, slab, env, cfg);
}

inline QuadratureResult kernel_h2(SystemParams const& p,
                                  AirspaceSlab const& slab,
                                  LosEnvironment const& env,
                                  QuadratureConfig const& cfg = {})
{
    return interference_kernel(ground_kernel_coefficient(p), LinkState::nlos,
                               p, slab, env, cfg);
}

/// `branch_scale` multiplies the argument; the NLoS branch uses 1/eta.
inline QuadratureResult kernel_h3(SystemParams const& p,
                                  AirspaceSlab const& slab,
                                  LosEnvironment const& env,
                                  QuadratureConfig const& cfg = {},
                                  double branch_scale = 1.0)
{
    return interference_kernel(branch_scale * uav_kernel_coefficient(p),
                               LinkState::los, p, slab, env, cfg);
}

inline QuadratureResult kernel_h4(SystemParams const& p,
                                  AirspaceSlab const& slab,
                                  LosEnvironment const& env,
                                  QuadratureConfig const& cfg = {},
                                  double branch_scale = 1.0)
{
    return interference_kernel(branch_scale * uav_kernel_coefficient(p),
                               LinkState::nlos, p, slab, env, cfg);
}

namespace detail
{
inline double checked(QuadratureResult const& r, char const* what)
{
    if (!r.converged)
    {
        throw ConvergenceError(std::string(what)
                               + " kernel did not reach its tolerance");
    }
    return r.value;
}

/// Kernel value and the factor multiplying it in the Laplace exponent.
struct ScaledKernel
{
    double kernel;
    double exponent;
};

inline ScaledKernel uav_exponent(double coefficient,
                                 LinkState state,
                                 SystemParams const& p,
                                 AirspaceSlab const& slab,
                                 LosEnvironment const& env,
                                 QuadratureConfig const& cfg,
                                 char const* name)
{
    double const two_pi = 2 * std::numbers::pi;
    if (uav_field_is_planar(p, slab))
    {
        double k = checked(
            interference_kernel_planar(coefficient, state, p, slab, env, cfg),
            name);
        return {k, two_pi * uav_areal_density(p, slab) * k};
    }
    double k = checked(
        interference_kernel(coefficient, state, p, slab, env, cfg), name);
    double lambda = slab.delta_h > 0 ? uav_volume_density(p, slab) : 0.0;
    return {k, two_pi * lambda * k};
}
}  // namespace detail

//---------------------------------------------------------------------------//
// COVERAGE
//---------------------------------------------------------------------------//

/*!
 * Coverage probability of the typical ground user and its four factors:
 * ground interference, LoS and NLoS UAV interference, and noise.
 */
inline GroundCoverageBreakdown coverage_ground(SystemParams const& p,
                                               AirspaceSlab const& slab,
                                               LosEnvironment const& env,
                                               QuadratureConfig const& cfg
                                               = {})
{
    validate(p);
    validate(slab);
    validate(env);

    GroundCoverageBreakdown out;
    out.laplace_ground = laplace_ground_interference(p);
    out.noise_factor = ground_noise_factor(p);

    double coef = ground_kernel_coefficient(p);
    auto los = detail::uav_exponent(coef, LinkState::los, p, slab, env, cfg,
                                    "H1");
    auto nlos = detail::uav_exponent(coef, LinkState::nlos, p, slab, env, cfg,
                                     "H2");
    out.h1_kernel = los.kernel;
    out.h2_kernel = nlos.kernel;
    out.laplace_uav_los = std::exp(-los.exponent);
    out.laplace_uav_nlos = std::exp(-nlos.exponent);
    out.p1 = out.laplace_ground * out.laplace_uav_los * out.laplace_uav_nlos
             * out.noise_factor;
    return out;
}

/*!
 * Coverage probability of the typical UAV-network user.
 *
 * The serving link is LoS with the probability of its elevation; each branch
 * evaluates the full LoS + NLoS interference field at that branch's argument,
 * the NLoS one scaled by 1/eta. Noise is left out unless
 * `SystemParams::p2_include_noise` is set.
 */
inline UavCoverageBreakdown coverage_uav(SystemParams const& p,
                                         AirspaceSlab const& slab,
                                         LosEnvironment const& env,
                                         ServingLinkGeometry const& geom,
                                         QuadratureConfig const& cfg = {})
{
    validate(p);
    validate(slab);
    validate(env);
    validate(geom, slab);

    UavCoverageBreakdown out;
    out.p_los_serving = serving_p_los(p, slab, env, geom);

    double coef = uav_kernel_coefficient(p);
    auto l3 = detail::uav_exponent(coef, LinkState::los, p, slab, env, cfg,
                                   "H3");
    auto l4 = detail::uav_exponent(coef, LinkState::nlos, p, slab, env, cfg,
                                   "H4");
    auto n3 = detail::uav_exponent(coef / env.eta, LinkState::los, p, slab,
                                   env, cfg, "H3");
    auto n4 = detail::uav_exponent(coef / env.eta, LinkState::nlos, p, slab,
                                   env, cfg, "H4");
    out.h3_kernel = l3.kernel;
    out.h4_kernel = l4.kernel;
    out.h3_kernel_nlos_branch = n3.kernel;
    out.h4_kernel_nlos_branch = n4.kernel;

    out.laplace_los_branch = std::exp(-(l3.exponent + l4.exponent));
    out.laplace_nlos_branch = std::exp(-(n3.exponent + n4.exponent));
    if (p.p2_include_noise)
    {
        double s = coef * p.noise / p.p_u;
        out.laplace_los_branch *= std::exp(-s);
        out.laplace_nlos_branch *= std::exp(-s / env.eta);
    }
    out.p2 = out.p_los_serving * out.laplace_los_branch
             + (1 - out.p_los_serving) * out.laplace_nlos_branch;
    return out;
}

/// Transmission capacity lambda_u * p2 * ln(1 + beta_u), in nats.
inline double transmission_capacity(double lambda_u, double p2, double beta_u)
{
    return lambda_u * p2 * std::log1p(beta_u);
}

inline double transmission_capacity(SystemParams const& p,
                                    AirspaceSlab const& slab,
                                    LosEnvironment const& env,
                                    ServingLinkGeometry const& geom,
                                    QuadratureConfig const& cfg = {})
{
    if (p.lambda_u == 0)
    {
        return 0;
    }
    auto uav = coverage_uav(p, slab, env, geom, cfg);
    return transmission_capacity(p.lambda_u, uav.p2, p.beta_u);
}

}  // namespace uavss
