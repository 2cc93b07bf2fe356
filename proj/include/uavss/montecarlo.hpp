// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "channel.hpp"
#include "params.hpp"
#include "rng.hpp"

namespace uavss
{

/// How UAV interferers are marked LoS or NLoS in the simulation.
enum class InterferenceModel
{
    //! Each UAV is independently LoS with the probability of its elevation.
    independent_marks,
    //! Two independent UAV fields, one carrying the mean LoS weight P_LoS and
    //! one the mean NLoS weight eta (1 - P_LoS). Its Laplace transform is the
    //! product form used by the analytical kernels.
    product_form
};

struct McConfig
{
    std::uint64_t trials = 10000;
    std::uint64_t seed = 1;
    double ground_disk_radius = 1000;
    double uav_cylinder_radius = 1000;
    double ci_level = 0.95;
    //! Worker threads; 0 uses the hardware concurrency. Never affects results.
    unsigned workers = 0;
    InterferenceModel model = InterferenceModel::independent_marks;
    //! Grow the radii until the mean interference beyond them is at most
    //! `tail_fraction` of the receiver's interference budget.
    bool auto_radius = true;
    double tail_fraction = 0.01;
};

/// Configuration for grid point `index`: same settings, its own seed.
inline McConfig for_grid_point(McConfig mc, std::uint64_t index)
{
    mc.seed = substream_seed(mc.seed, 0x67726964ULL, index);
    return mc;
}

struct CoverageEstimate
{
    double p_hat = 0;
    double ci_half_width = 0;
    double ci_low = 0;
    double ci_high = 0;
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;

    bool contains(double p) const noexcept
    {
        return p >= ci_low && p <= ci_high;
    }
};

struct Point2
{
    double x = 0;
    double y = 0;
};

inline void validate(McConfig const& mc)
{
    detail::require(mc.trials >= 1, "trials", "must be at least 1");
    detail::require(mc.ground_disk_radius > 0, "ground_disk_radius",
                    "must be positive");
    detail::require(mc.uav_cylinder_radius > 0, "uav_cylinder_radius",
                    "must be positive");
    detail::require(mc.ci_level > 0 && mc.ci_level < 1, "ci_level",
                    "must lie in (0, 1)");
    detail::require(mc.tail_fraction > 0, "tail_fraction", "must be positive");
}

//---------------------------------------------------------------------------//
// CONFIDENCE INTERVALS
//---------------------------------------------------------------------------//

/// Two-sided standard normal quantile for confidence `level`.
inline double normal_quantile(double level)
{
    boost::math::normal_distribution<double> std_normal;
    return boost::math::quantile(std_normal, 0.5 + 0.5 * level);
}

/*!
 * Binomial confidence interval for `successes` out of `trials`.
 *
 * The normal approximation is used with at least 1e4 trials and a success
 * fraction in [0.05, 0.95]; otherwise the Wilson score interval, which stays
 * nondegenerate at p_hat = 0 or 1. The half-width is half the interval
 * length.
 */
inline CoverageEstimate
binomial_estimate(std::uint64_t successes, std::uint64_t trials, double level)
{
    CoverageEstimate est;
    est.successes = successes;
    est.trials = trials;
    double n = static_cast<double>(trials);
    double p = static_cast<double>(successes) / n;
    double z = normal_quantile(level);
    est.p_hat = p;
    if (trials >= 10000 && p >= 0.05 && p <= 0.95)
    {
        est.ci_half_width = z * std::sqrt(p * (1 - p) / n);
        est.ci_low = p - est.ci_half_width;
        est.ci_high = p + est.ci_half_width;
    }
    else
    {
        double z2 = z * z;
        double denom = 1 + z2 / n;
        double center = (p + z2 / (2 * n)) / denom;
        double spread = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n))
                        / denom;
        est.ci_low = successes == 0 ? 0.0 : std::max(0.0, center - spread);
        est.ci_high = successes == trials ? 1.0
                                          : std::min(1.0, center + spread);
        est.ci_half_width = 0.5 * (est.ci_high - est.ci_low);
    }
    return est;
}

//---------------------------------------------------------------------------//
// POINT PROCESSES
//---------------------------------------------------------------------------//

/// Homogeneous PPP on the disk of `radius` centered at the origin.
template<class Rng>
std::vector<Point2> sample_ppp_disk(double density, double radius, Rng& rng)
{
    std::vector<Point2> points;
    if (density <= 0)
    {
        return points;
    }
    double mean = density * std::numbers::pi * radius * radius;
    auto count = std::poisson_distribution<std::uint64_t>{mean}(rng);
    points.reserve(count);
    std::uniform_real_distribution<double> unit;
    for (std::uint64_t i = 0; i < count; ++i)
    {
        double r = radius * std::sqrt(unit(rng));
        double phi = 2 * std::numbers::pi * unit(rng);
        points.push_back({r * std::cos(phi), r * std::sin(phi)});
    }
    return points;
}

/// Homogeneous 3D PPP in the cylinder of `radius` spanning the slab.
template<class Rng>
std::vector<Point3> sample_ppp_slab(double density,
                                    double radius,
                                    AirspaceSlab const& slab,
                                    Rng& rng)
{
    std::vector<Point3> points;
    if (density <= 0 || slab.delta_h <= 0)
    {
        return points;
    }
    double mean = density * std::numbers::pi * radius * radius * slab.delta_h;
    auto count = std::poisson_distribution<std::uint64_t>{mean}(rng);
    points.reserve(count);
    std::uniform_real_distribution<double> unit;
    for (std::uint64_t i = 0; i < count; ++i)
    {
        double r = radius * std::sqrt(unit(rng));
        double phi = 2 * std::numbers::pi * unit(rng);
        double z = std::min(slab.h1 + slab.delta_h * unit(rng), slab.h2());
        points.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    return points;
}

/// Interferer seen from a receiver at the origin.
struct MarkedTransmitter
{
    double r;     //!< horizontal distance
    double z;     //!< height
    bool los;     //!< propagation state mark
    double gain;  //!< fading power gain
};

/*!
 * Stream the points of a planar PPP with rate `areal_density` in order of
 * increasing distance from the origin, out to `radius`.
 *
 * Successive squared radii are arrival times of a Poisson process in the
 * enclosed area, which yields the same law as a Poisson count with uniform
 * positions. Azimuth is not drawn: no quantity here depends on it. The
 * visitor returns false to stop early.
 */
template<class Rng, class Visit>
void for_each_radial_point(double areal_density,
                           double radius,
                           Rng& rng,
                           Visit&& visit)
{
    if (areal_density <= 0)
    {
        return;
    }
    std::exponential_distribution<double> gap{areal_density * std::numbers::pi};
    double const r2_max = radius * radius;
    double r2 = 0;
    while (true)
    {
        r2 += gap(rng);
        if (r2 > r2_max || !visit(std::sqrt(r2)))
        {
            return;
        }
    }
}

/*!
 * Stream the UAV interferers of the slab with independent LoS marks and
 * Rayleigh gains, nearest ground projection first.
 */
template<class Rng, class Visit>
void for_each_uav(SystemParams const& p,
                  AirspaceSlab const& slab,
                  LosEnvironment const& env,
                  double radius,
                  Rng& rng,
                  Visit&& visit)
{
    std::uniform_real_distribution<double> unit;
    std::exponential_distribution<double> fading{1.0};
    double rate = uav_areal_density(p, slab);
    for_each_radial_point(rate, radius, rng, [&](double r) {
        double z = std::min(slab.h1 + slab.delta_h * unit(rng), slab.h2());
        double theta = rad_to_deg * std::atan2(z, r);
        bool los = unit(rng) < p_los(theta, env);
        double gain = fading(rng);
        return visit(MarkedTransmitter{r, z, los, gain});
    });
}

namespace detail
{
/// x2^(-alpha/2) with fast paths for the common integer exponents.
inline double inverse_power(double x2, double alpha) noexcept
{
    if (alpha == 3.0)
    {
        return 1.0 / (x2 * std::sqrt(x2));
    }
    if (alpha == 4.0)
    {
        return 1.0 / (x2 * x2);
    }
    return std::pow(x2, -0.5 * alpha);
}

inline constexpr std::uint64_t ground_family = 0x67726f756e64ULL;
inline constexpr std::uint64_t uav_family = 0x756176ULL;
inline constexpr std::uint64_t ground_field_family = 0x6669656c64ULL;

/// UAV interference at the origin; stops once it reaches `budget`.
template<class Rng>
bool uav_interference_below(SystemParams const& p,
                            AirspaceSlab const& slab,
                            LosEnvironment const& env,
                            McConfig const& mc,
                            double radius,
                            double budget,
                            double& total,
                            Rng& rng)
{
    if (mc.model == InterferenceModel::independent_marks)
    {
        for_each_uav(p, slab, env, radius, rng, [&](MarkedTransmitter const& t) {
            double power = p.p_u * t.gain
                           * inverse_power(t.r * t.r + t.z * t.z, p.alpha_u);
            total += t.los ? power : env.eta * power;
            return total < budget;
        });
        return total < budget;
    }

    std::uniform_real_distribution<double> unit;
    std::exponential_distribution<double> fading{1.0};
    double const rate = uav_areal_density(p, slab);
    for (auto state : {true, false})
    {
        for_each_radial_point(rate, radius, rng, [&](double r) {
            double z = std::min(slab.h1 + slab.delta_h * unit(rng), slab.h2());
            double pl = p_los(rad_to_deg * std::atan2(z, r), env);
            double weight = state ? pl : env.eta * (1 - pl);
            total += weight * p.p_u * fading(rng)
                     * inverse_power(r * r + z * z, p.alpha_u);
            return total < budget;
        });
        if (!(total < budget))
        {
            return false;
        }
    }
    return true;
}

/// Count successes over trials [0, n), split over workers by block.
template<class Trial>
std::uint64_t count_successes(McConfig const& mc, Trial const& trial)
{
    unsigned workers = mc.workers;
    if (workers == 0)
    {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(
        std::min<std::uint64_t>(workers, mc.trials));

    std::vector<std::uint64_t> counts(workers, 0);
    auto run_block = [&](unsigned w) {
        std::uint64_t begin = mc.trials * w / workers;
        std::uint64_t end = mc.trials * (w + 1) / workers;
        std::uint64_t hits = 0;
        for (std::uint64_t i = begin; i < end; ++i)
        {
            hits += trial(i) ? 1 : 0;
        }
        counts[w] = hits;
    };
    if (workers == 1)
    {
        run_block(0);
    }
    else
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
        {
            pool.emplace_back(run_block, w);
        }
    }
    std::uint64_t total = 0;
    for (auto c : counts)
    {
        total += c;
    }
    return total;
}
}  // namespace detail

//---------------------------------------------------------------------------//
// TRUNCATION RADII
//---------------------------------------------------------------------------//

/// Radii actually simulated for one receiver.
struct SimulationRadii
{
    double ground = 0;
    double uav = 0;
};

/*!
 * Upper bound on the mean UAV interference from horizontal distances beyond
 * `radius`: each UAV there is seen below elevation atan(h2 / radius), so its
 * mean mark is at most P_LoS + eta (1 - P_LoS) at that elevation.
 */
inline double uav_tail_interference(SystemParams const& p,
                                    AirspaceSlab const& slab,
                                    LosEnvironment const& env,
                                    double radius)
{
    double theta = rad_to_deg * std::atan2(slab.h2(), radius);
    double pl = p_los(theta, env);
    double mark = pl + env.eta * (1 - pl);
    double a = p.alpha_u - 2;
    return 2 * std::numbers::pi * uav_areal_density(p, slab) * p.p_u * mark
           * std::pow(radius, -a) / a;
}

/// Mean ground interference from beyond `radius`.
inline double ground_tail_interference(SystemParams const& p, double radius)
{
    double a = p.alpha_d - 2;
    return 2 * std::numbers::pi * p.lambda_d_effective() * p.p_d
           * std::pow(radius, -a) / a;
}

namespace detail
{
/// Smallest radius >= `start` with tail(radius) <= target, by doubling and
/// bisection on the monotone tail bound.
template<class Tail>
double radius_for(Tail const& tail, double target, double start)
{
    if (!(target > 0) || tail(start) <= target)
    {
        return start;
    }
    double lo = start;
    double hi = 2 * start;
    while (tail(hi) > target)
    {
        lo = hi;
        hi *= 2;
    }
    for (int i = 0; i < 60 && hi - lo > 1e-6 * hi; ++i)
    {
        double mid = 0.5 * (lo + hi);
        (tail(mid) > target ? lo : hi) = mid;
    }
    return hi;
}
}  // namespace detail

/*!
 * Radii for the ground user. With `auto_radius`, each configured radius is
 * grown until the mean tail interference is at most `tail_fraction` of
 * P_d d0^-alpha_d / beta_d.
 */
inline SimulationRadii ground_user_radii(SystemParams const& p,
                                         AirspaceSlab const& slab,
                                         LosEnvironment const& env,
                                         McConfig const& mc)
{
    SimulationRadii r{mc.ground_disk_radius, mc.uav_cylinder_radius};
    if (!mc.auto_radius || p.beta_d == 0)
    {
        return r;
    }
    double target = mc.tail_fraction * p.p_d * std::pow(p.d0, -p.alpha_d)
                    / p.beta_d;
    r.ground = detail::radius_for(
        [&](double x) { return ground_tail_interference(p, x); }, target,
        r.ground);
    r.uav = detail::radius_for(
        [&](double x) { return uav_tail_interference(p, slab, env, x); },
        target, r.uav);
    return r;
}

/*!
 * Radius for the UAV-network user; the budget uses the weaker NLoS serving
 * signal eta P_u x0^-alpha_u / beta_u.
 */
inline SimulationRadii uav_user_radii(SystemParams const& p,
                                      AirspaceSlab const& slab,
                                      LosEnvironment const& env,
                                      McConfig const& mc)
{
    SimulationRadii r{mc.ground_disk_radius, mc.uav_cylinder_radius};
    if (!mc.auto_radius || p.beta_u == 0)
    {
        return r;
    }
    double target = mc.tail_fraction * env.eta * p.p_u
                    * std::pow(p.x0, -p.alpha_u) / p.beta_u;
    r.uav = detail::radius_for(
        [&](double x) { return uav_tail_interference(p, slab, env, x); },
        target, r.uav);
    return r;
}

//---------------------------------------------------------------------------//
// COVERAGE SIMULATION
//---------------------------------------------------------------------------//

/*!
 * Empirical coverage of the typical ground user at the origin.
 *
 * Per trial: the serving transmitter at d0 with a Rayleigh gain; ground
 * interferers as a PPP on the truncation disk; UAVs as a PPP in the
 * truncation cylinder, each independently LoS with the probability of its
 * elevation. Success iff SINR > beta_d.
 */
inline CoverageEstimate simulate_ground_coverage(SystemParams const& p,
                                                 AirspaceSlab const& slab,
                                                 LosEnvironment const& env,
                                                 McConfig const& mc)
{
    validate(p);
    validate(slab);
    validate(env);
    validate(mc);

    double const path_gain = std::pow(p.d0, -p.alpha_d);
    double const lambda_d = p.lambda_d_effective();
    auto const radii = ground_user_radii(p, slab, env, mc);
    auto trial = [&](std::uint64_t i) {
        auto rng = make_substream(mc.seed, detail::ground_family, i);
        double signal = p.p_d * sample_fading(rng) * path_gain;
        if (p.beta_d == 0)
        {
            return signal > 0;
        }
        double budget = signal / p.beta_d - p.noise;
        if (!(budget > 0))
        {
            return false;
        }
        double total = 0;
        if (!detail::uav_interference_below(p, slab, env, mc, radii.uav,
                                            budget, total, rng))
        {
            return false;
        }
        // Separate substream for the ground field.
        auto field = make_substream(mc.seed, detail::ground_field_family, i);
        std::exponential_distribution<double> fading{1.0};
        for_each_radial_point(
            lambda_d, radii.ground, field, [&](double r) {
                total += p.p_d * fading(field)
                         * detail::inverse_power(r * r, p.alpha_d);
                return total < budget;
            });
        return total < budget;
    };

    auto est = binomial_estimate(detail::count_successes(mc, trial),
                                 mc.trials, mc.ci_level);
    est.seed = mc.seed;
    return est;
}

/*!
 * Empirical coverage of the typical UAV-network user at the origin.
 *
 * Per trial: the serving UAV at slant distance x0 per the serving-link
 * geometry, LoS with the probability of its elevation and Rayleigh faded;
 * UAV interferers as in the ground simulation. Success iff SIR > beta_u
 * (SINR when `p2_include_noise` is set).
 */
inline CoverageEstimate simulate_uav_coverage(SystemParams const& p,
                                              AirspaceSlab const& slab,
                                              LosEnvironment const& env,
                                              ServingLinkGeometry const& geom,
                                              McConfig const& mc)
{
    validate(p);
    validate(slab);
    validate(env);
    validate(geom, slab);
    validate(mc);

    double const serving_los = serving_p_los(p, slab, env, geom);
    double const path_gain = std::pow(p.x0, -p.alpha_u);
    double const noise = p.p2_include_noise ? p.noise : 0.0;
    double const radius = uav_user_radii(p, slab, env, mc).uav;
    auto trial = [&](std::uint64_t i) {
        auto rng = make_substream(mc.seed, detail::uav_family, i);
        std::uniform_real_distribution<double> unit;
        bool los = unit(rng) < serving_los;
        double signal = p.p_u * sample_fading(rng) * path_gain;
        if (!los)
        {
            signal *= env.eta;
        }
        if (p.beta_u == 0)
        {
            return signal > 0;
        }
        double budget = signal / p.beta_u - noise;
        if (!(budget > 0))
        {
            return false;
        }
        double total = 0;
        return detail::uav_interference_below(p, slab, env, mc, radius,
                                              budget, total, rng);
    };

    auto est = binomial_estimate(detail::count_successes(mc, trial),
                                 mc.trials, mc.ci_level);
    est.seed = mc.seed;
    return est;
}

}  // namespace uavss
