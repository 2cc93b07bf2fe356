// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "error.hpp"
#include "params.hpp"

namespace uavss
{

inline constexpr double rad_to_deg = 180.0 / std::numbers::pi;

/*!
 * Elevation angle in degrees seen from a ground receiver.
 *
 * \param h height of the transmitter above the receiver plane
 * \param r horizontal distance between receiver and the ground projection
 */
inline double elevation_angle_deg(double h, double r)
{
    if (!(h >= 0) || !(r >= 0))
    {
        throw GeometryError("elevation angle needs h >= 0 and r >= 0");
    }
    if (h == 0 && r == 0)
    {
        throw GeometryError("elevation angle undefined at zero separation");
    }
    return rad_to_deg * std::atan2(h, r);
}

/// Sigmoid line-of-sight probability at elevation `theta_deg`.
inline double p_los(double theta_deg, LosEnvironment const& env) noexcept
{
    return 1.0 / (1.0 + env.c * std::exp(-env.b * (theta_deg - env.c)));
}

inline double p_nlos(double theta_deg, LosEnvironment const& env) noexcept
{
    return 1.0 - p_los(theta_deg, env);
}

/// Mean received power before fading; NLoS links are scaled by `eta`.
inline double received_power(
    double p_tx, double distance, double alpha, bool los, double eta)
{
    if (!(distance > 0))
    {
        throw GeometryError("received power is singular at zero distance");
    }
    double mean = p_tx * std::pow(distance, -alpha);
    return los ? mean : eta * mean;
}

/// Rayleigh power gain: unit-mean exponential.
template<class Engine>
double sample_fading(Engine& rng)
{
    return std::exponential_distribution<double>{1.0}(rng);
}

//---------------------------------------------------------------------------//
// SERVING LINK OF THE UAV-NETWORK USER
//---------------------------------------------------------------------------//

inline double serving_height(ServingLinkGeometry const& g,
                             AirspaceSlab const& s) noexcept
{
    switch (g.convention)
    {
        case ServingConvention::min_height:
            return s.h1;
        case ServingConvention::explicit_height:
            return g.h_serving;
        case ServingConvention::midpoint_height:
            break;
    }
    return s.h1 + 0.5 * s.delta_h;
}

/*!
 * Elevation of the serving UAV at slant distance x0.
 *
 * The UAV sits at the convention's height with horizontal offset
 * sqrt(max(x0^2 - h^2, 0)); when x0 <= h it is directly overhead.
 */
inline double serving_elevation_deg(double x0,
                                    ServingLinkGeometry const& g,
                                    AirspaceSlab const& s)
{
    double h = serving_height(g, s);
    if (x0 <= h)
    {
        return 90.0;
    }
    return elevation_angle_deg(h, std::sqrt(x0 * x0 - h * h));
}

inline double serving_p_los(SystemParams const& p,
                            AirspaceSlab const& s,
                            LosEnvironment const& env,
                            ServingLinkGeometry const& g)
{
    return p_los(serving_elevation_deg(p.x0, g, s), env);
}

}  // namespace uavss
