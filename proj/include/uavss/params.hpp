// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "error.hpp"

namespace uavss
{

/// How `SystemParams::lambda_u` is read.
enum class UavDensityUnit
{
    per_cubic_meter,  //!< volumetric density of the 3D PPP (default)
    per_square_meter  //!< areal density spread uniformly over the slab
};

//---------------------------------------------------------------------------//
/*!
 * Radio and network scalars shared by both engines.
 *
 * Defaults reproduce the reference scenario: 5 W UAVs, 0.1 W ground
 * transmitters, path-loss exponents 3 (air-to-ground) and 4 (ground), both
 * SINR thresholds 0.1, densities 1e-4 and 1e-3, d0 = 10 m and N = 1e-9 W.
 * The UAV-network serving distance x0 has no reference value and defaults to
 * d0.
 */
struct SystemParams
{
    double p_u = 5.0;
    double p_d = 0.1;
    double alpha_u = 3.0;
    double alpha_d = 4.0;
    double lambda_u = 1e-4;
    double lambda_d = 1e-3;
    double beta_d = 0.1;
    double beta_u = 0.1;
    double noise = 1e-9;
    double d0 = 10.0;
    double x0 = 10.0;
    double aloha_p = 1.0;

    // Whether aloha_p also thins the ground transmitters.
    bool aloha_ground = false;
    // Add thermal noise to the UAV-user SINR (off: SIR, the reference model).
    bool p2_include_noise = false;
    UavDensityUnit lambda_u_unit = UavDensityUnit::per_cubic_meter;

    double lambda_d_effective() const noexcept
    {
        return aloha_ground ? aloha_p * lambda_d : lambda_d;
    }
};

/// Vertical layer [h1, h1 + delta_h] occupied by the UAVs.
struct AirspaceSlab
{
    double h1 = 0.0;
    double delta_h = 0.0;

    double h2() const noexcept { return h1 + delta_h; }
};

/// Sigmoid LoS model constants (c in degrees) and NLoS attenuation.
struct LosEnvironment
{
    double b = 0.136;
    double c = 11.95;
    double eta = 0.1;
};

struct Point3
{
    double x = 0;
    double y = 0;
    double z = 0;
};

enum class ServingConvention
{
    midpoint_height,
    min_height,
    explicit_height
};

/// Where the serving UAV of the typical UAV-network user sits vertically.
struct ServingLinkGeometry
{
    ServingConvention convention = ServingConvention::midpoint_height;
    double h_serving = 0.0;  //!< used by explicit_height only
};

//---------------------------------------------------------------------------//
// VALIDATION
//---------------------------------------------------------------------------//

namespace detail
{
inline void require(bool ok, char const* field, char const* what)
{
    if (!ok)
    {
        throw InvalidParameter(field, what);
    }
}
}  // namespace detail

inline void validate(SystemParams const& p)
{
    using detail::require;
    auto finite_pos = [](double v) { return std::isfinite(v) && v > 0; };
    require(finite_pos(p.p_u), "p_u", "must be positive");
    require(finite_pos(p.p_d), "p_d", "must be positive");
    require(std::isfinite(p.alpha_u) && p.alpha_u > 2, "alpha_u",
            "must exceed 2");
    require(std::isfinite(p.alpha_d) && p.alpha_d > 2, "alpha_d",
            "must exceed 2");
    // Zero densities are accepted: they describe an empty interferer field.
    require(std::isfinite(p.lambda_u) && p.lambda_u >= 0, "lambda_u",
            "must be nonnegative");
    require(std::isfinite(p.lambda_d) && p.lambda_d >= 0, "lambda_d",
            "must be nonnegative");
    require(std::isfinite(p.beta_d) && p.beta_d >= 0, "beta_d",
            "must be nonnegative");
    require(std::isfinite(p.beta_u) && p.beta_u >= 0, "beta_u",
            "must be nonnegative");
    require(std::isfinite(p.noise) && p.noise >= 0, "noise",
            "must be nonnegative");
    require(finite_pos(p.d0), "d0", "must be positive");
    require(finite_pos(p.x0), "x0", "must be positive");
    require(p.aloha_p > 0 && p.aloha_p <= 1, "aloha_p", "must lie in (0, 1]");
}

inline void validate(AirspaceSlab const& s)
{
    detail::require(std::isfinite(s.h1) && s.h1 >= 0, "h1",
                    "must be nonnegative");
    detail::require(std::isfinite(s.delta_h) && s.delta_h >= 0, "delta_h",
                    "must be nonnegative");
}

inline void validate(LosEnvironment const& e)
{
    detail::require(std::isfinite(e.b) && e.b > 0, "b", "must be positive");
    detail::require(std::isfinite(e.c) && e.c > 0, "c", "must be positive");
    detail::require(e.eta > 0 && e.eta <= 1, "eta", "must lie in (0, 1]");
}

inline void validate(ServingLinkGeometry const& g, AirspaceSlab const& s)
{
    if (g.convention == ServingConvention::explicit_height)
    {
        detail::require(g.h_serving >= s.h1 && g.h_serving <= s.h2(),
                        "h_serving", "must lie inside the UAV slab");
    }
}

//---------------------------------------------------------------------------//
// DERIVED DENSITIES
//---------------------------------------------------------------------------//

/*!
 * Active UAVs per unit ground area, after Aloha thinning.
 *
 * This is the rate of the horizontal projection of the UAV field. With the
 * areal unit and an empty slab it describes a planar layer at h1.
 */
inline double uav_areal_density(SystemParams const& p, AirspaceSlab const& s)
{
    double active = p.aloha_p * p.lambda_u;
    return p.lambda_u_unit == UavDensityUnit::per_cubic_meter
               ? active * s.delta_h
               : active;
}

/// True when the UAVs collapse onto the plane z = h1 with nonzero density.
inline bool uav_field_is_planar(SystemParams const& p, AirspaceSlab const& s)
{
    return p.lambda_u_unit == UavDensityUnit::per_square_meter
           && s.delta_h == 0.0;
}

/// Volumetric density of active UAVs; undefined for a planar layer.
inline double uav_volume_density(SystemParams const& p, AirspaceSlab const& s)
{
    if (p.lambda_u_unit == UavDensityUnit::per_cubic_meter)
    {
        return p.aloha_p * p.lambda_u;
    }
    if (s.delta_h == 0.0)
    {
        throw GeometryError("planar UAV layer has no volumetric density");
    }
    return p.aloha_p * p.lambda_u / s.delta_h;
}

}  // namespace uavss
