// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "error.hpp"
#include "params.hpp"

namespace uavss
{

enum class TruncationPolicy
{
    tail_bound,   //!< radius from a closed-form envelope of the integrand
    fixed_radius  //!< integrate to QuadratureConfig::r_max
};

struct QuadratureConfig
{
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    TruncationPolicy r_truncation_policy = TruncationPolicy::tail_bound;
    double r_max = 1e6;
    std::size_t max_subdivisions = 4000;
};

struct QuadratureResult
{
    double value = 0;
    double est_error = 0;
    std::size_t evaluations = 0;
    bool converged = true;
};

/*!
 * Power-law bound on the radial integrand: f(r, z) <= coefficient * r^-exponent
 * for all r > 0 and all z in the slab.
 *
 * With the cylindrical weight, the tail beyond R is at most
 * coefficient * R^(2 - exponent) / (exponent - 2).
 */
struct TailEnvelope
{
    double coefficient = 0;
    double exponent = 0;
};

inline void validate(QuadratureConfig const& cfg)
{
    detail::require(cfg.rel_tol > 0, "rel_tol", "must be positive");
    detail::require(cfg.abs_tol > 0, "abs_tol", "must be positive");
    detail::require(cfg.max_subdivisions >= 1, "max_subdivisions",
                    "must be at least 1");
    if (cfg.r_truncation_policy == TruncationPolicy::fixed_radius)
    {
        detail::require(cfg.r_max > 0, "r_max", "must be positive");
    }
}

/// Upper bound of the weighted tail integral beyond `radius`.
inline double tail_bound(TailEnvelope const& env, double radius)
{
    if (!(env.exponent > 2))
    {
        throw DivergenceError("tail envelope must decay faster than r^-2");
    }
    return env.coefficient * std::pow(radius, 2 - env.exponent)
           / (env.exponent - 2);
}

/// Smallest radius whose envelope tail is at most `tol`.
inline double tail_bound_radius(TailEnvelope const& env, double tol)
{
    if (!(env.exponent > 2))
    {
        throw DivergenceError("tail envelope must decay faster than r^-2");
    }
    if (!(tol > 0))
    {
        throw InvalidParameter("tol", "must be positive");
    }
    if (env.coefficient <= 0)
    {
        return 0;
    }
    double p = env.exponent - 2;
    return std::pow(env.coefficient / (p * tol), 1 / p);
}

namespace detail
{
//---------------------------------------------------------------------------//
// 15-point Kronrod rule with its embedded 7-point Gauss rule.
// Abscissae on [-1, 1], nonnegative half; index 7 is the center.
inline constexpr std::array<double, 8> gk15_nodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
inline constexpr std::array<double, 8> gk15_kronrod = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
// Gauss weights for the odd-index Kronrod nodes (1, 3, 5) and the center.
inline constexpr std::array<double, 4> g7_weights = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Panel
{
    double a;
    double b;
    double value;
    double error;
};

template<class F>
Panel gk15(F const& f, double a, double b)
{
    double const center = 0.5 * (a + b);
    double const half = 0.5 * (b - a);
    double const fc = f(center);
    double kronrod = gk15_kronrod[7] * fc;
    double gauss = g7_weights[3] * fc;
    double abs_sum = std::abs(kronrod);

    std::array<double, 7> lo{};
    std::array<double, 7> hi{};
    for (std::size_t i = 0; i < 7; ++i)
    {
        double dx = half * gk15_nodes[i];
        lo[i] = f(center - dx);
        hi[i] = f(center + dx);
        double pair = lo[i] + hi[i];
        kronrod += gk15_kronrod[i] * pair;
        abs_sum += gk15_kronrod[i] * (std::abs(lo[i]) + std::abs(hi[i]));
        if (i % 2 == 1)
        {
            gauss += g7_weights[i / 2] * pair;
        }
    }
    double const mean = 0.5 * kronrod;
    double asc = gk15_kronrod[7] * std::abs(fc - mean);
    for (std::size_t i = 0; i < 7; ++i)
    {
        asc += gk15_kronrod[i]
               * (std::abs(lo[i] - mean) + std::abs(hi[i] - mean));
    }

    double value = kronrod * half;
    double error = std::abs((kronrod - gauss) * half);
    double res_asc = asc * std::abs(half);
    double res_abs = abs_sum * std::abs(half);
    // QUADPACK's scaling of the Kronrod-Gauss difference.
    if (res_asc != 0 && error != 0)
    {
        error = res_asc * std::min(1.0, std::pow(200 * error / res_asc, 1.5));
    }
    double const eps = std::numeric_limits<double>::epsilon();
    if (res_abs > std::numeric_limits<double>::min() / (50 * eps))
    {
        error = std::max(50 * eps * res_abs, error);
    }
    return {a, b, value, error};
}
}  // namespace detail

/*!
 * Globally adaptive Gauss-Kronrod integration over consecutive panels.
 *
 * `edges` lists the initial breakpoints in increasing order. The panel with
 * the largest error estimate is bisected until the total estimate meets
 * max(rel_tol * |value|, abs_tol) or `max_subdivisions` bisections have been
 * made. Panel values are summed in ascending abscissa order.
 */
template<class F>
QuadratureResult integrate_panels(F const& f,
                                  std::span<double const> edges,
                                  double rel_tol,
                                  double abs_tol,
                                  std::size_t max_subdivisions)
{
    QuadratureResult result;
    if (edges.size() < 2)
    {
        return result;
    }

    auto by_error = [](detail::Panel const& x, detail::Panel const& y) {
        return x.error < y.error || (x.error == y.error && x.a > y.a);
    };
    std::priority_queue<detail::Panel, std::vector<detail::Panel>,
                        decltype(by_error)>
        queue(by_error);

    double total = 0;
    double total_err = 0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    {
        if (edges[i + 1] <= edges[i])
        {
            continue;
        }
        auto panel = detail::gk15(f, edges[i], edges[i + 1]);
        result.evaluations += 15;
        total += panel.value;
        total_err += panel.error;
        queue.push(panel);
    }

    auto target = [&] { return std::max(rel_tol * std::abs(total), abs_tol); };
    std::size_t splits = 0;
    while (!queue.empty() && total_err > target() && splits < max_subdivisions)
    {
        auto worst = queue.top();
        double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
        {
            // Panel can no longer be bisected in floating point.
            break;
        }
        queue.pop();
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        result.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++splits;
    }

    std::vector<detail::Panel> panels;
    panels.reserve(queue.size());
    while (!queue.empty())
    {
        panels.push_back(queue.top());
        queue.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](auto const& x, auto const& y) { return x.a < y.a; });
    result.value = 0;
    result.est_error = 0;
    for (auto const& p : panels)
    {
        result.value += p.value;
        result.est_error += p.error;
    }
    result.converged = result.est_error
                       <= std::max(rel_tol * std::abs(result.value), abs_tol);
    return result;
}

namespace detail
{
/// Radial breakpoints 0, r0, 2 r0, 4 r0, ... capped at `radius`.
inline std::vector<double>
radial_mesh(double z, TailEnvelope const* env, double radius)
{
    double scale = 1.0;
    if (env && env->coefficient > 0)
    {
        scale = std::pow(env->coefficient, 1 / env->exponent);
    }
    if (z > 0)
    {
        scale = std::min(scale, z);
    }
    double r0 = scale / 8;
    if (!(r0 > 0) || !std::isfinite(r0))
    {
        r0 = 1.0;
    }
    std::vector<double> edges{0.0};
    for (double r = r0; r < radius; r *= 2)
    {
        edges.push_back(r);
    }
    edges.push_back(radius);
    return edges;
}

inline double truncation_radius(QuadratureConfig const& cfg,
                                TailEnvelope const* env,
                                double tail_tol)
{
    if (cfg.r_truncation_policy == TruncationPolicy::fixed_radius)
    {
        return cfg.r_max;
    }
    if (!env)
    {
        throw InvalidParameter("r_truncation_policy",
                               "tail-bound truncation needs a decay envelope");
    }
    double radius = tail_bound_radius(*env, tail_tol);
    // Never shrink below the scale where the integrand has structure.
    return std::max(radius, 1.0);
}
}  // namespace detail

/*!
 * Radial integral  int_0^inf f(r, z) r dr  at a fixed height.
 *
 * The tail beyond the truncation radius is not integrated; its envelope bound
 * (when given) is added to the error estimate.
 */
template<class F>
QuadratureResult integrate_radial(F const& f,
                                  double z,
                                  QuadratureConfig const& cfg,
                                  std::optional<TailEnvelope> envelope)
{
    validate(cfg);
    TailEnvelope const* env = envelope ? &*envelope : nullptr;
    double radius = detail::truncation_radius(cfg, env, 0.01 * cfg.abs_tol);
    auto edges = detail::radial_mesh(z, env, radius);
    auto weighted = [&f, z](double r) { return f(r, z) * r; };
    auto result = integrate_panels(weighted, edges, 0.5 * cfg.rel_tol,
                                   0.5 * cfg.abs_tol, cfg.max_subdivisions);
    if (env)
    {
        result.est_error += tail_bound(*env, radius);
    }
    result.converged
        = result.converged
          && result.est_error
                 <= std::max(cfg.rel_tol * std::abs(result.value), cfg.abs_tol);
    return result;
}

/*!
 * Cylindrical slab integral  int_{h1}^{h2} int_0^inf f(r, z) r dr dz.
 *
 * The azimuthal factor 2 pi is not included. Integration is nested: an
 * adaptive outer rule in z over an inner radial integral on a geometric mesh.
 * The outer mesh is graded toward z = h1 when the slab starts near the
 * ground, where the elevation-angle kernel varies fastest.
 */
template<class F>
QuadratureResult integrate_slab(F const& f,
                                AirspaceSlab const& slab,
                                QuadratureConfig const& cfg,
                                std::optional<TailEnvelope> envelope)
{
    validate(slab);
    validate(cfg);
    if (slab.delta_h == 0)
    {
        return {};
    }
    TailEnvelope const* env = envelope ? &*envelope : nullptr;

    double const dh = slab.delta_h;
    double const tail_tol = 0.01 * cfg.abs_tol / std::max(dh, 1.0);
    double const radius = detail::truncation_radius(cfg, env, tail_tol);
    double const inner_rel = 0.1 * cfg.rel_tol;
    double const inner_abs = 0.1 * cfg.abs_tol / std::max(dh, 1.0);

    std::size_t inner_evals = 0;
    double worst_inner_rel = 0;
    double worst_inner_abs = 0;
    bool inner_ok = true;
    auto inner = [&](double z) {
        auto edges = detail::radial_mesh(z, env, radius);
        auto weighted = [&f, z](double r) { return f(r, z) * r; };
        auto res = integrate_panels(weighted, edges, inner_rel, inner_abs,
                                    cfg.max_subdivisions);
        inner_evals += res.evaluations;
        inner_ok = inner_ok && res.converged;
        if (res.value != 0)
        {
            worst_inner_rel
                = std::max(worst_inner_rel, res.est_error / std::abs(res.value));
        }
        else
        {
            worst_inner_abs = std::max(worst_inner_abs, res.est_error);
        }
        return res.value;
    };

    std::vector<double> z_edges{slab.h1};
    if (slab.h1 < dh)
    {
        for (double frac = 1.0 / 64; frac < 1; frac *= 2)
        {
            z_edges.push_back(slab.h1 + frac * dh);
        }
    }
    z_edges.push_back(slab.h2());

    auto result = integrate_panels(inner, z_edges, 0.5 * cfg.rel_tol,
                                   0.5 * cfg.abs_tol, cfg.max_subdivisions);
    result.evaluations = inner_evals;
    result.est_error += worst_inner_rel * std::abs(result.value)
                        + worst_inner_abs * dh;
    if (env)
    {
        result.est_error += tail_bound(*env, radius) * dh;
    }
    result.converged
        = result.converged && inner_ok
          && result.est_error
                 <= std::max(cfg.rel_tol * std::abs(result.value), cfg.abs_tol);
    return result;
}

}  // namespace uavss
