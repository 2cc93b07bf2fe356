// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "analysis.hpp"
#include "params.hpp"
#include "quadrature.hpp"

namespace uavss
{

struct OptimizerConfig
{
    double alpha_constraint = 0.4;  //!< minimum ground-user coverage
    double h1_min = 0;
    double h1_max = 100;
    std::size_t grid_points = 200;
    std::size_t refine_iters = 30;
};

enum class OptimumStatus
{
    found,
    infeasible
};

struct Segment
{
    double lo;
    double hi;
};

struct Optimum
{
    double h1_star = 0;
    double tu_star = 0;
    double p1_at_star = 0;
    std::vector<Segment> feasible_segments;
    OptimumStatus status = OptimumStatus::infeasible;

    // The scan behind the result, one entry per grid node.
    std::vector<double> grid_h1;
    std::vector<double> grid_p1;
    std::vector<double> grid_tu;
};

inline void validate(OptimizerConfig const& opt)
{
    detail::require(opt.alpha_constraint >= 0 && opt.alpha_constraint <= 1,
                    "alpha_constraint", "must lie in [0, 1]");
    detail::require(opt.h1_min >= 0, "h1_min", "must be nonnegative");
    detail::require(opt.h1_min < opt.h1_max, "h1_max",
                    "must exceed h1_min");
    detail::require(opt.grid_points >= 2, "grid_points",
                    "must be at least 2");
}

/// Evenly spaced grid of `n` nodes on [lo, hi].
inline std::vector<double> linear_grid(double lo, double hi, std::size_t n)
{
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        out[i] = n == 1 ? lo
                        : lo + (hi - lo) * static_cast<double>(i)
                                   / static_cast<double>(n - 1);
    }
    return out;
}

/// Maximal runs of feasible grid nodes, as [first node, last node].
inline std::vector<Segment> feasible_runs(std::vector<double> const& grid,
                                          std::vector<bool> const& feasible)
{
    std::vector<Segment> runs;
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        if (!feasible[i])
        {
            continue;
        }
        if (i > 0 && feasible[i - 1])
        {
            runs.back().hi = grid[i];
        }
        else
        {
            runs.push_back({grid[i], grid[i]});
        }
    }
    return runs;
}

/*!
 * Height h1 that maximizes UAV transmission capacity subject to P1 >= alpha.
 *
 * The feasible set over h1 can be disconnected, and capacity is not unimodal
 * in h1, so the search scans a grid first. The best feasible node is then
 * refined by golden-section search inside its bracketing interval (clipped to
 * its feasible segment); the refined point replaces the node only if it is
 * feasible on exact re-evaluation and strictly better. Ties between nodes go
 * to the smallest h1.
 */
inline Optimum optimize_height(SystemParams const& p,
                               double delta_h,
                               LosEnvironment const& env,
                               ServingLinkGeometry const& geom,
                               OptimizerConfig const& opt,
                               QuadratureConfig const& qcfg = {})
{
    validate(opt);
    Optimum out;
    out.grid_h1 = linear_grid(opt.h1_min, opt.h1_max, opt.grid_points);

    auto p1_at = [&](double h1) {
        return coverage_ground(p, {h1, delta_h}, env, qcfg).p1;
    };
    auto tu_at = [&](double h1) {
        return transmission_capacity(p, {h1, delta_h}, env, geom, qcfg);
    };

    std::vector<bool> feasible;
    std::size_t best = out.grid_h1.size();
    for (std::size_t i = 0; i < out.grid_h1.size(); ++i)
    {
        double h1 = out.grid_h1[i];
        out.grid_p1.push_back(p1_at(h1));
        out.grid_tu.push_back(tu_at(h1));
        bool ok = out.grid_p1[i] >= opt.alpha_constraint;
        feasible.push_back(ok);
        if (ok && (best == out.grid_h1.size()
                   || out.grid_tu[i] > out.grid_tu[best]))
        {
            best = i;
        }
    }
    out.feasible_segments = feasible_runs(out.grid_h1, feasible);
    if (best == out.grid_h1.size())
    {
        out.status = OptimumStatus::infeasible;
        return out;
    }

    out.status = OptimumStatus::found;
    out.h1_star = out.grid_h1[best];
    out.tu_star = out.grid_tu[best];
    out.p1_at_star = out.grid_p1[best];

    auto const& seg = *std::find_if(
        out.feasible_segments.begin(), out.feasible_segments.end(),
        [&](Segment const& s) { return s.lo <= out.h1_star && out.h1_star <= s.hi; });
    double lo = best > 0 ? out.grid_h1[best - 1] : out.grid_h1[best];
    double hi = best + 1 < out.grid_h1.size() ? out.grid_h1[best + 1]
                                              : out.grid_h1[best];
    lo = std::max(lo, seg.lo);
    hi = std::min(hi, seg.hi);
    if (opt.refine_iters == 0 || !(hi > lo))
    {
        return out;
    }

    double const inv_phi = 0.5 * (std::sqrt(5.0) - 1);
    double a = lo;
    double b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = tu_at(x1);
    double f2 = tu_at(x2);
    double cand = f1 >= f2 ? x1 : x2;
    double cand_tu = std::max(f1, f2);
    for (std::size_t it = 0; it < opt.refine_iters; ++it)
    {
        if (f1 >= f2)
        {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = tu_at(x1);
        }
        else
        {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = tu_at(x2);
        }
        for (auto [x, f] : {std::pair{x1, f1}, std::pair{x2, f2}})
        {
            if (f > cand_tu)
            {
                cand = x;
                cand_tu = f;
            }
        }
    }

    if (cand_tu > out.tu_star)
    {
        double p1 = p1_at(cand);
        if (p1 >= opt.alpha_constraint)
        {
            out.h1_star = cand;
            out.tu_star = cand_tu;
            out.p1_at_star = p1;
        }
    }
    return out;
}

//---------------------------------------------------------------------------//
// SWEEP
//---------------------------------------------------------------------------//

struct SweepRow
{
    double h1 = 0;
    double delta_h = 0;
    double p1 = 0;
    double p2 = 0;
    double tu = 0;
    double laplace_ground = 0;
    double h1_kernel = 0;
    double h2_kernel = 0;
    double h3_kernel = 0;
    double h4_kernel = 0;
    std::vector<bool> feasible;  //!< one flag per configured alpha
};

struct SweepResult
{
    std::vector<double> alphas;
    std::vector<SweepRow> rows;  //!< h1 outer, delta_h inner
};

namespace detail
{
inline void require_sorted_grid(std::vector<double> const& grid,
                                char const* name)
{
    require(!grid.empty(), name, "grid must not be empty");
    require(std::is_sorted(grid.begin(), grid.end()), name,
            "grid must be sorted ascending");
}
}  // namespace detail

/// Analytic P1, P2 and capacity over the (h1, delta_h) grid.
inline SweepResult sweep(SystemParams const& p,
                         LosEnvironment const& env,
                         ServingLinkGeometry const& geom,
                         std::vector<double> const& h1_grid,
                         std::vector<double> const& dh_grid,
                         std::vector<double> const& alphas = {},
                         QuadratureConfig const& qcfg = {})
{
    detail::require_sorted_grid(h1_grid, "h1");
    detail::require_sorted_grid(dh_grid, "delta_h");

    SweepResult out;
    out.alphas = alphas;
    out.rows.reserve(h1_grid.size() * dh_grid.size());
    for (double h1 : h1_grid)
    {
        for (double dh : dh_grid)
        {
            AirspaceSlab slab{h1, dh};
            auto ground = coverage_ground(p, slab, env, qcfg);
            auto uav = coverage_uav(p, slab, env, geom, qcfg);
            SweepRow row;
            row.h1 = h1;
            row.delta_h = dh;
            row.p1 = ground.p1;
            row.p2 = uav.p2;
            row.tu = transmission_capacity(p.lambda_u, uav.p2, p.beta_u);
            row.laplace_ground = ground.laplace_ground;
            row.h1_kernel = ground.h1_kernel;
            row.h2_kernel = ground.h2_kernel;
            row.h3_kernel = uav.h3_kernel;
            row.h4_kernel = uav.h4_kernel;
            for (double a : alphas)
            {
                row.feasible.push_back(ground.p1 >= a);
            }
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

}  // namespace uavss
