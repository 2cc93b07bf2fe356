// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "config.hpp"
#include "montecarlo.hpp"
#include "optimizer.hpp"

namespace uavss
{

/// Exit codes of the command-line tool.
enum ExitCode : int
{
    exit_ok = 0,
    exit_failure = 1,
    exit_config = 2,
    exit_nonconvergence = 3,
    exit_infeasible = 4
};

struct ValidationPoint
{
    double h1 = 0;
    double delta_h = 0;
    std::string quantity;  //!< "p1" or "p2"
    double analytic = 0;
    CoverageEstimate mc;
    bool inside_ci = false;
};

struct ValidationReport
{
    std::vector<ValidationPoint> points;
    double pass_fraction = 0;
};

/*!
 * Compare analytic P1 and P2 with Monte Carlo estimates over a grid.
 *
 * Grid point k (h1 outer, delta_h inner) simulates with the seed derived by
 * `for_grid_point(mc, k)`, so points do not share random streams.
 */
inline ValidationReport validate_grid(SystemParams const& p,
                                      LosEnvironment const& env,
                                      ServingLinkGeometry const& geom,
                                      std::vector<double> const& h1_grid,
                                      std::vector<double> const& dh_grid,
                                      McConfig const& mc,
                                      QuadratureConfig const& qcfg = {})
{
    ValidationReport report;
    std::uint64_t k = 0;
    std::size_t inside = 0;
    for (double h1 : h1_grid)
    {
        for (double dh : dh_grid)
        {
            AirspaceSlab slab{h1, dh};
            auto point_mc = for_grid_point(mc, k++);
            auto ground = coverage_ground(p, slab, env, qcfg);
            auto uav = coverage_uav(p, slab, env, geom, qcfg);
            auto sim1 = simulate_ground_coverage(p, slab, env, point_mc);
            auto sim2 = simulate_uav_coverage(p, slab, env, geom, point_mc);
            for (auto [name, value, est] :
                 {std::tuple{"p1", ground.p1, sim1},
                  std::tuple{"p2", uav.p2, sim2}})
            {
                ValidationPoint vp{h1, dh, name, value, est,
                                   est.contains(value)};
                inside += vp.inside_ci ? 1 : 0;
                report.points.push_back(vp);
            }
        }
    }
    report.pass_fraction = report.points.empty()
                               ? 0.0
                               : static_cast<double>(inside)
                                     / static_cast<double>(report.points.size());
    return report;
}

//---------------------------------------------------------------------------//
// OUTPUT
//---------------------------------------------------------------------------//

namespace detail
{
/// Scientific notation with 17 significant digits.
inline std::string sci(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline void write_csv_metadata(std::ostream& os, RunConfig const& cfg)
{
    os << "# tool = " << tool_version << '\n';
    os << "# seed = " << cfg.mc.seed << '\n';
    for (auto const& [k, v] : resolved_entries(cfg))
    {
        os << "# " << k << " = " << v << '\n';
    }
}

inline nlohmann::json metadata_json(RunConfig const& cfg)
{
    nlohmann::json config = nlohmann::json::object();
    for (auto const& [k, v] : resolved_entries(cfg))
    {
        config[k] = v;
    }
    return {{"tool", tool_version}, {"seed", cfg.mc.seed}, {"config", config}};
}

inline std::string alpha_column(double a)
{
    return "feasible_alpha_" + format_double(a);
}

inline void write_sweep(std::ostream& os,
                        RunConfig const& cfg,
                        SweepResult const& res)
{
    if (cfg.output_format == OutputFormat::json)
    {
        nlohmann::json rows = nlohmann::json::array();
        for (auto const& r : res.rows)
        {
            nlohmann::json row = {{"h1", r.h1},
                                  {"delta_h", r.delta_h},
                                  {"p1", r.p1},
                                  {"p2", r.p2},
                                  {"tu", r.tu},
                                  {"laplace_ground", r.laplace_ground},
                                  {"h1_kernel", r.h1_kernel},
                                  {"h2_kernel", r.h2_kernel},
                                  {"h3_kernel", r.h3_kernel},
                                  {"h4_kernel", r.h4_kernel}};
            for (std::size_t i = 0; i < res.alphas.size(); ++i)
            {
                row[alpha_column(res.alphas[i])] = bool(r.feasible[i]);
            }
            rows.push_back(std::move(row));
        }
        nlohmann::json doc
            = {{"metadata", metadata_json(cfg)}, {"rows", std::move(rows)}};
        os << doc.dump(2) << '\n';
        return;
    }

    write_csv_metadata(os, cfg);
    os << "h1,delta_h,p1,p2,tu,laplace_ground,h1_kernel,h2_kernel,"
          "h3_kernel,h4_kernel";
    for (double a : res.alphas)
    {
        os << ',' << alpha_column(a);
    }
    os << '\n';
    for (auto const& r : res.rows)
    {
        os << sci(r.h1) << ',' << sci(r.delta_h) << ',' << sci(r.p1) << ','
           << sci(r.p2) << ',' << sci(r.tu) << ',' << sci(r.laplace_ground)
           << ',' << sci(r.h1_kernel) << ',' << sci(r.h2_kernel) << ','
           << sci(r.h3_kernel) << ',' << sci(r.h4_kernel);
        for (bool f : r.feasible)
        {
            os << ',' << (f ? 1 : 0);
        }
        os << '\n';
    }
}

inline nlohmann::json optimum_json(Optimum const& o, double alpha)
{
    nlohmann::json segments = nlohmann::json::array();
    for (auto const& s : o.feasible_segments)
    {
        segments.push_back({s.lo, s.hi});
    }
    bool found = o.status == OptimumStatus::found;
    return {{"status", found ? "found" : "infeasible"},
            {"alpha", alpha},
            {"h1_star", found ? nlohmann::json(o.h1_star) : nlohmann::json()},
            {"tu_star", found ? nlohmann::json(o.tu_star) : nlohmann::json()},
            {"p1_at_star",
             found ? nlohmann::json(o.p1_at_star) : nlohmann::json()},
            {"feasible_segments", std::move(segments)}};
}

inline void
write_optimum(std::ostream& os, RunConfig const& cfg, Optimum const& o)
{
    double alpha = cfg.opt.alpha_constraint;
    if (cfg.output_format == OutputFormat::json)
    {
        nlohmann::json scan = nlohmann::json::array();
        for (std::size_t i = 0; i < o.grid_h1.size(); ++i)
        {
            scan.push_back({{"h1", o.grid_h1[i]},
                            {"p1", o.grid_p1[i]},
                            {"tu", o.grid_tu[i]},
                            {"feasible", o.grid_p1[i] >= alpha}});
        }
        nlohmann::json doc = {{"metadata", metadata_json(cfg)},
                              {"optimum", optimum_json(o, alpha)},
                              {"scan", std::move(scan)}};
        os << doc.dump(2) << '\n';
        return;
    }

    write_csv_metadata(os, cfg);
    bool found = o.status == OptimumStatus::found;
    os << "# status = " << (found ? "found" : "infeasible") << '\n';
    if (found)
    {
        os << "# h1_star = " << sci(o.h1_star) << '\n';
        os << "# tu_star = " << sci(o.tu_star) << '\n';
        os << "# p1_at_star = " << sci(o.p1_at_star) << '\n';
    }
    for (auto const& s : o.feasible_segments)
    {
        os << "# feasible_segment = " << sci(s.lo) << ',' << sci(s.hi) << '\n';
    }
    os << "h1,p1,tu,feasible\n";
    for (std::size_t i = 0; i < o.grid_h1.size(); ++i)
    {
        os << sci(o.grid_h1[i]) << ',' << sci(o.grid_p1[i]) << ','
           << sci(o.grid_tu[i]) << ',' << (o.grid_p1[i] >= alpha ? 1 : 0)
           << '\n';
    }
}

inline void write_validation(std::ostream& os,
                             RunConfig const& cfg,
                             ValidationReport const& rep)
{
    if (cfg.output_format == OutputFormat::json)
    {
        nlohmann::json points = nlohmann::json::array();
        for (auto const& v : rep.points)
        {
            points.push_back({{"h1", v.h1},
                              {"delta_h", v.delta_h},
                              {"quantity", v.quantity},
                              {"analytic", v.analytic},
                              {"mc_estimate", v.mc.p_hat},
                              {"ci_low", v.mc.ci_low},
                              {"ci_high", v.mc.ci_high},
                              {"ci_half_width", v.mc.ci_half_width},
                              {"trials", v.mc.trials},
                              {"seed", v.mc.seed},
                              {"inside_ci", v.inside_ci}});
        }
        nlohmann::json doc = {{"metadata", metadata_json(cfg)},
                              {"points", std::move(points)},
                              {"pass_fraction", rep.pass_fraction}};
        os << doc.dump(2) << '\n';
        return;
    }

    write_csv_metadata(os, cfg);
    os << "# pass_fraction = " << sci(rep.pass_fraction) << '\n';
    os << "h1,delta_h,quantity,analytic,mc_estimate,ci_low,ci_high,"
          "ci_half_width,trials,seed,inside_ci\n";
    for (auto const& v : rep.points)
    {
        os << sci(v.h1) << ',' << sci(v.delta_h) << ',' << v.quantity << ','
           << sci(v.analytic) << ',' << sci(v.mc.p_hat) << ','
           << sci(v.mc.ci_low) << ',' << sci(v.mc.ci_high) << ','
           << sci(v.mc.ci_half_width) << ',' << v.mc.trials << ','
           << v.mc.seed << ',' << (v.inside_ci ? 1 : 0) << '\n';
    }
}
}  // namespace detail

//---------------------------------------------------------------------------//
// RUN
//---------------------------------------------------------------------------//

/*!
 * Execute one configured job and write its artifact.
 *
 * The artifact goes to `cfg.output_path`, or to `out` when the path is
 * empty. Diagnostics go to `diag`. Returns an `ExitCode`.
 */
inline int run(RunConfig const& cfg, std::ostream& out, std::ostream& diag)
{
    try
    {
        validate(cfg);

        std::ofstream file;
        std::ostream* os = &out;
        if (!cfg.output_path.empty())
        {
            file.open(cfg.output_path, std::ios::binary | std::ios::trunc);
            if (!file)
            {
                throw ConfigError("cannot write output file "
                                  + cfg.output_path);
            }
            os = &file;
        }

        int code = exit_ok;
        switch (cfg.mode)
        {
            case RunMode::p1_sweep:
            case RunMode::p2_sweep:
            case RunMode::tc_sweep: {
                auto res = sweep(cfg.params, cfg.env, cfg.geom, cfg.h1_grid,
                                 cfg.dh_grid, cfg.alphas, cfg.quad);
                detail::write_sweep(*os, cfg, res);
                break;
            }
            case RunMode::optimize: {
                auto o = optimize_height(cfg.params, cfg.opt_delta_h, cfg.env,
                                         cfg.geom, cfg.opt, cfg.quad);
                detail::write_optimum(*os, cfg, o);
                if (o.status == OptimumStatus::infeasible)
                {
                    diag << "optimize: no h1 satisfies P1 >= "
                         << cfg.opt.alpha_constraint << '\n';
                    if (cfg.strict_feasible)
                    {
                        code = exit_infeasible;
                    }
                }
                break;
            }
            case RunMode::validate: {
                auto rep = validate_grid(cfg.params, cfg.env, cfg.geom,
                                         cfg.h1_grid, cfg.dh_grid, cfg.mc,
                                         cfg.quad);
                detail::write_validation(*os, cfg, rep);
                diag << "validate: pass_fraction = " << rep.pass_fraction
                     << '\n';
                break;
            }
        }
        os->flush();
        return code;
    }
    catch (ConfigError const& e)
    {
        diag << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (InvalidParameter const& e)
    {
        diag << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (ConvergenceError const& e)
    {
        diag << "numerical error: " << e.what() << '\n';
        return exit_nonconvergence;
    }
    catch (DivergenceError const& e)
    {
        diag << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (std::exception const& e)
    {
        diag << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

}  // namespace uavss
