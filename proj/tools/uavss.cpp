// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: analytic sweeps, height optimization and
// Monte Carlo validation of UAV/ground spectrum sharing.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uavss/config.hpp"
#include "uavss/run.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"UAV aerial-mesh / ground network coexistence analyzer"};
    app.set_version_flag("--version", uavss::tool_version);

    std::string config_path;
    std::string mode;
    std::string out_path;
    std::string format;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    unsigned workers = 0;
    bool strict = false;

    app.add_option("--config", config_path, "key = value configuration file")
        ->check(CLI::ExistingFile);
    app.add_option("--mode", mode,
                   "p1-sweep | p2-sweep | tc-sweep | optimize | validate");
    auto* seed_opt = app.add_option("--seed", seed, "Monte Carlo master seed");
    auto* trials_opt
        = app.add_option("--trials", trials, "Monte Carlo trials per point");
    auto* workers_opt = app.add_option(
        "--workers", workers, "worker threads (results do not depend on it)");
    app.add_option("--out", out_path, "output file (default: stdout)");
    app.add_option("--format", format, "csv | json");
    app.add_option("--set", overrides, "override one key: --set key=value");
    app.add_flag("--strict-feasible", strict,
                 "exit with code 4 when optimization is infeasible");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int code = app.exit(e);
        return code == 0 ? 0 : uavss::exit_config;
    }

    uavss::RunConfig cfg;
    try
    {
        if (!config_path.empty())
        {
            cfg = uavss::load_config(config_path);
        }
        for (auto const& kv : overrides)
        {
            auto eq = kv.find('=');
            if (eq == std::string::npos)
            {
                throw uavss::ConfigError("--set expects key=value, got '" + kv
                                         + "'");
            }
            uavss::set_config_value(cfg, uavss::detail::trim(kv.substr(0, eq)),
                                    kv.substr(eq + 1));
        }
        if (!mode.empty())
        {
            cfg.mode = uavss::parse_mode(mode);
        }
        if (!format.empty())
        {
            uavss::set_config_value(cfg, "output.format", format);
        }
        if (*seed_opt)
        {
            cfg.mc.seed = seed;
        }
        if (*trials_opt)
        {
            cfg.mc.trials = trials;
        }
        if (*workers_opt)
        {
            cfg.mc.workers = workers;
        }
        if (!out_path.empty())
        {
            cfg.output_path = out_path;
        }
        cfg.strict_feasible = strict;
    }
    catch (uavss::ConfigError const& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return uavss::exit_config;
    }

    return uavss::run(cfg, std::cout, std::cerr);
}
