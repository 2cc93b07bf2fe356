// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "analysis.hpp"
#include "montecarlo.hpp"
#include "optimizer.hpp"
#include "params.hpp"
#include "quadrature.hpp"

namespace uavss
{

inline constexpr char const* tool_version = "uavss 1.0.0";

enum class RunMode
{
    p1_sweep,
    p2_sweep,
    tc_sweep,
    optimize,
    validate
};

enum class OutputFormat
{
    csv,
    json
};

/// A configuration that cannot be parsed or violates an invariant.
class ConfigError : public std::runtime_error
{
  public:
    explicit ConfigError(std::string const& what, int line = 0, int column = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line)
                                            + ", column "
                                            + std::to_string(column) + ": "
                                            + what
                                      : what)
        , line_(line)
        , column_(column)
    {
    }

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

  private:
    int line_;
    int column_;
};

/// Everything one CLI run needs, fully resolved.
struct RunConfig
{
    RunMode mode = RunMode::p1_sweep;
    SystemParams params;
    LosEnvironment env;
    ServingLinkGeometry geom;
    QuadratureConfig quad;
    std::vector<double> h1_grid = linear_grid(0, 100, 5);
    std::vector<double> dh_grid = linear_grid(25, 100, 4);
    std::vector<double> alphas;  //!< feasibility flags reported by sweeps
    McConfig mc;
    OptimizerConfig opt;
    double opt_delta_h = 20;  //!< slab thickness held fixed while optimizing
    bool strict_feasible = false;
    std::string output_path;
    OutputFormat output_format = OutputFormat::csv;
};

//---------------------------------------------------------------------------//
// VALUE PARSING AND FORMATTING
//---------------------------------------------------------------------------//

namespace detail
{
inline std::string_view trim(std::string_view s)
{
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    auto b = std::find_if(s.begin(), s.end(), not_space);
    auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
    return b < e ? std::string_view(&*b, static_cast<std::size_t>(e - b))
                 : std::string_view{};
}

inline double parse_double(std::string_view s)
{
    s = trim(s);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    {
        throw std::invalid_argument("expected a number, got '"
                                    + std::string(s) + "'");
    }
    return v;
}

inline std::uint64_t parse_u64(std::string_view s)
{
    s = trim(s);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    {
        throw std::invalid_argument("expected a nonnegative integer, got '"
                                    + std::string(s) + "'");
    }
    return v;
}

inline bool parse_bool(std::string_view s)
{
    s = trim(s);
    if (s == "true" || s == "1" || s == "yes" || s == "on")
    {
        return true;
    }
    if (s == "false" || s == "0" || s == "no" || s == "off")
    {
        return false;
    }
    throw std::invalid_argument("expected true or false, got '"
                                + std::string(s) + "'");
}

/// "a, b, c" or "lo:hi:n" (n evenly spaced values).
inline std::vector<double> parse_grid(std::string_view s)
{
    s = trim(s);
    std::vector<double> out;
    if (s.empty())
    {
        return out;
    }
    if (s.find(':') != std::string_view::npos)
    {
        auto c1 = s.find(':');
        auto c2 = s.find(':', c1 + 1);
        if (c2 == std::string_view::npos)
        {
            throw std::invalid_argument("range needs the form lo:hi:n");
        }
        double lo = parse_double(s.substr(0, c1));
        double hi = parse_double(s.substr(c1 + 1, c2 - c1 - 1));
        auto n = parse_u64(s.substr(c2 + 1));
        if (n < 1)
        {
            throw std::invalid_argument("range needs at least one point");
        }
        return linear_grid(lo, hi, n);
    }
    std::size_t start = 0;
    while (start <= s.size())
    {
        auto comma = s.find(',', start);
        auto end = comma == std::string_view::npos ? s.size() : comma;
        out.push_back(parse_double(s.substr(start, end - start)));
        if (comma == std::string_view::npos)
        {
            break;
        }
        start = comma + 1;
    }
    return out;
}

inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_grid(std::vector<double> const& g)
{
    std::string out;
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        out += (i ? "," : "") + format_double(g[i]);
    }
    return out;
}

template<class E>
struct EnumName
{
    E value;
    char const* name;
};

template<class E, std::size_t N>
E parse_enum(std::string_view s, EnumName<E> const (&names)[N])
{
    s = trim(s);
    std::string allowed;
    for (auto const& n : names)
    {
        if (s == n.name)
        {
            return n.value;
        }
        allowed += allowed.empty() ? n.name : std::string("|") + n.name;
    }
    throw std::invalid_argument("expected one of " + allowed + ", got '"
                                + std::string(s) + "'");
}

template<class E, std::size_t N>
char const* enum_name(E v, EnumName<E> const (&names)[N])
{
    for (auto const& n : names)
    {
        if (n.value == v)
        {
            return n.name;
        }
    }
    return "?";
}

inline constexpr EnumName<RunMode> mode_names[] = {
    {RunMode::p1_sweep, "p1-sweep"},
    {RunMode::p2_sweep, "p2-sweep"},
    {RunMode::tc_sweep, "tc-sweep"},
    {RunMode::optimize, "optimize"},
    {RunMode::validate, "validate"},
};
inline constexpr EnumName<OutputFormat> format_names[] = {
    {OutputFormat::csv, "csv"},
    {OutputFormat::json, "json"},
};
inline constexpr EnumName<UavDensityUnit> unit_names[] = {
    {UavDensityUnit::per_cubic_meter, "per_m3"},
    {UavDensityUnit::per_square_meter, "per_m2"},
};
inline constexpr EnumName<ServingConvention> convention_names[] = {
    {ServingConvention::midpoint_height, "midpoint-height"},
    {ServingConvention::min_height, "min-height"},
    {ServingConvention::explicit_height, "explicit"},
};
inline constexpr EnumName<TruncationPolicy> policy_names[] = {
    {TruncationPolicy::tail_bound, "tail-bound"},
    {TruncationPolicy::fixed_radius, "fixed-radius"},
};
inline constexpr EnumName<InterferenceModel> model_names[] = {
    {InterferenceModel::independent_marks, "independent-marks"},
    {InterferenceModel::product_form, "product-form"},
};

struct ConfigKey
{
    char const* name;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(RunConfig const&)> get;
};

#define UAVSS_DOUBLE_KEY(NAME, MEMBER)                                        \
    ConfigKey                                                                 \
    {                                                                         \
        NAME,                                                                 \
            [](RunConfig& c, std::string_view v) {                            \
                c.MEMBER = parse_double(v);                                   \
            },                                                                \
            [](RunConfig const& c) { return format_double(c.MEMBER); }        \
    }
#define UAVSS_U64_KEY(NAME, MEMBER)                                           \
    ConfigKey                                                                 \
    {                                                                         \
        NAME,                                                                 \
            [](RunConfig& c, std::string_view v) {                            \
                c.MEMBER = static_cast<decltype(c.MEMBER)>(parse_u64(v));     \
            },                                                                \
            [](RunConfig const& c) { return std::to_string(c.MEMBER); }       \
    }
#define UAVSS_BOOL_KEY(NAME, MEMBER)                                          \
    ConfigKey                                                                 \
    {                                                                         \
        NAME,                                                                 \
            [](RunConfig& c, std::string_view v) {                            \
                c.MEMBER = parse_bool(v);                                     \
            },                                                                \
            [](RunConfig const& c) {                                          \
                return std::string(c.MEMBER ? "true" : "false");              \
            }                                                                 \
    }
#define UAVSS_ENUM_KEY(NAME, MEMBER, TABLE)                                   \
    ConfigKey                                                                 \
    {                                                                         \
        NAME,                                                                 \
            [](RunConfig& c, std::string_view v) {                            \
                c.MEMBER = parse_enum(v, TABLE);                              \
            },                                                                \
            [](RunConfig const& c) {                                          \
                return std::string(enum_name(c.MEMBER, TABLE));               \
            }                                                                 \
    }
#define UAVSS_GRID_KEY(NAME, MEMBER)                                          \
    ConfigKey                                                                 \
    {                                                                         \
        NAME,                                                                 \
            [](RunConfig& c, std::string_view v) {                            \
                c.MEMBER = parse_grid(v);                                     \
            },                                                                \
            [](RunConfig const& c) { return format_grid(c.MEMBER); }          \
    }

/// Every accepted key, in the order used for metadata dumps.
inline std::vector<ConfigKey> const& config_keys()
{
    static std::vector<ConfigKey> const keys = {
        UAVSS_ENUM_KEY("run.mode", mode, mode_names),
        UAVSS_DOUBLE_KEY("params.p_u", params.p_u),
        UAVSS_DOUBLE_KEY("params.p_d", params.p_d),
        UAVSS_DOUBLE_KEY("params.alpha_u", params.alpha_u),
        UAVSS_DOUBLE_KEY("params.alpha_d", params.alpha_d),
        UAVSS_DOUBLE_KEY("params.lambda_u", params.lambda_u),
        UAVSS_ENUM_KEY("params.lambda_u_unit", params.lambda_u_unit,
                       unit_names),
        UAVSS_DOUBLE_KEY("params.lambda_d", params.lambda_d),
        UAVSS_DOUBLE_KEY("params.beta_d", params.beta_d),
        UAVSS_DOUBLE_KEY("params.beta_u", params.beta_u),
        UAVSS_DOUBLE_KEY("params.noise", params.noise),
        UAVSS_DOUBLE_KEY("params.d0", params.d0),
        UAVSS_DOUBLE_KEY("params.x0", params.x0),
        UAVSS_DOUBLE_KEY("params.aloha_p", params.aloha_p),
        UAVSS_BOOL_KEY("params.aloha_ground", params.aloha_ground),
        UAVSS_BOOL_KEY("params.p2_include_noise", params.p2_include_noise),
        UAVSS_DOUBLE_KEY("env.b", env.b),
        UAVSS_DOUBLE_KEY("env.c", env.c),
        UAVSS_DOUBLE_KEY("env.eta", env.eta),
        UAVSS_ENUM_KEY("geom.convention", geom.convention, convention_names),
        UAVSS_DOUBLE_KEY("geom.h_serving", geom.h_serving),
        UAVSS_DOUBLE_KEY("quad.rel_tol", quad.rel_tol),
        UAVSS_DOUBLE_KEY("quad.abs_tol", quad.abs_tol),
        UAVSS_ENUM_KEY("quad.r_truncation_policy", quad.r_truncation_policy,
                       policy_names),
        UAVSS_DOUBLE_KEY("quad.r_max", quad.r_max),
        UAVSS_U64_KEY("quad.max_subdivisions", quad.max_subdivisions),
        UAVSS_GRID_KEY("grid.h1", h1_grid),
        UAVSS_GRID_KEY("grid.delta_h", dh_grid),
        UAVSS_GRID_KEY("grid.alphas", alphas),
        UAVSS_U64_KEY("mc.trials", mc.trials),
        UAVSS_U64_KEY("mc.seed", mc.seed),
        UAVSS_DOUBLE_KEY("mc.ground_disk_radius", mc.ground_disk_radius),
        UAVSS_DOUBLE_KEY("mc.uav_cylinder_radius", mc.uav_cylinder_radius),
        UAVSS_DOUBLE_KEY("mc.ci_level", mc.ci_level),
        UAVSS_ENUM_KEY("mc.model", mc.model, model_names),
        UAVSS_BOOL_KEY("mc.auto_radius", mc.auto_radius),
        UAVSS_DOUBLE_KEY("mc.tail_fraction", mc.tail_fraction),
        UAVSS_DOUBLE_KEY("opt.alpha", opt.alpha_constraint),
        UAVSS_DOUBLE_KEY("opt.delta_h", opt_delta_h),
        UAVSS_DOUBLE_KEY("opt.h1_min", opt.h1_min),
        UAVSS_DOUBLE_KEY("opt.h1_max", opt.h1_max),
        UAVSS_U64_KEY("opt.grid_points", opt.grid_points),
        UAVSS_U64_KEY("opt.refine_iters", opt.refine_iters),
        UAVSS_ENUM_KEY("output.format", output_format, format_names),
    };
    return keys;
}

#undef UAVSS_DOUBLE_KEY
#undef UAVSS_U64_KEY
#undef UAVSS_BOOL_KEY
#undef UAVSS_ENUM_KEY
#undef UAVSS_GRID_KEY

/// Keys accepted on input but not dumped: they expand to other keys.
inline bool apply_alias(RunConfig& c, std::string_view key, std::string_view v)
{
    if (key == "params.beta")
    {
        c.params.beta_d = c.params.beta_u = parse_double(v);
        return true;
    }
    if (key == "output.path")
    {
        c.output_path = std::string(trim(v));
        return true;
    }
    if (key == "mc.workers")
    {
        c.mc.workers = static_cast<unsigned>(parse_u64(v));
        return true;
    }
    return false;
}
}  // namespace detail

//---------------------------------------------------------------------------//
// CONFIG API
//---------------------------------------------------------------------------//

/// Set one key; throws ConfigError naming the key on a bad value.
inline void set_config_value(RunConfig& cfg,
                             std::string_view key,
                             std::string_view value)
{
    try
    {
        if (detail::apply_alias(cfg, key, value))
        {
            return;
        }
        for (auto const& k : detail::config_keys())
        {
            if (key == k.name)
            {
                k.set(cfg, value);
                return;
            }
        }
    }
    catch (std::invalid_argument const& e)
    {
        throw ConfigError(std::string(key) + ": " + e.what());
    }
    throw ConfigError("unknown key: " + std::string(key));
}

/// Check every invariant; the message names the offending key.
inline void validate(RunConfig const& cfg)
{
    auto wrap = [](char const* prefix, auto&& check) {
        try
        {
            check();
        }
        catch (InvalidParameter const& e)
        {
            throw ConfigError(std::string(prefix) + e.what());
        }
    };
    wrap("params.", [&] { validate(cfg.params); });
    wrap("env.", [&] { validate(cfg.env); });
    wrap("quad.", [&] { validate(cfg.quad); });
    wrap("mc.", [&] { validate(cfg.mc); });
    wrap("opt.", [&] { validate(cfg.opt); });
    wrap("opt.", [&] {
        detail::require(cfg.opt_delta_h >= 0, "delta_h", "must be nonnegative");
    });
    wrap("grid.", [&] {
        detail::require_sorted_grid(cfg.h1_grid, "h1");
        detail::require_sorted_grid(cfg.dh_grid, "delta_h");
        detail::require(cfg.h1_grid.front() >= 0, "h1", "must be nonnegative");
        detail::require(cfg.dh_grid.front() >= 0, "delta_h",
                        "must be nonnegative");
        for (double a : cfg.alphas)
        {
            detail::require(a >= 0 && a <= 1, "alphas", "must lie in [0, 1]");
        }
    });
    if (cfg.geom.convention == ServingConvention::explicit_height)
    {
        wrap("geom.", [&] {
            for (double h1 : cfg.h1_grid)
            {
                for (double dh : cfg.dh_grid)
                {
                    validate(cfg.geom, AirspaceSlab{h1, dh});
                }
            }
        });
    }
}

/*!
 * Parse flat `key = value` text. Blank lines and lines starting with '#' or
 * ';' are ignored. Unset keys keep their defaults; unknown keys are collected
 * and reported together.
 */
inline RunConfig parse_config(std::string_view text)
{
    RunConfig cfg;
    std::vector<std::string> unknown;
    std::map<std::string, int> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        auto eol = text.find('\n', pos);
        auto raw = text.substr(pos, eol == std::string_view::npos
                                        ? std::string_view::npos
                                        : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';')
        {
            continue;
        }
        auto eq = raw.find('=');
        if (eq == std::string_view::npos)
        {
            int col = static_cast<int>(raw.find_first_not_of(" \t")) + 1;
            throw ConfigError("expected 'key = value'", line_no, col);
        }
        std::string key(detail::trim(raw.substr(0, eq)));
        auto value = raw.substr(eq + 1);
        if (key.empty())
        {
            throw ConfigError("missing key before '='", line_no,
                              static_cast<int>(eq) + 1);
        }
        if (auto [it, fresh] = seen.emplace(key, line_no); !fresh)
        {
            throw ConfigError("duplicate key " + key + " (first on line "
                                  + std::to_string(it->second) + ")",
                              line_no, 1);
        }
        try
        {
            set_config_value(cfg, key, value);
        }
        catch (ConfigError const& e)
        {
            if (std::string_view(e.what()).starts_with("unknown key"))
            {
                unknown.push_back(key);
                continue;
            }
            throw ConfigError(e.what(), line_no, static_cast<int>(eq) + 2);
        }
    }
    if (!unknown.empty())
    {
        std::string list;
        for (auto const& k : unknown)
        {
            list += (list.empty() ? "" : ", ") + k;
        }
        throw ConfigError("unknown keys: " + list);
    }
    return cfg;
}

inline RunConfig load_config(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError("cannot read config file " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    auto cfg = parse_config(buf.str());
    validate(cfg);
    return cfg;
}

/// Resolved configuration as ordered (key, value) pairs.
inline std::vector<std::pair<std::string, std::string>>
resolved_entries(RunConfig const& cfg)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (auto const& k : detail::config_keys())
    {
        out.emplace_back(k.name, k.get(cfg));
    }
    return out;
}

inline char const* mode_name(RunMode m)
{
    return detail::enum_name(m, detail::mode_names);
}

inline RunMode parse_mode(std::string_view s)
{
    try
    {
        return detail::parse_enum(s, detail::mode_names);
    }
    catch (std::invalid_argument const& e)
    {
        throw ConfigError(std::string("run.mode: ") + e.what());
    }
}

}  // namespace uavss
