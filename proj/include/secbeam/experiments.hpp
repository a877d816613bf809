#ifndef SECBEAM_EXPERIMENTS_HPP
#define SECBEAM_EXPERIMENTS_HPP

// Experiment configuration, sweep drivers and result files.

#include "secbeam/cccp.hpp"
#include "secbeam/montecarlo.hpp"
#include "secbeam/oma.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace secbeam {

using json = nlohmann::json;

class ConfigError : public std::runtime_error
{
public:
    enum class Kind
    {
        MissingFile,
        Parse,
        UnknownKey,
        Type,
        Range
    };

    ConfigError(Kind kind, std::string path, const std::string& what)
        : std::runtime_error(what), kind_(kind), path_(std::move(path))
    {}

    Kind kind() const { return kind_; }
    const std::string& path() const { return path_; }

private:
    Kind kind_;
    std::string path_;
};

inline const char* to_string(ConfigError::Kind k)
{
    switch (k) {
    case ConfigError::Kind::MissingFile: return "missing file";
    case ConfigError::Kind::Parse: return "parse error";
    case ConfigError::Kind::UnknownKey: return "unknown key";
    case ConfigError::Kind::Type: return "type error";
    case ConfigError::Kind::Range: return "range error";
    }
    return "?";
}

enum class RegionMode
{
    Equal,   ///< r_c = r_e = swept value
    SweepRc, ///< r_e fixed, r_c swept
    SweepRe  ///< r_c fixed, r_e swept
};

inline const char* to_string(RegionMode m)
{
    switch (m) {
    case RegionMode::Equal: return "equal";
    case RegionMode::SweepRc: return "sweep_rc";
    case RegionMode::SweepRe: return "sweep_re";
    }
    return "?";
}

/// start, start + step, ..., up to stop (inclusive, within round-off).
inline std::vector<double> linear_grid(double start, double stop, double step)
{
    if (!(step > 0.0) || !(stop >= start) || !std::isfinite(start) || !std::isfinite(stop))
        throw std::invalid_argument("linear_grid: need step > 0 and stop >= start");
    const long long n = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i)
        g.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    return g;
}

struct ExperimentConfig
{
    ChannelProfile profile;
    std::vector<std::pair<double, double>> targets{{1.0, 0.1}, {2.0, 0.2}};
    std::vector<double> alpha_grid = linear_grid(0.0, 1.0, 0.05);
    std::vector<double> target_grid = linear_grid(0.0, 3.0, 0.1);
    RegionMode region_mode = RegionMode::Equal;
    double region_fixed = 0.1; ///< the held target in the sweep_rc / sweep_re modes
    int trials = 50;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string format = "csv";
    bool emit_svg = false;
    long long validate_samples = 100000;
    CccpOptions cccp;
};

namespace detail {

class ConfigReader
{
public:
    ConfigReader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError(ConfigError::Kind::Type, path_, key_name() + ": expected an object");
    }

    void allow(std::initializer_list<const char*> keys) const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; });
            if (!known) {
                const std::string p = child(it.key());
                throw ConfigError(ConfigError::Kind::UnknownKey, p, "unknown key '" + p + "'");
            }
        }
    }

    bool has(const char* key) const { return j_.contains(key); }
    const json& at(const char* key) const { return j_.at(key); }
    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void number(const char* key, double& out) const
    {
        if (!has(key))
            return;
        const json& v = j_.at(key);
        if (!v.is_number())
            throw type_error(key, "a number");
        out = v.get<double>();
        if (!std::isfinite(out))
            throw range_error(key, "must be finite");
    }

    template <class Int>
    void integer(const char* key, Int& out) const
    {
        if (!has(key))
            return;
        const json& v = j_.at(key);
        if (!v.is_number_integer())
            throw type_error(key, "an integer");
        if constexpr (std::is_unsigned_v<Int>) {
            if (v.is_number_unsigned() || v.get<long long>() >= 0)
                out = v.get<Int>();
            else
                throw range_error(key, "must be nonnegative");
        } else {
            out = v.get<Int>();
        }
    }

    void boolean(const char* key, bool& out) const
    {
        if (!has(key))
            return;
        if (!j_.at(key).is_boolean())
            throw type_error(key, "a boolean");
        out = j_.at(key).get<bool>();
    }

    void string(const char* key, std::string& out) const
    {
        if (!has(key))
            return;
        if (!j_.at(key).is_string())
            throw type_error(key, "a string");
        out = j_.at(key).get<std::string>();
    }

    ConfigError type_error(const char* key, const char* expected) const
    {
        const std::string p = child(key);
        return ConfigError(ConfigError::Kind::Type, p, p + ": expected " + expected);
    }

    ConfigError range_error(const char* key, const std::string& why) const
    {
        const std::string p = child(key);
        return ConfigError(ConfigError::Kind::Range, p, p + ": " + why);
    }

private:
    std::string key_name() const { return path_.empty() ? "config" : path_; }

    const json& j_;
    std::string path_;
};

inline std::vector<double> read_grid(const ConfigReader& r, const char* key, std::vector<double> fallback)
{
    if (!r.has(key))
        return fallback;
    const json& v = r.at(key);
    const std::string path = r.child(key);
    std::vector<double> g;
    if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number())
                throw ConfigError(ConfigError::Kind::Type, path + "[" + std::to_string(i) + "]",
                                  path + "[" + std::to_string(i) + "]: expected a number");
            g.push_back(v[i].get<double>());
        }
    } else if (v.is_object()) {
        ConfigReader sub(v, path);
        sub.allow({"start", "stop", "step"});
        double start = 0.0, stop = 0.0, step = 0.0;
        if (!sub.has("start") || !sub.has("stop") || !sub.has("step"))
            throw ConfigError(ConfigError::Kind::Type, path, path + ": needs start, stop and step");
        sub.number("start", start);
        sub.number("stop", stop);
        sub.number("step", step);
        if (!(step > 0.0))
            throw sub.range_error("step", "must be positive");
        if (!(stop >= start))
            throw sub.range_error("stop", "must not be below start");
        g = linear_grid(start, stop, step);
    } else {
        throw ConfigError(ConfigError::Kind::Type, path, path + ": expected an array or {start, stop, step}");
    }
    if (g.empty())
        throw ConfigError(ConfigError::Kind::Range, path, path + ": grid is empty");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g[i]))
            throw ConfigError(ConfigError::Kind::Range, path, path + ": entries must be finite");
        if (i > 0 && !(g[i] > g[i - 1]))
            throw ConfigError(ConfigError::Kind::Range, path, path + ": grid must be strictly increasing");
    }
    return g;
}

} // namespace detail

/// Range checks that do not depend on where the value came from.
inline void validate_config(const ExperimentConfig& c)
{
    auto fail = [](const std::string& path, const std::string& why) {
        throw ConfigError(ConfigError::Kind::Range, path, path + ": " + why);
    };
    const ChannelProfile& p = c.profile;
    if (p.M < 1)
        fail("profile.M", "must be at least 1");
    const std::pair<const char*, double> vars[] = {{"var_h_c", p.var_h_c}, {"var_h_e", p.var_h_e},
                                                   {"var_h_b", p.var_h_b}, {"var_h_v", p.var_h_v},
                                                   {"var_g_c", p.var_g_c}, {"var_g_e", p.var_g_e},
                                                   {"var_g_v", p.var_g_v}};
    for (const auto& [name, v] : vars)
        if (!(v > 0.0))
            fail(std::string("profile.") + name, "must be positive");
    if (!(p.alpha >= 0.0 && p.alpha <= 1.0))
        fail("profile.alpha", "must lie in [0,1]");
    if (!(p.epsilon > 0.0 && p.epsilon < 1.0))
        fail("profile.epsilon", "must lie in (0,1)");
    if (c.targets.empty())
        fail("targets", "at least one (r_c, r_e) pair required");
    for (std::size_t i = 0; i < c.targets.size(); ++i)
        if (!(c.targets[i].first >= 0.0) || !(c.targets[i].second >= 0.0))
            fail("targets[" + std::to_string(i) + "]", "targets must be nonnegative");
    for (double a : c.alpha_grid)
        if (!(a >= 0.0 && a <= 1.0))
            fail("alpha_grid", "entries must lie in [0,1]");
    for (double r : c.target_grid)
        if (!(r >= 0.0))
            fail("target_grid", "entries must be nonnegative");
    if (!(c.region_fixed >= 0.0))
        fail("region.fixed", "must be nonnegative");
    if (c.trials < 1)
        fail("trials", "must be at least 1");
    if (c.format != "csv" && c.format != "json")
        fail("format", "must be 'csv' or 'json'");
    if (c.validate_samples < 1)
        fail("validate_samples", "must be at least 1");
    if (c.out_dir.empty())
        fail("out", "must not be empty");
    const CccpOptions& o = c.cccp;
    if (o.max_iterations < 1)
        fail("cccp.max_iterations", "must be at least 1");
    if (!(o.tolerance > 0.0))
        fail("cccp.tolerance", "must be positive");
    if (o.splits.empty())
        fail("cccp.splits", "at least one split required");
    for (double s : o.splits)
        if (!(s > 0.0 && s < 1.0))
            fail("cccp.splits", "entries must lie in (0,1)");
    if (o.randomization_candidates < 1)
        fail("cccp.randomization_candidates", "must be at least 1");
    if (!(o.rank_one_threshold > 0.0))
        fail("cccp.rank_one_threshold", "must be positive");
    if (o.slack_iterations < 1)
        fail("cccp.slack_iterations", "must be at least 1");
    if (!(o.solver.feasibility_tol > 0.0))
        fail("solver.feasibility_tol", "must be positive");
    if (!(o.solver.gap_tol > 0.0))
        fail("solver.gap_tol", "must be positive");
    if (o.solver.max_iterations < 1)
        fail("solver.max_iterations", "must be at least 1");
}

inline ExperimentConfig config_from_json(const json& j)
{
    using detail::ConfigReader;
    ExperimentConfig c;
    ConfigReader root(j, "");
    root.allow({"profile", "targets", "alpha_grid", "target_grid", "region", "trials", "seed", "out", "format",
                "emit_svg", "validate_samples", "cccp", "solver"});

    if (root.has("profile")) {
        ConfigReader p(root.at("profile"), "profile");
        p.allow({"M", "var_h_c", "var_h_e", "var_h_b", "var_h_v", "var_g_c", "var_g_e", "var_g_v", "alpha",
                 "snr_db", "epsilon"});
        p.integer("M", c.profile.M);
        p.number("var_h_c", c.profile.var_h_c);
        p.number("var_h_e", c.profile.var_h_e);
        p.number("var_h_b", c.profile.var_h_b);
        p.number("var_h_v", c.profile.var_h_v);
        p.number("var_g_c", c.profile.var_g_c);
        p.number("var_g_e", c.profile.var_g_e);
        p.number("var_g_v", c.profile.var_g_v);
        p.number("alpha", c.profile.alpha);
        p.number("snr_db", c.profile.snr_db);
        p.number("epsilon", c.profile.epsilon);
    }
    if (root.has("targets")) {
        const json& t = root.at("targets");
        if (!t.is_array())
            throw root.type_error("targets", "an array of [r_c, r_e] pairs");
        c.targets.clear();
        for (std::size_t i = 0; i < t.size(); ++i) {
            const std::string path = "targets[" + std::to_string(i) + "]";
            if (!t[i].is_array() || t[i].size() != 2 || !t[i][0].is_number() || !t[i][1].is_number())
                throw ConfigError(ConfigError::Kind::Type, path, path + ": expected [r_c, r_e]");
            c.targets.emplace_back(t[i][0].get<double>(), t[i][1].get<double>());
        }
    }
    c.alpha_grid = detail::read_grid(root, "alpha_grid", c.alpha_grid);
    c.target_grid = detail::read_grid(root, "target_grid", c.target_grid);
    if (root.has("region")) {
        ConfigReader r(root.at("region"), "region");
        r.allow({"mode", "fixed"});
        std::string mode = to_string(c.region_mode);
        r.string("mode", mode);
        if (mode == "equal")
            c.region_mode = RegionMode::Equal;
        else if (mode == "sweep_rc")
            c.region_mode = RegionMode::SweepRc;
        else if (mode == "sweep_re")
            c.region_mode = RegionMode::SweepRe;
        else
            throw r.range_error("mode", "must be 'equal', 'sweep_rc' or 'sweep_re'");
        r.number("fixed", c.region_fixed);
    }
    root.integer("trials", c.trials);
    root.integer("seed", c.seed);
    root.string("out", c.out_dir);
    root.string("format", c.format);
    root.boolean("emit_svg", c.emit_svg);
    root.integer("validate_samples", c.validate_samples);
    if (root.has("cccp")) {
        ConfigReader o(root.at("cccp"), "cccp");
        o.allow({"max_iterations", "tolerance", "splits", "randomization_candidates", "rank_one_threshold",
                 "slack_iterations", "seed"});
        o.integer("max_iterations", c.cccp.max_iterations);
        o.number("tolerance", c.cccp.tolerance);
        if (o.has("splits")) {
            const json& s = o.at("splits");
            if (!s.is_array())
                throw o.type_error("splits", "an array of numbers");
            c.cccp.splits.clear();
            for (const auto& v : s) {
                if (!v.is_number())
                    throw o.type_error("splits", "an array of numbers");
                c.cccp.splits.push_back(v.get<double>());
            }
        }
        o.integer("randomization_candidates", c.cccp.randomization_candidates);
        o.number("rank_one_threshold", c.cccp.rank_one_threshold);
        o.integer("slack_iterations", c.cccp.slack_iterations);
        o.integer("seed", c.cccp.seed);
    }
    if (root.has("solver")) {
        ConfigReader s(root.at("solver"), "solver");
        s.allow({"feasibility_tol", "gap_tol", "max_iterations"});
        s.number("feasibility_tol", c.cccp.solver.feasibility_tol);
        s.number("gap_tol", c.cccp.solver.gap_tol);
        s.integer("max_iterations", c.cccp.solver.max_iterations);
    }
    validate_config(c);
    return c;
}

inline ExperimentConfig parse_config_text(const std::string& text)
{
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        return ExperimentConfig{};
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(ConfigError::Kind::Parse, "", std::string("parse error: ") + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const json::exception& e) {
        // Out-of-range integer conversions and similar.
        throw ConfigError(ConfigError::Kind::Type, "", std::string("invalid value: ") + e.what());
    }
}

inline ExperimentConfig parse_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(ConfigError::Kind::MissingFile, path.string(), "cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Effective configuration, every field explicit.
inline json config_to_json(const ExperimentConfig& c)
{
    json j;
    const ChannelProfile& p = c.profile;
    j["profile"] = {{"M", p.M},           {"var_h_c", p.var_h_c}, {"var_h_e", p.var_h_e}, {"var_h_b", p.var_h_b},
                    {"var_h_v", p.var_h_v}, {"var_g_c", p.var_g_c}, {"var_g_e", p.var_g_e}, {"var_g_v", p.var_g_v},
                    {"alpha", p.alpha},   {"snr_db", p.snr_db},   {"epsilon", p.epsilon}};
    j["targets"] = json::array();
    for (const auto& [rc, re] : c.targets)
        j["targets"].push_back({rc, re});
    j["alpha_grid"] = c.alpha_grid;
    j["target_grid"] = c.target_grid;
    j["region"] = {{"mode", to_string(c.region_mode)}, {"fixed", c.region_fixed}};
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["out"] = c.out_dir;
    j["format"] = c.format;
    j["emit_svg"] = c.emit_svg;
    j["validate_samples"] = c.validate_samples;
    j["cccp"] = {{"max_iterations", c.cccp.max_iterations},
                 {"tolerance", c.cccp.tolerance},
                 {"splits", c.cccp.splits},
                 {"randomization_candidates", c.cccp.randomization_candidates},
                 {"rank_one_threshold", c.cccp.rank_one_threshold},
                 {"slack_iterations", c.cccp.slack_iterations},
                 {"seed", c.cccp.seed}};
    j["solver"] = {{"feasibility_tol", c.cccp.solver.feasibility_tol},
                   {"gap_tol", c.cccp.solver.gap_tol},
                   {"max_iterations", c.cccp.solver.max_iterations}};
    return j;
}

/// Instance seed of trial i; identical across sweep points so draws are paired.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial)
{
    return SplitMix64(seed, trial).next();
}

struct RunTally
{
    int runs = 0;
    int feasible = 0;
    int solver_failures = 0;

    void add(RunStatus s)
    {
        ++runs;
        if (s == RunStatus::Converged || s == RunStatus::MaxIterations)
            ++feasible;
        else if (s == RunStatus::SolverFailure)
            ++solver_failures;
    }
};

struct ResultTable
{
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    int svg_x = 0;
    int svg_y = 1;
    RunTally tally;
};

using Progress = std::function<void(const std::string&)>;

namespace detail {

inline void report(const Progress& p, const std::string& msg)
{
    if (p)
        p(msg);
}

inline double status_code(RunStatus s)
{
    return static_cast<double>(static_cast<int>(s));
}

} // namespace detail

/// One row per target pair on the instance drawn from the seed.
/// status: 0 Converged, 1 MaxIterations, 2 Infeasible, 3 SolverFailure.
inline ResultTable run_solve(const ExperimentConfig& cfg, std::vector<SolveReport>* reports = nullptr)
{
    ResultTable t;
    t.name = "solve";
    t.columns = {"r_c", "r_e", "status", "r_b", "iterations", "omega", "worst_residual"};
    t.svg_x = 0;
    t.svg_y = 3;
    const NetworkInstance inst = sample_instance(cfg.profile, cfg.seed);
    for (const auto& [rc, re] : cfg.targets) {
        const SolveReport rep = run(inst, {rc, re, cfg.profile.epsilon}, cfg.cccp);
        t.tally.add(rep.status);
        const double omega = rep.omega_trace.empty() ? 1.0 : rep.omega_trace.back();
        t.rows.push_back({rc, re, detail::status_code(rep.status), rep.r_b, static_cast<double>(rep.iterations),
                          omega, rep.residuals.worst()});
        if (reports)
            reports->push_back(rep);
    }
    return t;
}

inline ResultTable run_converge(const ExperimentConfig& cfg, const Progress& progress = {})
{
    ResultTable t;
    t.name = "converge";
    t.columns = {"iter", "r_c", "r_e", "omega", "r_b"};
    t.svg_x = 0;
    t.svg_y = 4;
    const NetworkInstance inst = sample_instance(cfg.profile, cfg.seed);
    for (const auto& [rc, re] : cfg.targets) {
        const SolveReport rep = run(inst, {rc, re, cfg.profile.epsilon}, cfg.cccp);
        t.tally.add(rep.status);
        detail::report(progress, "converge (" + std::to_string(rc) + ", " + std::to_string(re) +
                                     "): " + to_string(rep.status));
        if (!rep.solved())
            continue;
        for (std::size_t l = 0; l < rep.omega_trace.size(); ++l) {
            const double w = rep.omega_trace[l];
            t.rows.push_back({static_cast<double>(l + 1), rc, re, w, std::log2(std::max(1.0, w))});
        }
    }
    return t;
}

inline std::pair<double, double> region_targets(const ExperimentConfig& cfg, double x)
{
    switch (cfg.region_mode) {
    case RegionMode::Equal: return {x, x};
    case RegionMode::SweepRc: return {x, cfg.region_fixed};
    case RegionMode::SweepRe: return {cfg.region_fixed, x};
    }
    return {x, x};
}

/// Means run over feasible draws only; a point with no feasible draw reports 0.
inline ResultTable run_region(const ExperimentConfig& cfg, const Progress& progress = {})
{
    ResultTable t;
    t.name = "region";
    t.columns = {"r_target", "r_b_noma_mean", "r_b_oma_mean", "feasible_frac_noma", "feasible_frac_oma"};
    std::vector<NetworkInstance> draws;
    for (int i = 0; i < cfg.trials; ++i)
        draws.push_back(sample_instance(cfg.profile, trial_seed(cfg.seed, static_cast<std::uint64_t>(i))));
    for (double x : cfg.target_grid) {
        const auto [rc, re] = region_targets(cfg, x);
        const SecrecyTargets tg{rc, re, cfg.profile.epsilon};
        double sum_n = 0.0, sum_o = 0.0;
        int feas_n = 0, feas_o = 0;
        for (const auto& inst : draws) {
            const SolveReport n = run(inst, tg, cfg.cccp);
            const OmaReport o = solve_oma(inst, tg, cfg.cccp);
            t.tally.add(n.status);
            t.tally.add(o.status);
            if (n.solved()) {
                sum_n += n.r_b;
                ++feas_n;
            }
            if (o.solved()) {
                sum_o += o.r_b;
                ++feas_o;
            }
        }
        const double trials = static_cast<double>(cfg.trials);
        t.rows.push_back({x, feas_n ? sum_n / feas_n : 0.0, feas_o ? sum_o / feas_o : 0.0, feas_n / trials,
                          feas_o / trials});
        detail::report(progress, "region r_target=" + std::to_string(x) + " feasible " + std::to_string(feas_n) +
                                     "/" + std::to_string(feas_o));
    }
    return t;
}

/// Mean over feasible draws with a normal-approximation 95% half-width.
inline ResultTable run_alpha_sweep(const ExperimentConfig& cfg, const Progress& progress = {})
{
    ResultTable t;
    t.name = "alpha-sweep";
    t.columns = {"alpha", "r_b_mean", "r_b_ci95", "feasible_frac"};
    const auto [rc, re] = cfg.targets.front();
    const SecrecyTargets tg{rc, re, cfg.profile.epsilon};
    for (double a : cfg.alpha_grid) {
        ChannelProfile prof = cfg.profile;
        prof.alpha = a;
        std::vector<double> vals;
        for (int i = 0; i < cfg.trials; ++i) {
            const NetworkInstance inst = sample_instance(prof, trial_seed(cfg.seed, static_cast<std::uint64_t>(i)));
            const SolveReport rep = run(inst, tg, cfg.cccp);
            t.tally.add(rep.status);
            if (rep.solved())
                vals.push_back(rep.r_b);
        }
        double mean = 0.0, ci = 0.0;
        if (!vals.empty()) {
            for (double v : vals)
                mean += v;
            mean /= static_cast<double>(vals.size());
            if (vals.size() > 1) {
                double ss = 0.0;
                for (double v : vals)
                    ss += (v - mean) * (v - mean);
                const double sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
                ci = 1.96 * sd / std::sqrt(static_cast<double>(vals.size()));
            }
        }
        t.rows.push_back({a, mean, ci, static_cast<double>(vals.size()) / cfg.trials});
        detail::report(progress, "alpha=" + std::to_string(a) + " mean r_b " + std::to_string(mean));
    }
    return t;
}

/// Solved trials only; pass is 1 when the empirical rate lies within the 3-sigma band.
inline ResultTable run_validate(const ExperimentConfig& cfg, const Progress& progress = {})
{
    ResultTable t;
    t.name = "validate";
    t.columns = {"trial", "r_b", "closedform_success", "empirical_success", "pass"};
    t.svg_x = 0;
    t.svg_y = 3;
    const auto [rc, re] = cfg.targets.front();
    const SecrecyTargets tg{rc, re, cfg.profile.epsilon};
    for (int i = 0; i < cfg.trials; ++i) {
        const std::uint64_t s = trial_seed(cfg.seed, static_cast<std::uint64_t>(i));
        const NetworkInstance inst = sample_instance(cfg.profile, s);
        const SolveReport rep = run(inst, tg, cfg.cccp);
        t.tally.add(rep.status);
        if (!rep.solved())
            continue;
        const MonteCarloReport mc = estimate_outage(inst, rep.beams, rep.r_b, cfg.validate_samples, trial_seed(s, 1));
        t.rows.push_back({static_cast<double>(i), rep.r_b, mc.closed_form, mc.empirical, mc.pass ? 1.0 : 0.0});
        detail::report(progress, "validate trial " + std::to_string(i) + (mc.pass ? " pass" : " FAIL"));
    }
    return t;
}

/// Paired NOMA / OMA solves per trial for every target pair.
inline ResultTable run_oma_compare(const ExperimentConfig& cfg, const Progress& progress = {})
{
    ResultTable t;
    t.name = "oma-compare";
    t.columns = {"trial", "r_c", "r_e", "r_b_noma", "r_b_oma", "feasible_noma", "feasible_oma"};
    t.svg_x = 0;
    t.svg_y = 3;
    for (const auto& [rc, re] : cfg.targets) {
        const SecrecyTargets tg{rc, re, cfg.profile.epsilon};
        for (int i = 0; i < cfg.trials; ++i) {
            const NetworkInstance inst =
                sample_instance(cfg.profile, trial_seed(cfg.seed, static_cast<std::uint64_t>(i)));
            const SolveReport n = run(inst, tg, cfg.cccp);
            const OmaReport o = solve_oma(inst, tg, cfg.cccp);
            t.tally.add(n.status);
            t.tally.add(o.status);
            t.rows.push_back({static_cast<double>(i), rc, re, n.solved() ? n.r_b : 0.0, o.solved() ? o.r_b : 0.0,
                              n.solved() ? 1.0 : 0.0, o.solved() ? 1.0 : 0.0});
        }
        detail::report(progress, "oma-compare (" + std::to_string(rc) + ", " + std::to_string(re) + ") done");
    }
    return t;
}

/// Canonical form of the first subproblem the solver would face.
inline void dump_first_subproblem(const NetworkInstance& inst, const SecrecyTargets& targets,
                                  const CccpOptions& opts, std::ostream& os)
{
    const detail::RunContext ctx(inst, targets, ProblemShape{}, opts);
    CccpIterate anchor = ctx.split_anchor(opts.splits.front());
    SubproblemObjective obj = SubproblemObjective::MaximizeRateSlack;
    if (ctx.outage_rows()) {
        const InitResult init = detail::initialize_ctx(ctx);
        if (!init.starts.empty()) {
            anchor = init.starts.front().second;
            obj = SubproblemObjective::MaximizeOmega;
        }
    }
    dump_canonical(canonicalize(assemble(inst, targets, anchor, ctx.table, ctx.sub_shape(obj))), os);
}

inline std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(const ResultTable& t, std::ostream& os)
{
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        os << (c ? "," : "") << t.columns[c];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << (c ? "," : "") << format_number(row[c]);
        os << "\n";
    }
}

inline json table_to_json(const ResultTable& t)
{
    json arr = json::array();
    for (const auto& row : t.rows) {
        json rec = json::object();
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            rec[t.columns[c]] = row[c];
        arr.push_back(std::move(rec));
    }
    return arr;
}

/// Line plot of column svg_y against svg_x; a new polyline starts whenever x
/// falls back, so repeated traces are drawn separately.
inline void write_svg(const ResultTable& t, std::ostream& os)
{
    constexpr double W = 640, H = 400, L = 60, R = 20, T = 30, B = 50;
    const auto xi = static_cast<std::size_t>(t.svg_x), yi = static_cast<std::size_t>(t.svg_y);
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& r : t.rows) {
        x0 = std::min(x0, r[xi]);
        x1 = std::max(x1, r[xi]);
        y0 = std::min(y0, r[yi]);
        y1 = std::max(y1, r[yi]);
    }
    if (t.rows.empty()) {
        x0 = y0 = 0.0;
        x1 = y1 = 1.0;
    }
    if (x1 == x0)
        x1 = x0 + 1.0;
    if (y1 == y0)
        y1 = y0 + 1.0;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
       << W << " " << H << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << (W + L - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"14\">"
       << t.columns[xi] << "</text>\n";
    os << "<text x=\"15\" y=\"" << (H - B + T) / 2 << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 15 "
       << (H - B + T) / 2 << ")\">" << t.columns[yi] << "</text>\n";
    os << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"11\">" << format_number(x0) << "</text>\n";
    os << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\" font-size=\"11\">"
       << format_number(x1) << "</text>\n";
    os << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" text-anchor=\"end\" font-size=\"11\">" << format_number(y0)
       << "</text>\n";
    os << "<text x=\"" << L - 4 << "\" y=\"" << T + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << format_number(y1)
       << "</text>\n";
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::size_t series = 0;
    std::string pts;
    auto flush = [&]() {
        if (!pts.empty())
            os << "<polyline fill=\"none\" stroke=\"" << colors[series++ % 6] << "\" stroke-width=\"1.5\" points=\""
               << pts << "\"/>\n";
        pts.clear();
    };
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& r : t.rows) {
        if (r[xi] < prev)
            flush();
        prev = r[xi];
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", pts.empty() ? "" : " ", px(r[xi]), py(r[yi]));
        pts += buf;
    }
    flush();
    os << "</svg>\n";
}

/// Writes <out>/<name>.csv|json, the effective config and optionally an SVG.
/// Returns the paths written.
inline std::vector<std::filesystem::path> emit_outputs(const ResultTable& t, const ExperimentConfig& cfg)
{
    namespace fs = std::filesystem;
    const fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error("cannot create output directory " + dir.string());

    std::vector<fs::path> written;
    auto open = [&](const fs::path& p) {
        std::ofstream f(p, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write " + p.string());
        written.push_back(p);
        return f;
    };
    {
        const fs::path p = dir / (t.name + "." + cfg.format);
        std::ofstream f = open(p);
        if (cfg.format == "json")
            f << table_to_json(t).dump(2) << "\n";
        else
            write_csv(t, f);
    }
    {
        std::ofstream f = open(dir / (t.name + ".config.json"));
        f << config_to_json(cfg).dump(2) << "\n";
    }
    if (cfg.emit_svg) {
        std::ofstream f = open(dir / (t.name + ".svg"));
        write_svg(t, f);
    }
    for (const auto& p : written)
        if (!fs::exists(p))
            throw std::runtime_error("cannot write " + p.string());
    return written;
}

/// 0 ok, 3 nothing feasible, 4 any solver failure.
inline int exit_code(const RunTally& t)
{
    if (t.solver_failures > 0)
        return 4;
    if (t.runs > 0 && t.feasible == 0)
        return 3;
    return 0;
}

} // namespace secbeam

#endif // SECBEAM_EXPERIMENTS_HPP
