// Command-line front end: single solves and the sweep experiments.

#include "secbeam/secbeam.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonFlags
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    bool emit_svg = false;
    std::optional<int> trials;
    std::string dump_subproblem;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--config", f.config, "JSON configuration file");
    cmd->add_option("--seed", f.seed, "instance seed");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--emit-svg", f.emit_svg, "also write an SVG line plot");
    cmd->add_option("--trials", f.trials, "trials per sweep point");
    cmd->add_option("--dump-subproblem", f.dump_subproblem,
                    "write the first canonical subproblem of the first target pair to this file");
    cmd->add_flag("-q,--quiet", f.quiet, "no progress lines");
}

secbeam::ExperimentConfig load(const CommonFlags& f)
{
    secbeam::ExperimentConfig cfg = f.config.empty() ? secbeam::ExperimentConfig{} : secbeam::parse_config(f.config);
    if (f.seed)
        cfg.seed = *f.seed;
    if (f.out)
        cfg.out_dir = *f.out;
    if (f.format)
        cfg.format = *f.format;
    if (f.emit_svg)
        cfg.emit_svg = true;
    if (f.trials)
        cfg.trials = *f.trials;
    secbeam::validate_config(cfg);
    return cfg;
}

void print_vector(const char* name, const secbeam::CVec& v)
{
    std::printf("  %s =", name);
    for (Eigen::Index i = 0; i < v.size(); ++i)
        std::printf(" (%.6g%+.6gi)", v(i).real(), v(i).imag());
    std::printf("\n");
}

int run_command(const std::string& name, const CommonFlags& flags)
{
    using namespace secbeam;
    const ExperimentConfig cfg = load(flags);
    Progress progress;
    if (!flags.quiet)
        progress = [](const std::string& msg) { std::fprintf(stderr, "%s\n", msg.c_str()); };

    if (!flags.dump_subproblem.empty()) {
        const NetworkInstance inst = sample_instance(cfg.profile, cfg.seed);
        const auto [rc, re] = cfg.targets.front();
        std::ofstream f(flags.dump_subproblem);
        if (!f)
            throw std::runtime_error("cannot write " + flags.dump_subproblem);
        dump_first_subproblem(inst, {rc, re, cfg.profile.epsilon}, cfg.cccp, f);
    }

    ResultTable table;
    if (name == "solve") {
        std::vector<SolveReport> reports;
        table = run_solve(cfg, &reports);
        for (std::size_t k = 0; k < reports.size(); ++k) {
            const SolveReport& r = reports[k];
            std::printf("targets (%g, %g): %s  r_b = %.6f bits/s/Hz  iterations = %d  split = %g  %.3f s\n",
                        cfg.targets[k].first, cfg.targets[k].second, to_string(r.status), r.r_b, r.iterations,
                        r.split, r.seconds);
            if (r.solved()) {
                print_vector("w_c", r.beams.w_c);
                print_vector("w_e", r.beams.w_e);
                std::printf("  worst residual %.3g  rank ratios %.3g %.3g%s\n", r.residuals.worst(),
                            r.rank.ratio_c, r.rank.ratio_e, r.rank.randomized ? "  (randomized)" : "");
            } else if (!r.message.empty()) {
                std::printf("  %s\n", r.message.c_str());
            }
        }
    } else if (name == "converge") {
        table = run_converge(cfg, progress);
    } else if (name == "region") {
        table = run_region(cfg, progress);
    } else if (name == "alpha-sweep") {
        table = run_alpha_sweep(cfg, progress);
    } else if (name == "validate") {
        table = run_validate(cfg, progress);
    } else {
        table = run_oma_compare(cfg, progress);
    }

    for (const auto& p : emit_outputs(table, cfg))
        if (!flags.quiet)
            std::fprintf(stderr, "wrote %s\n", p.string().c_str());
    const int code = exit_code(table.tally);
    if (code == 3)
        std::fprintf(stderr, "no run was feasible\n");
    else if (code == 4)
        std::fprintf(stderr, "%d solver failure(s)\n", table.tally.solver_failures);
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Outage-constrained secure beamforming for backscatter-aided NOMA"};
    app.require_subcommand(1);
    CommonFlags flags;
    const char* names[][2] = {{"solve", "solve one sampled instance for every target pair"},
                              {"converge", "per-iteration omega traces"},
                              {"region", "NOMA vs OMA feasibility and rate over a target grid"},
                              {"alpha-sweep", "mean rate over the reflection coefficient grid"},
                              {"validate", "Monte Carlo check of the reported outage rates"},
                              {"oma-compare", "paired NOMA / OMA solves per trial"}};
    for (const auto& n : names)
        add_common(app.add_subcommand(n[0], n[1]), flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        return run_command(app.get_subcommands().front()->get_name(), flags);
    } catch (const secbeam::ConfigError& e) {
        std::fprintf(stderr, "config error (%s): %s\n", secbeam::to_string(e.kind()), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
