#ifndef SECBEAM_CCCP_HPP
#define SECBEAM_CCCP_HPP

// Outer convex-concave loop: initialization, linearize-and-solve until omega
// settles, rank-one beam recovery and verification against the exact model.

#include "secbeam/dc_transform.hpp"
#include "secbeam/model.hpp"
#include "secbeam/random.hpp"
#include "secbeam/subproblem.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace secbeam {

struct CccpOptions
{
    int max_iterations = 50;
    double tolerance = 1e-4; ///< stop when |omega' - omega| <= tolerance * max(1, omega)
    std::vector<double> splits{0.2, 0.5, 0.8}; ///< fraction of P initially given to W_c
    int randomization_candidates = 200;
    double rank_one_threshold = 1e-6; ///< lambda_2 / lambda_1 below which W counts as rank one
    int slack_iterations = 20;
    std::uint64_t seed = 1;
    SolverOptions solver;

    void validate() const
    {
        if (max_iterations < 1 || slack_iterations < 1 || randomization_candidates < 1)
            throw std::invalid_argument("CccpOptions: iteration and candidate counts must be positive");
        if (!(tolerance > 0.0) || !(rank_one_threshold > 0.0))
            throw std::invalid_argument("CccpOptions: tolerances must be positive");
        if (splits.empty())
            throw std::invalid_argument("CccpOptions: at least one power split required");
        for (double s : splits)
            if (!(s > 0.0 && s < 1.0))
                throw std::invalid_argument("CccpOptions: power splits must lie in (0,1)");
        if (!(solver.feasibility_tol > 0.0) || !(solver.gap_tol > 0.0) || solver.max_iterations < 1)
            throw std::invalid_argument("SolverOptions: tolerances and iteration limit must be positive");
    }
};

enum class RunStatus
{
    Converged,
    MaxIterations,
    Infeasible,
    SolverFailure
};

inline const char* to_string(RunStatus s)
{
    switch (s) {
    case RunStatus::Converged: return "Converged";
    case RunStatus::MaxIterations: return "MaxIterations";
    case RunStatus::Infeasible: return "Infeasible";
    case RunStatus::SolverFailure: return "SolverFailure";
    }
    return "?";
}

struct RankDiagnostics
{
    double ratio_c = 0.0; ///< lambda_2 / lambda_1 of W_c
    double ratio_e = 0.0;
    bool rank_relaxed = false; ///< no candidate passed verification; principal eigenvectors returned
    bool randomized = false;   ///< the returned pair came from Gaussian randomization
    int feasible_candidates = 0;
};

/// Positive parts of the constraint violations of the exact problem.
struct Residuals
{
    double rate_c = 0.0;
    double rate_e = 0.0;
    double rate_ce = 0.0;
    double outage = 0.0; ///< (1 - epsilon) - closed-form success
    double power = 0.0;  ///< relative to P

    double worst() const { return std::max({rate_c, rate_e, rate_ce, outage, power}); }
};

struct SolveReport
{
    RunStatus status = RunStatus::SolverFailure;
    double r_b = 0.0;
    BeamPair beams;
    double zeta = 0.0;
    std::vector<double> omega_trace;
    RankDiagnostics rank;
    Residuals residuals;
    double seconds = 0.0;
    int iterations = 0;
    double split = 0.0;
    int newton_steps = 0;
    std::string message;
    CccpIterate solution; ///< relaxed optimum before rank-one recovery

    bool solved() const { return status == RunStatus::Converged || status == RunStatus::MaxIterations; }
};

/// Which parts of the problem take part in a run.  The default is the full
/// NOMA problem; the orthogonal-slot baseline switches pieces off.
struct ProblemShape
{
    std::array<bool, 3> rate_active{true, true, true};
    double rate_scale = 1.0;
    bool block_c = true;
    bool block_e = true;
    bool optimize_outage = true;
};

namespace detail {

inline CVec unit_or_first(const CVec& h)
{
    const double n = h.norm();
    if (n > 0.0)
        return h / n;
    CVec e = CVec::Zero(h.size());
    e(0) = 1.0;
    return e;
}

/// gamma_vb evaluated on matrices.
inline double eavesdropper_bd_sinr(const CoefficientTable& tab, const NetworkInstance& inst,
                                   const CMat& wc, const CMat& we)
{
    const double f = trace_product(tab.H_b, wc) + trace_product(tab.H_b, we);
    const double leak = trace_product(tab.H_v, wc) + trace_product(tab.H_v, we);
    return tab.bd_v * f / (inst.sigma2 + leak);
}

inline CMat project(const CMat& w, const CMat& basis)
{
    const CMat pr = basis * basis.adjoint();
    return hermitian_part(pr * w * pr);
}

struct EigenPair
{
    CVec principal; ///< sqrt(lambda_1) u_1
    double ratio = 0.0;
    CMat sqrt_w;
};

inline EigenPair eigen_split(const CMat& w)
{
    EigenPair out;
    const Eigen::Index m = w.rows();
    out.principal = CVec::Zero(m);
    out.sqrt_w = CMat::Zero(m, m);
    if (m == 0)
        return out;
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(w));
    RVec ev = es.eigenvalues().cwiseMax(0.0);
    const double l1 = ev(m - 1);
    if (l1 <= 0.0)
        return out;
    out.ratio = m > 1 ? ev(m - 2) / l1 : 0.0;
    out.principal = std::sqrt(l1) * es.eigenvectors().col(m - 1);
    out.sqrt_w = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
    return out;
}

} // namespace detail

/// Checks beams against the exact constraints of the (possibly reduced) problem.
inline Residuals verify_solution(const NetworkInstance& inst, const SecrecyTargets& targets,
                                 const BeamPair& beams, double r_b, const ProblemShape& shape = {})
{
    Residuals res;
    const SecrecyRates r = secrecy_rates(inst, beams);
    const double rc = shape.rate_scale * targets.r_c;
    const double re = shape.rate_scale * targets.r_e;
    if (shape.rate_active[0])
        res.rate_c = std::max(0.0, rc - r.R_c);
    if (shape.rate_active[1])
        res.rate_e = std::max(0.0, re - r.R_e);
    if (shape.rate_active[2])
        res.rate_ce = std::max(0.0, re - r.R_ce);
    res.outage = std::max(0.0, (1.0 - targets.epsilon) - rb_outage_success(inst, beams, std::max(0.0, r_b)));
    res.power = std::max(0.0, beams.power() - inst.P) / inst.P;
    return res;
}

/// Candidate rank-one pair and its achievable rate.
struct RankOneResult
{
    BeamPair beams;
    double r_b = 0.0; ///< best verified rate, capped by the relaxed candidate
    RankDiagnostics diagnostics;
};

inline RankOneResult recover_rank_one(const CMat& W_c, const CMat& W_e, const NetworkInstance& inst,
                                      const SecrecyTargets& targets, double r_b_candidate,
                                      const CccpOptions& opts, const ProblemShape& shape = {})
{
    constexpr double accept_tol = 1e-7;
    const auto ec = detail::eigen_split(W_c);
    const auto ee = detail::eigen_split(W_e);
    RankOneResult out;
    out.diagnostics.ratio_c = ec.ratio;
    out.diagnostics.ratio_e = ee.ratio;

    auto score = [&](const BeamPair& b) -> std::optional<double> {
        const Residuals r = verify_solution(inst, targets, b, 0.0, shape);
        if (std::max({r.rate_c, r.rate_e, r.rate_ce, r.power}) > accept_tol)
            return std::nullopt;
        if (!shape.optimize_outage)
            return 0.0;
        const auto rate = max_outage_rate(inst, b, targets.epsilon);
        if (!rate)
            return std::nullopt;
        return std::min(*rate, r_b_candidate);
    };

    BeamPair principal{ec.principal, ee.principal};
    const auto principal_score = score(principal);
    const bool rank_one = ec.ratio <= opts.rank_one_threshold && ee.ratio <= opts.rank_one_threshold;
    if (rank_one && principal_score) {
        out.beams = principal;
        out.r_b = *principal_score;
        out.diagnostics.feasible_candidates = 1;
        return out;
    }

    std::optional<double> best = principal_score;
    BeamPair best_beams = principal;
    out.diagnostics.feasible_candidates = principal_score ? 1 : 0;
    const double pc = W_c.trace().real(), pe = W_e.trace().real();
    for (int i = 0; i < opts.randomization_candidates; ++i) {
        SplitMix64 rng(opts.seed, static_cast<std::uint64_t>(i));
        auto draw = [&rng](const detail::EigenPair& e, double power) {
            CVec v = e.sqrt_w * rng.complex_normal_vector(e.sqrt_w.rows());
            const double n2 = v.squaredNorm();
            if (n2 > 0.0)
                v *= std::sqrt(power / n2);
            return v;
        };
        BeamPair cand{draw(ec, pc), draw(ee, pe)};
        const auto s = score(cand);
        if (!s)
            continue;
        ++out.diagnostics.feasible_candidates;
        if (!best || *s > *best) {
            best = s;
            best_beams = cand;
            out.diagnostics.randomized = true;
        }
    }
    if (best) {
        out.beams = best_beams;
        out.r_b = *best;
    } else {
        out.beams = principal;
        out.r_b = std::max(0.0, r_b_candidate);
        out.diagnostics.rank_relaxed = true;
    }
    return out;
}

/// Starting anchors for the loop, each with a feasible first subproblem.
struct InitResult
{
    bool feasible = false;
    std::vector<std::pair<double, CccpIterate>> starts; ///< (split, anchor); split < 0 marks the slack phase
    int newton_steps = 0;
    std::string message;
};

namespace detail {

struct RunContext
{
    NetworkInstance inst;
    SecrecyTargets targets;
    ProblemShape shape;
    CccpOptions opts;
    std::shared_ptr<const CoefficientTable> table;
    std::optional<CMat> basis_c;
    std::optional<CMat> basis_e;
    bool dead_link = false;

    RunContext(const NetworkInstance& i, const SecrecyTargets& t, const ProblemShape& s,
               const CccpOptions& o)
        : inst(i), targets(t), shape(s), opts(o)
    {
        inst.validate();
        targets.validate();
        opts.validate();
        table = std::make_shared<const CoefficientTable>(inst);
        const int m = inst.antennas();
        if (!shape.block_c)
            basis_c = CMat(m, 0);
        if (!shape.block_e)
            basis_e = CMat(m, 0);
        const double hb2 = inst.h_b.squaredNorm();
        dead_link = shape.optimize_outage && table->bd_c * hb2 == 0.0;
        if (dead_link && table->bd_v * hb2 > 0.0) {
            // r_b = 0 must still hold with probability 1 - epsilon, which
            // forces the beams away from the BD.
            const CMat perp = orthogonal_complement(inst.h_b);
            if (shape.block_c)
                basis_c = perp;
            if (shape.block_e)
                basis_e = perp;
        }
    }

    bool outage_rows() const { return shape.optimize_outage && !dead_link; }

    SubproblemShape sub_shape(SubproblemObjective obj) const
    {
        SubproblemShape s;
        s.objective = obj;
        s.rate_active = shape.rate_active;
        s.rate_scale = shape.rate_scale;
        s.outage_rows = outage_rows();
        s.basis_c = basis_c;
        s.basis_e = basis_e;
        return s;
    }

    CccpIterate split_anchor(double beta) const
    {
        const int m = inst.antennas();
        CccpIterate it;
        it.W_c = CMat::Zero(m, m);
        it.W_e = CMat::Zero(m, m);
        const double share_c = shape.block_c ? (shape.block_e ? beta : 1.0) : 0.0;
        const double share_e = shape.block_e ? 1.0 - share_c : 0.0;
        auto place = [&](const CVec& h, const std::optional<CMat>& basis, double share) {
            if (share <= 0.0)
                return CMat(CMat::Zero(m, m));
            CVec u = unit_or_first(h);
            if (basis) {
                u = *basis * (basis->adjoint() * u);
                if (u.norm() == 0.0)
                    u = basis->col(0);
                u.normalize();
            }
            return CMat(share * inst.P * outer(u));
        };
        it.W_c = place(inst.h_c, basis_c, share_c);
        it.W_e = place(inst.h_e, basis_e, share_e);
        it.omega = 1.0;
        it.zeta = outage_rows() ? eavesdropper_bd_sinr(*table, inst, it.W_c, it.W_e) : 0.0;
        return it;
    }

    SubproblemResult solve(const CccpIterate& anchor, SubproblemObjective obj) const
    {
        const SubproblemSpec spec = assemble(inst, targets, anchor, table, sub_shape(obj));
        return solve_subproblem(spec, opts.solver);
    }
};

struct LoopOutcome
{
    RunStatus status = RunStatus::SolverFailure;
    CccpIterate last;
    std::vector<double> trace;
    int iterations = 0;
    int newton_steps = 0;
    double slack = 0.0;
    std::string message;
};

inline LoopOutcome cccp_loop(const RunContext& ctx, CccpIterate anchor, SubproblemObjective obj,
                             int max_iter)
{
    LoopOutcome out;
    out.status = RunStatus::MaxIterations;
    double prev = 0.0;
    for (int l = 0; l < max_iter; ++l) {
        const SubproblemResult r = ctx.solve(anchor, obj);
        out.newton_steps += r.newton_steps;
        if (r.status != SolveStatus::Optimal) {
            out.status = r.status == SolveStatus::Infeasible ? RunStatus::Infeasible : RunStatus::SolverFailure;
            out.message = "iteration " + std::to_string(l) + ": " + to_string(r.status) + " " + r.message;
            return out;
        }
        anchor = r.iterate;
        // Clean tiny negative eigenvalues and power overshoot from round-off.
        anchor.W_c = hermitian_part(anchor.W_c);
        anchor.W_e = hermitian_part(anchor.W_e);
        anchor.omega = std::max(anchor.omega, 1.0);
        anchor.zeta = std::max(anchor.zeta, 0.0);
        out.last = anchor;
        out.iterations = l + 1;
        out.slack = r.slack;
        const double value = r.objective;
        out.trace.push_back(value);
        // The feasibility phase ends at the first nonnegative margin.
        if (obj == SubproblemObjective::MaximizeRateSlack && r.slack >= 0.0) {
            out.status = RunStatus::Converged;
            return out;
        }
        if (l > 0 && std::abs(value - prev) <= ctx.opts.tolerance * std::max(1.0, std::abs(prev))) {
            out.status = RunStatus::Converged;
            return out;
        }
        prev = value;
    }
    return out;
}

inline InitResult initialize_ctx(const RunContext& ctx)
{
    InitResult out;
    if (ctx.outage_rows()) {
        for (double beta : ctx.opts.splits) {
            const CccpIterate anchor = ctx.split_anchor(beta);
            const SubproblemResult r = ctx.solve(anchor, SubproblemObjective::MaximizeOmega);
            out.newton_steps += r.newton_steps;
            if (r.status == SolveStatus::Optimal)
                out.starts.emplace_back(beta, anchor);
            // Without a BS->U_e block the split is irrelevant.
            if (!ctx.shape.block_c || !ctx.shape.block_e)
                break;
        }
        if (!out.starts.empty()) {
            out.feasible = true;
            return out;
        }
    }
    // Feasibility phase: maximize a common margin on the rate rows.
    const LoopOutcome slack = cccp_loop(ctx, ctx.split_anchor(0.5), SubproblemObjective::MaximizeRateSlack,
                                        ctx.opts.slack_iterations);
    out.newton_steps += slack.newton_steps;
    if (slack.iterations == 0 || slack.status == RunStatus::SolverFailure) {
        out.message = slack.message.empty() ? "feasibility phase failed" : slack.message;
        if (slack.status == RunStatus::SolverFailure)
            out.message = "solver failure in feasibility phase: " + out.message;
        return out;
    }
    if (slack.slack < 0.0) {
        out.message = "rate targets unreachable (best margin " + std::to_string(slack.slack) + " nats)";
        return out;
    }
    out.feasible = true;
    out.starts.emplace_back(-1.0, slack.last);
    return out;
}

inline SolveReport run_ctx(const RunContext& ctx)
{
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport best;
    best.status = RunStatus::Infeasible;
    auto finish = [&](SolveReport r) {
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    };

    const InitResult init = initialize_ctx(ctx);
    best.newton_steps = init.newton_steps;
    if (!init.feasible) {
        best.status = init.message.rfind("solver failure", 0) == 0 ? RunStatus::SolverFailure
                                                                     : RunStatus::Infeasible;
        best.message = init.message;
        return finish(best);
    }

    bool have = false;
    std::string failures;
    int steps = init.newton_steps;
    for (const auto& [split, anchor] : init.starts) {
        LoopOutcome loop;
        if (ctx.outage_rows()) {
            loop = cccp_loop(ctx, anchor, SubproblemObjective::MaximizeOmega, ctx.opts.max_iterations);
        } else {
            // Nothing to optimize: the feasibility phase's point is the answer.
            loop.status = RunStatus::Converged;
            loop.last = anchor;
            loop.trace = {1.0};
            loop.iterations = 0;
        }
        steps += loop.newton_steps;
        if (loop.status == RunStatus::SolverFailure || loop.status == RunStatus::Infeasible) {
            failures += (failures.empty() ? "" : "; ") + loop.message;
            continue;
        }
        const double relaxed_rb = ctx.outage_rows() ? std::log2(std::max(1.0, loop.last.omega)) : 0.0;
        const RankOneResult rec =
            recover_rank_one(loop.last.W_c, loop.last.W_e, ctx.inst, ctx.targets, relaxed_rb, ctx.opts, ctx.shape);

        SolveReport rep;
        rep.status = loop.status;
        rep.r_b = std::max(0.0, rec.r_b);
        rep.beams = rec.beams;
        rep.zeta = loop.last.zeta;
        rep.omega_trace = loop.trace;
        rep.rank = rec.diagnostics;
        rep.iterations = loop.iterations;
        rep.split = split;
        rep.solution = loop.last;
        rep.residuals = verify_solution(ctx.inst, ctx.targets, rep.beams, rep.r_b, ctx.shape);
        if (!ctx.shape.optimize_outage)
            rep.residuals.outage = 0.0;
        if (rep.rank.rank_relaxed || rep.residuals.worst() > 1e-6) {
            failures += (failures.empty() ? "" : "; ") + std::string("rank-one recovery failed verification");
            continue;
        }
        if (!have || rep.r_b > best.r_b) {
            best = rep;
            have = true;
        }
    }
    best.newton_steps = steps;
    if (!have) {
        best.status = RunStatus::SolverFailure;
        best.message = failures;
    }
    return finish(best);
}

} // namespace detail

inline InitResult initialize(const NetworkInstance& inst, const SecrecyTargets& targets,
                             const CccpOptions& opts = {})
{
    return detail::initialize_ctx(detail::RunContext(inst, targets, ProblemShape{}, opts));
}

inline SolveReport run(const NetworkInstance& inst, const SecrecyTargets& targets,
                       const CccpOptions& opts = {})
{
    return detail::run_ctx(detail::RunContext(inst, targets, ProblemShape{}, opts));
}

/// Same machinery on a reduced problem (used by the orthogonal baseline).
inline SolveReport run_shaped(const NetworkInstance& inst, const SecrecyTargets& targets,
                              const ProblemShape& shape, const CccpOptions& opts = {})
{
    return detail::run_ctx(detail::RunContext(inst, targets, shape, opts));
}

} // namespace secbeam

#endif // SECBEAM_CCCP_HPP
