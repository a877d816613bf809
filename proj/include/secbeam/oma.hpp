#ifndef SECBEAM_OMA_HPP
#define SECBEAM_OMA_HPP

// Orthogonal (TDMA) baseline: two equal slots.  Slot A carries s_c and the
// BD message, slot B carries s_e while the BD keeps reflecting.  Every rate
// is halved, each slot may use the full power P.

#include "secbeam/cccp.hpp"

#include <string>

namespace secbeam {

struct OmaReport
{
    RunStatus status = RunStatus::SolverFailure;
    double r_b = 0.0; ///< half of the slot-A full-time outage rate
    CVec w_c;         ///< slot-A beam
    CVec w_e;         ///< slot-B beam
    Residuals residuals_a;
    Residuals residuals_b;
    SolveReport slot_a;
    SolveReport slot_b;
    std::string message;

    bool solved() const { return status == RunStatus::Converged || status == RunStatus::MaxIterations; }
};

inline ProblemShape oma_slot_a_shape()
{
    ProblemShape s;
    s.rate_active = {true, false, false};
    s.rate_scale = 2.0;
    s.block_e = false;
    s.optimize_outage = true;
    return s;
}

inline ProblemShape oma_slot_b_shape()
{
    ProblemShape s;
    s.rate_active = {false, true, false};
    s.rate_scale = 2.0;
    s.block_c = false;
    s.optimize_outage = false;
    return s;
}

inline OmaReport solve_oma(const NetworkInstance& inst, const SecrecyTargets& targets,
                           const CccpOptions& opts = {})
{
    OmaReport rep;
    rep.slot_a = run_shaped(inst, targets, oma_slot_a_shape(), opts);
    rep.slot_b = run_shaped(inst, targets, oma_slot_b_shape(), opts);
    rep.w_c = rep.slot_a.beams.w_c;
    rep.w_e = rep.slot_b.beams.w_e;
    rep.residuals_a = rep.slot_a.residuals;
    rep.residuals_b = rep.slot_b.residuals;

    auto worse = [](RunStatus a, RunStatus b) {
        // SolverFailure dominates Infeasible dominates MaxIterations dominates Converged.
        return static_cast<int>(a) > static_cast<int>(b) ? a : b;
    };
    rep.status = worse(rep.slot_a.status, rep.slot_b.status);
    if (rep.solved())
        rep.r_b = 0.5 * rep.slot_a.r_b;
    else
        rep.message = "slot A: " + std::string(to_string(rep.slot_a.status)) + " " + rep.slot_a.message +
                      " | slot B: " + to_string(rep.slot_b.status) + " " + rep.slot_b.message;
    return rep;
}

} // namespace secbeam

#endif // SECBEAM_OMA_HPP
