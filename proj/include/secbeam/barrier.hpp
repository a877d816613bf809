#ifndef SECBEAM_BARRIER_HPP
#define SECBEAM_BARRIER_HPP

// Small dense log-barrier interior-point solver for
//
//     maximize   c' x
//     subject to c0 + l' x - sum_k ln(a0_k + a_k' x) <= 0     (log rows)
//                0.5 x' Q x + q' x + q0 <= 0                  (convex quadratic rows, Q PSD)
//                a' x <= b                                    (linear rows)
//                X_i(x) >= 0                                  (Hermitian PSD blocks)
//
// Each Hermitian k x k block occupies k^2 consecutive real variables, packed
// row-wise over the upper triangle: diagonal entries as one real, strictly
// upper entries as (re, im).

#include "secbeam/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace secbeam {

namespace herm {

inline int param_count(int k)
{
    return k * k;
}

inline CMat unpack(const double* x, int k)
{
    CMat m(k, k);
    int p = 0;
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            if (i == j) {
                m(i, i) = cplx(x[p++], 0.0);
            } else {
                const cplx z(x[p], x[p + 1]);
                p += 2;
                m(i, j) = z;
                m(j, i) = std::conj(z);
            }
        }
    return m;
}

inline void pack(const CMat& m, double* x)
{
    const int k = static_cast<int>(m.rows());
    int p = 0;
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            if (i == j) {
                x[p++] = m(i, i).real();
            } else {
                const cplx z = 0.5 * (m(i, j) + std::conj(m(j, i)));
                x[p++] = z.real();
                x[p++] = z.imag();
            }
        }
}

/// Coefficients a with Re tr(A X) = a' x for every Hermitian X (A Hermitian).
inline RVec trace_functional(const CMat& a)
{
    const int k = static_cast<int>(a.rows());
    RVec out(param_count(k));
    int p = 0;
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            if (i == j) {
                out(p++) = a(i, i).real();
            } else {
                const cplx z = 0.5 * (a(i, j) + std::conj(a(j, i)));
                out(p++) = 2.0 * z.real();
                out(p++) = 2.0 * z.imag();
            }
        }
    return out;
}

/// The Hermitian basis matrix multiplying parameter p.
inline CMat basis(int p, int k)
{
    RVec e = RVec::Zero(param_count(k));
    e(p) = 1.0;
    return unpack(e.data(), k);
}

} // namespace herm

struct LogRow
{
    double constant = 0.0;
    RVec linear;
    std::vector<double> arg_offset;
    std::vector<RVec> arg_coeff;
    std::string label;
};

struct QuadRow
{
    RMat Q;
    RVec q;
    double q0 = 0.0;
    std::string label;
};

struct LinearRow
{
    RVec a;
    double b = 0.0;
    std::string label;
};

struct PsdBlock
{
    int offset = 0;
    int dim = 0;
    std::string label;
};

struct CanonicalProblem
{
    int n = 0;
    RVec objective; ///< maximized
    std::vector<LogRow> log_rows;
    std::vector<QuadRow> quad_rows;
    std::vector<LinearRow> linear_rows;
    std::vector<PsdBlock> psd_blocks;

    int barrier_degree() const
    {
        int m = static_cast<int>(log_rows.size() + quad_rows.size() + linear_rows.size());
        for (const auto& b : psd_blocks)
            m += b.dim;
        return m;
    }

    double row_value(const LogRow& r, const RVec& x) const
    {
        double g = r.constant + r.linear.dot(x);
        for (std::size_t k = 0; k < r.arg_coeff.size(); ++k) {
            const double arg = r.arg_offset[k] + r.arg_coeff[k].dot(x);
            if (!(arg > 0.0))
                return std::numeric_limits<double>::infinity();
            g -= std::log(arg);
        }
        return g;
    }

    double row_value(const QuadRow& r, const RVec& x) const
    {
        return 0.5 * x.dot(r.Q * x) + r.q.dot(x) + r.q0;
    }

    double row_value(const LinearRow& r, const RVec& x) const { return r.a.dot(x) - r.b; }

    /// Largest constraint value over the scalar rows (<= 0 means feasible).
    double max_row_value(const RVec& x) const
    {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& r : log_rows)
            worst = std::max(worst, row_value(r, x));
        for (const auto& r : quad_rows)
            worst = std::max(worst, row_value(r, x));
        for (const auto& r : linear_rows)
            worst = std::max(worst, row_value(r, x));
        return worst;
    }

    double min_block_eigenvalue(const RVec& x) const
    {
        double lo = std::numeric_limits<double>::infinity();
        for (const auto& b : psd_blocks)
            if (b.dim > 0)
                lo = std::min(lo, min_eigenvalue(herm::unpack(x.data() + b.offset, b.dim)));
        return lo;
    }

    /// Copy with one extra variable s appended and every scalar row relaxed
    /// by -s; the objective becomes "maximize -s".
    CanonicalProblem phase_one() const
    {
        CanonicalProblem p;
        p.n = n + 1;
        auto grow = [this](const RVec& v) {
            RVec out = RVec::Zero(n + 1);
            out.head(n) = v;
            return out;
        };
        p.objective = RVec::Zero(n + 1);
        p.objective(n) = -1.0;
        for (const auto& r : log_rows) {
            LogRow s = r;
            s.linear = grow(r.linear);
            s.linear(n) = -1.0;
            for (auto& a : s.arg_coeff)
                a = grow(a);
            p.log_rows.push_back(std::move(s));
        }
        for (const auto& r : quad_rows) {
            QuadRow s;
            s.Q = RMat::Zero(n + 1, n + 1);
            s.Q.topLeftCorner(n, n) = r.Q;
            s.q = grow(r.q);
            s.q(n) = -1.0;
            s.q0 = r.q0;
            s.label = r.label;
            p.quad_rows.push_back(std::move(s));
        }
        for (const auto& r : linear_rows) {
            LinearRow s{grow(r.a), r.b, r.label};
            s.a(n) = -1.0;
            p.linear_rows.push_back(std::move(s));
        }
        p.psd_blocks = psd_blocks;
        return p;
    }
};

struct SolverOptions
{
    double feasibility_tol = 1e-8;
    double gap_tol = 1e-8;
    int max_iterations = 200; ///< Newton steps per barrier phase
};

enum class SolveStatus
{
    Optimal,
    Infeasible,
    NumericalFailure
};

inline const char* to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
    }
    return "?";
}

struct BarrierResult
{
    SolveStatus status = SolveStatus::NumericalFailure;
    RVec x;
    double objective = 0.0;
    double gap = std::numeric_limits<double>::infinity();
    int newton_steps = 0;
    double max_row = 0.0;   ///< final max scalar-row value
    double min_eig = 0.0;   ///< final min PSD-block eigenvalue
    std::string message;
};

class BarrierSolver
{
public:
    BarrierSolver(const CanonicalProblem& p, SolverOptions opts) : p_(p), opts_(opts) {}

    /// Maximizes from a strictly feasible x0.  `stop_early` is polled after
    /// every Newton step; returning true ends the solve as Optimal.
    BarrierResult maximize(RVec x, const std::function<bool(const RVec&)>& stop_early = {}) const
    {
        BarrierResult res;
        double t0 = 0.0;
        if (!barrier_value(x, 1.0, t0)) {
            res.x = x;
            res.message = "starting point is not strictly feasible";
            return res;
        }
        const double m = p_.barrier_degree();
        double t = 1.0;
        bool centered_once = false;
        for (;;) {
            const int rc = center(x, t, res.newton_steps, stop_early);
            if (rc == kStopped || (rc == kCentered && m / t <= opts_.gap_tol * std::max(1.0, std::abs(p_.objective.dot(x))))) {
                res.status = SolveStatus::Optimal;
                res.gap = m / t;
                break;
            }
            if (rc == kStalled) {
                // Line search cannot make progress at this t; accept if the
                // previous centering already certified a small gap.
                const double prev_gap = m / (t / kGrowth);
                if (centered_once && prev_gap <= 1e3 * opts_.gap_tol * std::max(1.0, std::abs(p_.objective.dot(x)))) {
                    res.status = SolveStatus::Optimal;
                    res.gap = prev_gap;
                } else {
                    res.message = "line search stalled at t = " + std::to_string(t);
                }
                break;
            }
            if (rc == kBudget) {
                res.message = "Newton iteration budget exhausted";
                break;
            }
            centered_once = true;
            t *= kGrowth;
        }
        res.x = x;
        res.objective = p_.objective.dot(x);
        res.max_row = p_.max_row_value(x);
        res.min_eig = p_.min_block_eigenvalue(x);
        return res;
    }

    /// Barrier value at t; false when x is outside the strict domain.
    bool barrier_value(const RVec& x, double t, double& value) const
    {
        double b = 0.0;
        if (!log_barrier(x, b))
            return false;
        value = b - t * p_.objective.dot(x);
        return std::isfinite(value);
    }

    /// Sum of the -log terms only; false outside the strict domain.
    bool log_barrier(const RVec& x, double& value) const
    {
        double v = 0.0;
        auto add_row = [&v](double g) {
            if (!(g < 0.0))
                return false;
            v -= std::log(-g);
            return true;
        };
        for (const auto& r : p_.log_rows)
            if (!add_row(p_.row_value(r, x)))
                return false;
        for (const auto& r : p_.quad_rows)
            if (!add_row(p_.row_value(r, x)))
                return false;
        for (const auto& r : p_.linear_rows)
            if (!add_row(p_.row_value(r, x)))
                return false;
        for (const auto& b : p_.psd_blocks) {
            if (b.dim == 0)
                continue;
            Eigen::LLT<CMat> llt(herm::unpack(x.data() + b.offset, b.dim));
            if (llt.info() != Eigen::Success)
                return false;
            double logdet = 0.0;
            for (int i = 0; i < b.dim; ++i) {
                const double d = llt.matrixL()(i, i).real();
                if (!(d > 0.0))
                    return false;
                logdet += 2.0 * std::log(d);
            }
            v -= logdet;
        }
        value = v;
        return std::isfinite(v);
    }

    void derivatives(const RVec& x, double t, RVec& grad, RMat& hess) const
    {
        const int n = p_.n;
        grad = -t * p_.objective;
        hess = RMat::Zero(n, n);
        auto add = [&](double g, const RVec& dg, const RMat* d2g) {
            const double inv = -1.0 / g; // g < 0
            grad += inv * dg;
            hess += (inv * inv) * dg * dg.transpose();
            if (d2g)
                hess += inv * (*d2g);
        };
        for (const auto& r : p_.log_rows) {
            RVec dg = r.linear;
            RMat d2g = RMat::Zero(n, n);
            for (std::size_t k = 0; k < r.arg_coeff.size(); ++k) {
                const double arg = r.arg_offset[k] + r.arg_coeff[k].dot(x);
                dg -= r.arg_coeff[k] / arg;
                d2g += (r.arg_coeff[k] * r.arg_coeff[k].transpose()) / (arg * arg);
            }
            add(p_.row_value(r, x), dg, &d2g);
        }
        for (const auto& r : p_.quad_rows)
            add(p_.row_value(r, x), r.Q * x + r.q, &r.Q);
        for (const auto& r : p_.linear_rows)
            add(p_.row_value(r, x), r.a, nullptr);
        for (const auto& b : p_.psd_blocks) {
            if (b.dim == 0)
                continue;
            const CMat X = herm::unpack(x.data() + b.offset, b.dim);
            const CMat Xinv = Eigen::LLT<CMat>(X).solve(CMat::Identity(b.dim, b.dim));
            const int np = herm::param_count(b.dim);
            grad.segment(b.offset, np) -= herm::trace_functional(Xinv);
            for (int k = 0; k < np; ++k) {
                const CMat G = Xinv * herm::basis(k, b.dim) * Xinv;
                hess.block(b.offset, b.offset + k, np, 1) += herm::trace_functional(hermitian_part(G));
            }
        }
    }

private:
    static constexpr double kGrowth = 20.0;
    static constexpr double kCenterTol = 1e-10;
    static constexpr int kCentered = 0, kStopped = 1, kStalled = 2, kBudget = 3;

    int center(RVec& x, double t, int& steps, const std::function<bool(const RVec&)>& stop_early) const
    {
        RVec grad;
        RMat hess;
        double bx = 0.0;
        log_barrier(x, bx);
        for (;;) {
            if (steps >= opts_.max_iterations)
                return kBudget;
            derivatives(x, t, grad, hess);
            hess = 0.5 * (hess + hess.transpose());
            // Symmetric diagonal scaling; row magnitudes differ by many orders
            // near the boundary.
            const RVec d = hess.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
            const RMat hs = d.asDiagonal() * hess * d.asDiagonal();
            const RVec gs = d.cwiseProduct(grad);
            Eigen::LDLT<RMat> ldlt(hs);
            RVec ys = ldlt.solve(gs);
            // Iterative refinement; the system is badly conditioned at large t.
            for (int r = 0; r < 2 && ys.allFinite(); ++r)
                ys += ldlt.solve(gs - hs * ys);
            RVec dx = -d.cwiseProduct(ys);
            double decrement = -grad.dot(dx);
            if (ldlt.info() != Eigen::Success || !dx.allFinite() || decrement < 0.0) {
                const RMat hr = hs + 1e-10 * RMat::Identity(p_.n, p_.n);
                dx = -d.cwiseProduct(hr.ldlt().solve(gs));
                decrement = -grad.dot(dx);
                if (!dx.allFinite() || decrement < 0.0)
                    return kStalled;
            }
            if (decrement * 0.5 <= kCenterTol)
                return kCentered;

            // The change of the linear term is exact; only the log terms are
            // differenced, which keeps the Armijo test above round-off.
            const double slope_obj = -t * p_.objective.dot(dx);
            double step = 1.0;
            double bnew = 0.0;
            RVec trial;
            bool accepted = false;
            for (int k = 0; k < 60; ++k, step *= 0.5) {
                trial = x + step * dx;
                if (!log_barrier(trial, bnew))
                    continue;
                const double change = (bnew - bx) + step * slope_obj;
                if (change <= -0.25 * step * decrement) {
                    accepted = true;
                    break;
                }
            }
            ++steps;
            if (!accepted) {
                if (decrement <= 1e-6)
                    return kCentered;
                return kStalled;
            }
            if ((trial.array() == x.array()).all())
                return decrement <= 1e-6 ? kCentered : kStalled; // step below round-off
            x = trial;
            bx = bnew;
            if (stop_early && stop_early(x))
                return kStopped;
            // A damped step at a tiny decrement means the Armijo test is
            // resolving round-off, not curvature.
            if (step < 1.0 && decrement <= 1e-6)
                return kCentered;
        }
    }

    const CanonicalProblem& p_;
    SolverOptions opts_;
};

} // namespace secbeam

#endif // SECBEAM_BARRIER_HPP
