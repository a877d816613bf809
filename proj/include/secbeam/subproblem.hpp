#ifndef SECBEAM_SUBPROBLEM_HPP
#define SECBEAM_SUBPROBLEM_HPP

// Convex subproblem solved at every outer iteration: the secrecy-rate rows
// with mu_j replaced by tangents, the outage rows with eta_2 / eta_3 replaced
// by tangents, two PSD blocks and the power budget.  Maximizes omega (or a
// common slack on the rate rows while searching for a feasible start).

#include "secbeam/barrier.hpp"
#include "secbeam/dc_transform.hpp"
#include "secbeam/model.hpp"

#include <array>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace secbeam {

enum class SubproblemObjective
{
    MaximizeOmega,
    MaximizeRateSlack
};

/// Structural variations used by the NOMA loop, the feasibility phase and
/// the orthogonal-slot baseline.
struct SubproblemShape
{
    SubproblemObjective objective = SubproblemObjective::MaximizeOmega;
    std::array<bool, 3> rate_active{true, true, true}; ///< rows for R_c, R_e, R_ce
    double rate_scale = 1.0; ///< targets multiplied by this (2 for a half-time slot)
    bool outage_rows = true;
    /// Orthonormal column bases restricting W = U X U^H; nullopt means the
    /// full space and a zero-column matrix fixes the block at zero.
    std::optional<CMat> basis_c;
    std::optional<CMat> basis_e;
    double zeta_cap = 1e6;
    double slack_floor = -1e3; ///< lower bound of the rate slack, in nats
    double slack_goal = 0.05;  ///< the slack objective stops once this margin is reached
};

struct SubproblemSpec
{
    int M = 0;
    std::shared_ptr<const CoefficientTable> table;
    NetworkInstance inst;
    SecrecyTargets targets;
    double rho = 0.0;
    CccpIterate anchor;
    SubproblemShape shape;
    CMat basis_c; ///< resolved bases (M x k)
    CMat basis_e;
    std::array<double, 3> rate_rhs{}; ///< right-hand sides in nats

    int block_dim_c() const { return static_cast<int>(basis_c.cols()); }
    int block_dim_e() const { return static_cast<int>(basis_e.cols()); }

    int log_rows() const
    {
        int n = 0;
        for (bool a : shape.rate_active)
            n += a ? 1 : 0;
        return n;
    }
    int quadratic_rows() const { return shape.outage_rows ? 2 : 0; }
    int power_rows() const { return 1; }
    int psd_blocks() const { return (block_dim_c() > 0 ? 1 : 0) + (block_dim_e() > 0 ? 1 : 0); }
    /// omega >= 1 and zeta >= 0.
    int scalar_bounds() const { return shape.outage_rows ? 2 : 0; }

    /// Coefficient of tr(H_b (W_c + W_e)) on the right of the eta_1 row.
    double phi_rhs_coefficient() const { return rho / inst.sigma2 * table->bd_c; }
    /// Coefficient of tr(H_b (W_c + W_e)) on the right of the eta_3 row.
    double eta3_rhs_coefficient() const { return table->bd_v; }
};

inline SubproblemSpec assemble(const NetworkInstance& inst, const SecrecyTargets& targets,
                               const CccpIterate& anchor,
                               std::shared_ptr<const CoefficientTable> tab,
                               SubproblemShape shape = {})
{
    inst.validate();
    targets.validate();
    anchor.validate(inst.P);
    if (!tab)
        throw std::invalid_argument("assemble: missing coefficient table");
    if (anchor.W_c.rows() != inst.antennas())
        throw std::invalid_argument("assemble: anchor dimension does not match the instance");
    if (shape.outage_rows && shape.objective == SubproblemObjective::MaximizeOmega &&
        tab->bd_c == 0.0)
        throw DeadBackscatterLink();

    SubproblemSpec s;
    s.M = inst.antennas();
    s.table = std::move(tab);
    s.inst = inst;
    s.targets = targets;
    s.rho = outage_rho(targets.epsilon);
    s.anchor = anchor;
    const CMat eye = CMat::Identity(s.M, s.M);
    s.basis_c = shape.basis_c.value_or(eye);
    s.basis_e = shape.basis_e.value_or(eye);
    if (s.basis_c.rows() != s.M || s.basis_e.rows() != s.M)
        throw std::invalid_argument("assemble: subspace basis has the wrong row count");
    const double ln2 = std::log(2.0);
    s.rate_rhs = {shape.rate_scale * targets.r_c * ln2, shape.rate_scale * targets.r_e * ln2,
                  shape.rate_scale * targets.r_e * ln2};
    s.shape = std::move(shape);
    return s;
}

/// Variable layout of the canonical form: [X_c | X_e | omega, zeta | slack].
struct CanonicalLayout
{
    int off_c = 0, off_e = 0, omega = -1, zeta = -1, slack = -1, n = 0;
    int kc = 0, ke = 0;
};

inline CanonicalLayout layout_of(const SubproblemSpec& s)
{
    CanonicalLayout l;
    l.kc = s.block_dim_c();
    l.ke = s.block_dim_e();
    l.off_c = 0;
    l.off_e = herm::param_count(l.kc);
    l.n = l.off_e + herm::param_count(l.ke);
    if (s.shape.outage_rows) {
        l.omega = l.n++;
        l.zeta = l.n++;
    }
    if (s.shape.objective == SubproblemObjective::MaximizeRateSlack)
        l.slack = l.n++;
    return l;
}

namespace detail {

/// Coefficients of tr(A_c W_c + A_e W_e) / sigma2 over the canonical
/// variables, where W = sigma2 * U X U^H.
inline RVec block_functional(const SubproblemSpec& s, const CanonicalLayout& l, const CMat& a_c,
                             const CMat& a_e)
{
    RVec v = RVec::Zero(l.n);
    if (l.kc > 0)
        v.segment(l.off_c, herm::param_count(l.kc)) =
            herm::trace_functional(s.basis_c.adjoint() * a_c * s.basis_c);
    if (l.ke > 0)
        v.segment(l.off_e, herm::param_count(l.ke)) =
            herm::trace_functional(s.basis_e.adjoint() * a_e * s.basis_e);
    return v;
}

inline void scale_row(QuadRow& r, const RVec& x)
{
    const double mag = std::abs(0.5 * x.dot(r.Q * x)) + std::abs(r.q.dot(x)) + std::abs(r.q0);
    const double k = 1.0 / std::max(1.0, mag);
    r.Q *= k;
    r.q *= k;
    r.q0 *= k;
}

} // namespace detail

/// Canonical variables of an iterate (projected on the subproblem's subspaces).
inline RVec to_canonical(const SubproblemSpec& s, const CccpIterate& it, double slack = 0.0)
{
    const CanonicalLayout l = layout_of(s);
    RVec x = RVec::Zero(l.n);
    const double s2 = s.inst.sigma2;
    if (l.kc > 0)
        herm::pack(s.basis_c.adjoint() * it.W_c * s.basis_c / s2, x.data() + l.off_c);
    if (l.ke > 0)
        herm::pack(s.basis_e.adjoint() * it.W_e * s.basis_e / s2, x.data() + l.off_e);
    if (l.omega >= 0) {
        x(l.omega) = it.omega;
        x(l.zeta) = it.zeta;
    }
    if (l.slack >= 0)
        x(l.slack) = slack;
    return x;
}

inline CccpIterate from_canonical(const SubproblemSpec& s, const RVec& x)
{
    const CanonicalLayout l = layout_of(s);
    const double s2 = s.inst.sigma2;
    CccpIterate it;
    it.W_c = CMat::Zero(s.M, s.M);
    it.W_e = CMat::Zero(s.M, s.M);
    if (l.kc > 0)
        it.W_c = hermitian_part(s2 * s.basis_c * herm::unpack(x.data() + l.off_c, l.kc) * s.basis_c.adjoint());
    if (l.ke > 0)
        it.W_e = hermitian_part(s2 * s.basis_e * herm::unpack(x.data() + l.off_e, l.ke) * s.basis_e.adjoint());
    it.omega = l.omega >= 0 ? x(l.omega) : 1.0;
    it.zeta = l.zeta >= 0 ? x(l.zeta) : 0.0;
    return it;
}

/// Lowers a SubproblemSpec into the solver's canonical form, with W normalized by sigma2.
inline CanonicalProblem canonicalize(const SubproblemSpec& s)
{
    const CanonicalLayout l = layout_of(s);
    const CoefficientTable& tab = *s.table;
    const double s2 = s.inst.sigma2;
    const CccpIterate& a = s.anchor;
    const RVec x_anchor = to_canonical(s, a);

    CanonicalProblem p;
    p.n = l.n;
    p.objective = RVec::Zero(l.n);
    if (s.shape.objective == SubproblemObjective::MaximizeOmega)
        p.objective(l.omega) = 1.0;
    else
        p.objective(l.slack) = 1.0;

    static const char* rate_names[3] = {"rate_c", "rate_e", "rate_ce"};
    for (int row = 0; row < 3; ++row) {
        if (!s.shape.rate_active[static_cast<std::size_t>(row)])
            continue;
        // rhs + slack - tau_j1 - tau_j2 + mu~_j1 + mu~_j2 <= 0
        LogRow r;
        r.label = rate_names[row];
        r.constant = s.rate_rhs[static_cast<std::size_t>(row)] - 2.0 * std::log(s2);
        r.linear = RVec::Zero(l.n);
        if (l.slack >= 0)
            r.linear(l.slack) = 1.0;
        for (int j = 2 * row + 1; j <= 2 * row + 2; ++j) {
            r.arg_offset.push_back(1.0);
            r.arg_coeff.push_back(detail::block_functional(s, l, tab.Phi(j), tab.Psi(j)));
            const double base = s2 + trace_product(tab.Sigma(j), a.W_c) + trace_product(tab.Theta(j), a.W_e);
            const double anchor_part = base - s2;
            r.constant += std::log(base) - anchor_part / base;
            r.linear += (s2 / base) * detail::block_functional(s, l, tab.Sigma(j), tab.Theta(j));
        }
        p.log_rows.push_back(std::move(r));
    }

    if (s.shape.outage_rows) {
        const RVec hb = detail::block_functional(s, l, tab.H_b, tab.H_b); // tr(H_b(W_c+W_e))/sigma2
        const RVec hv = detail::block_functional(s, l, tab.H_v, tab.H_v);
        RVec e_w = RVec::Zero(l.n), e_z = RVec::Zero(l.n);
        e_w(l.omega) = 1.0;
        e_z(l.zeta) = 1.0;

        // eta1 - eta2~ - phi <= 0
        {
            QuadRow r;
            r.label = "eta1";
            const RVec e = e_w + e_z;
            r.Q = e * e.transpose();
            r.q = e;
            r.q0 = 0.5;
            const double wl = a.omega, zl = a.zeta + 1.0;
            r.q -= wl * e_w + zl * e_z;
            r.q0 -= 0.5 * wl * wl + 0.5 * zl * zl - wl * a.omega - zl * a.zeta;
            r.q -= s.rho * tab.bd_c * hb;
            r.q0 -= 1.0;
            detail::scale_row(r, x_anchor);
            p.quad_rows.push_back(std::move(r));
        }
        // bd_v tr(H_b W) + eta4 - eta3~ <= 0
        {
            QuadRow r;
            r.label = "eta3";
            const double s4 = s2 * s2;
            r.Q = e_z * e_z.transpose() + s4 * hv * hv.transpose();
            r.q = s4 * hv;
            r.q0 = 0.5 * s4;
            const double varphi = trace_product(tab.H_v, a.W_c) + trace_product(tab.H_v, a.W_e);
            const double base = a.zeta + s2 + varphi;
            r.q -= base * e_z + base * s2 * hv;
            r.q0 -= 0.5 * base * base - base * a.zeta - base * varphi;
            r.q += tab.bd_v * s2 * hb;
            detail::scale_row(r, x_anchor);
            p.quad_rows.push_back(std::move(r));
        }
        p.linear_rows.push_back({-e_w, -1.0, "omega_min"});
        p.linear_rows.push_back({-e_z, 0.0, "zeta_min"});
        p.linear_rows.push_back({e_z / s.shape.zeta_cap, 1.0, "zeta_cap"});
    }

    {
        const CMat eye = CMat::Identity(s.M, s.M);
        LinearRow r;
        r.label = "power";
        r.a = detail::block_functional(s, l, eye, eye) * (s2 / s.inst.P);
        r.b = 1.0;
        p.linear_rows.push_back(std::move(r));
    }
    if (l.slack >= 0) {
        RVec e = RVec::Zero(l.n);
        e(l.slack) = -1.0;
        p.linear_rows.push_back({e, -s.shape.slack_floor, "slack_floor"});
    }
    if (l.kc > 0)
        p.psd_blocks.push_back({l.off_c, l.kc, "W_c"});
    if (l.ke > 0)
        p.psd_blocks.push_back({l.off_e, l.ke, "W_e"});
    return p;
}

/// Writes the canonical problem as text: one constraint per line, matrix
/// data row-major, 17 significant digits.
inline void dump_canonical(const CanonicalProblem& p, std::ostream& os)
{
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    auto vec = [&](const RVec& v) {
        std::string out;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            out += (i ? " " : "") + num(v(i));
        return out;
    };
    os << "variables " << p.n << "\n";
    os << "maximize " << vec(p.objective) << "\n";
    for (const auto& r : p.log_rows) {
        os << "log " << r.label << " constant " << num(r.constant) << " linear " << vec(r.linear);
        for (std::size_t k = 0; k < r.arg_coeff.size(); ++k)
            os << " minus_ln " << num(r.arg_offset[k]) << " " << vec(r.arg_coeff[k]);
        os << " <= 0\n";
    }
    for (const auto& r : p.quad_rows) {
        os << "quad " << r.label << " Q " << vec(Eigen::Map<const RVec>(r.Q.data(), r.Q.size()))
           << " q " << vec(r.q) << " q0 " << num(r.q0) << " <= 0\n";
    }
    for (const auto& r : p.linear_rows)
        os << "linear " << r.label << " a " << vec(r.a) << " <= " << num(r.b) << "\n";
    for (const auto& b : p.psd_blocks)
        os << "psd " << b.label << " offset " << b.offset << " dim " << b.dim << "\n";
}

struct SubproblemResult
{
    SolveStatus status = SolveStatus::NumericalFailure;
    CccpIterate iterate;
    double objective = 0.0;   ///< omega, or the rate slack in nats
    double slack = 0.0;
    int newton_steps = 0;
    double max_row = 0.0;
    double min_eig = 0.0;
    bool zeta_cap_active = false;
    std::string message;
};

inline SubproblemResult solve_subproblem(const SubproblemSpec& spec, const SolverOptions& opts = {})
{
    const CanonicalProblem p = canonicalize(spec);
    const CanonicalLayout l = layout_of(spec);
    BarrierSolver solver(p, opts);
    SubproblemResult out;

    // Anchor first (strictly feasible by tangency once the loop is running),
    // otherwise a phase-one search from a pulled-in anchor.
    double slack0 = 0.0;
    if (l.slack >= 0) {
        slack0 = spec.shape.slack_floor * 0.5;
    }
    RVec x0 = to_canonical(spec, spec.anchor, slack0);
    if (l.omega >= 0)
        x0(l.omega) = std::max(x0(l.omega), 1.0);
    // A point hugging the boundary makes the first centering ill-conditioned,
    // so the anchor is always pulled slightly inward.
    {
        const double shrink = 1e-3;
        const int k = l.kc + l.ke;
        const double fill = 0.5 * spec.inst.P / spec.inst.sigma2 / std::max(1, k);
        auto pull = [&](int off, int dim) {
            if (dim == 0)
                return;
            CMat X = herm::unpack(x0.data() + off, dim);
            X = (1.0 - shrink) * X + shrink * fill * CMat::Identity(dim, dim);
            herm::pack(X, x0.data() + off);
        };
        pull(l.off_c, l.kc);
        pull(l.off_e, l.ke);
        if (l.omega >= 0) {
            x0(l.omega) += shrink;
            x0(l.zeta) += shrink;
        }
    }
    double probe = 0.0;
    if (!solver.barrier_value(x0, 1.0, probe)) {
        const CanonicalProblem p1 = p.phase_one();
        RVec y0(p1.n);
        y0.head(p.n) = x0;
        y0(p.n) = std::max(0.0, p.max_row_value(x0)) + 1.0;
        BarrierSolver phase1(p1, opts);
        const int s_idx = p.n;
        const BarrierResult r1 = phase1.maximize(y0, [s_idx](const RVec& y) { return y(s_idx) < -1e-4; });
        out.newton_steps += r1.newton_steps;
        if (r1.status == SolveStatus::NumericalFailure && !(r1.x.size() == p1.n && r1.x(s_idx) < 0.0)) {
            out.status = SolveStatus::NumericalFailure;
            out.message = "phase one: " + r1.message;
            out.max_row = r1.max_row;
            return out;
        }
        if (!(r1.x(s_idx) < -1e-12)) {
            out.status = SolveStatus::Infeasible;
            out.message = "no strictly feasible point (phase-one optimum " + std::to_string(r1.x(s_idx)) + ")";
            out.max_row = r1.x(s_idx);
            return out;
        }
        x0 = r1.x.head(p.n);
    }

    std::function<bool(const RVec&)> stop;
    if (l.slack >= 0) {
        const int idx = l.slack;
        const double goal = spec.shape.slack_goal;
        stop = [idx, goal](const RVec& x) { return x(idx) >= goal; };
    }
    const BarrierResult r = solver.maximize(x0, stop);
    out.newton_steps += r.newton_steps;
    out.status = r.status;
    out.message = r.message;
    out.iterate = from_canonical(spec, r.x);
    out.objective = r.objective;
    out.slack = l.slack >= 0 ? r.x(l.slack) : 0.0;
    out.max_row = r.max_row;
    out.min_eig = r.min_eig;
    out.zeta_cap_active = l.zeta >= 0 && r.x(l.zeta) > 0.99 * spec.shape.zeta_cap;
    return out;
}

} // namespace secbeam

#endif // SECBEAM_SUBPROBLEM_HPP
