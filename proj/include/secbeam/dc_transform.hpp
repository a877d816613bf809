#ifndef SECBEAM_DC_TRANSFORM_HPP
#define SECBEAM_DC_TRANSFORM_HPP

// Difference-of-convex reformulation of the secrecy-rate and outage
// constraints in terms of W_c = w_c w_c^H and W_e = w_e w_e^H, plus the
// first-order expansions used by the convex-concave procedure.

#include "secbeam/linalg.hpp"
#include "secbeam/model.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace secbeam {

/// Coefficient matrices of the twelve log terms.  Index j runs 1..6:
///   R_c  = (tau_1 + tau_2 - mu_1 - mu_2) / ln 2
///   R_e  = (tau_3 + tau_4 - mu_3 - mu_4) / ln 2
///   R_ce = (tau_5 + tau_6 - mu_5 - mu_6) / ln 2
/// with tau_j = ln(sigma2 + tr(Phi_j W_c + Psi_j W_e)) and
///      mu_j  = ln(sigma2 + tr(Sigma_j W_c + Theta_j W_e)).
class CoefficientTable
{
public:
    CoefficientTable() = default;

    explicit CoefficientTable(const NetworkInstance& inst)
    {
        inst.validate();
        H_c = outer(inst.h_c);
        H_e = outer(inst.h_e);
        H_b = outer(inst.h_b);
        H_v = outer(inst.h_v);
        bd_c = inst.bd_gain_c();
        bd_e = inst.bd_gain_e();
        bd_v = inst.bd_gain_v();

        const CMat c_mix = H_c + bd_c * H_b;
        const CMat e_mix = H_e + bd_e * H_b;
        const CMat v_mix = H_v + bd_v * H_b;
        const CMat c_bd = bd_c * H_b;
        const CMat e_bd = bd_e * H_b;
        const CMat v_bd = bd_v * H_b;

        // j = 1: central-user rate, numerator / denominator of 1 + gamma_cc
        phi_[0] = c_mix;  psi_[0] = c_bd;   sigma_[0] = c_bd;   theta_[0] = c_bd;
        // j = 2: eavesdropper leakage of s_c
        phi_[1] = v_bd;   psi_[1] = v_mix;  sigma_[1] = v_mix;  theta_[1] = v_mix;
        // j = 3: cell-edge user rate
        phi_[2] = e_mix;  psi_[2] = e_mix;  sigma_[2] = e_mix;  theta_[2] = e_bd;
        // j = 4: eavesdropper leakage of s_e
        phi_[3] = v_mix;  psi_[3] = v_bd;   sigma_[3] = v_mix;  theta_[3] = v_mix;
        // j = 5: s_e decoded at the central user
        phi_[4] = c_mix;  psi_[4] = c_mix;  sigma_[4] = c_mix;  theta_[4] = c_bd;
        // j = 6: same leakage as j = 4
        phi_[5] = v_mix;  psi_[5] = v_bd;   sigma_[5] = v_mix;  theta_[5] = v_mix;
    }

    const CMat& Phi(int j) const { return phi_[index(j)]; }
    const CMat& Psi(int j) const { return psi_[index(j)]; }
    const CMat& Sigma(int j) const { return sigma_[index(j)]; }
    const CMat& Theta(int j) const { return theta_[index(j)]; }

    int antennas() const { return static_cast<int>(H_c.rows()); }

    CMat H_c, H_e, H_b, H_v;
    double bd_c = 0.0; ///< alpha |g_c|^2
    double bd_e = 0.0; ///< alpha |g_e|^2
    double bd_v = 0.0; ///< alpha |g_v|^2

private:
    static std::size_t index(int j)
    {
        if (j < 1 || j > 6)
            throw std::out_of_range("coefficient index must lie in 1..6");
        return static_cast<std::size_t>(j - 1);
    }

    std::array<CMat, 6> phi_, psi_, sigma_, theta_;
};

inline CoefficientTable build_coeff_tables(const NetworkInstance& inst)
{
    return CoefficientTable(inst);
}

/// One point of the convex-concave iteration: (W_c, W_e, omega = 2^r_b, zeta).
struct CccpIterate
{
    CMat W_c;
    CMat W_e;
    double omega = 1.0;
    double zeta = 0.0;

    static CccpIterate from_beams(const BeamPair& b, double omega, double zeta)
    {
        return {outer(b.w_c), outer(b.w_e), omega, zeta};
    }

    void validate(double power_budget) const
    {
        if (W_c.rows() != W_e.rows())
            throw std::invalid_argument("CccpIterate: W_c and W_e differ in size");
        checked_psd(W_c, "CccpIterate W_c");
        checked_psd(W_e, "CccpIterate W_e");
        if (!(omega >= 1.0) || !std::isfinite(omega))
            throw std::invalid_argument("CccpIterate: omega must be >= 1");
        if (!(zeta >= 0.0) || !std::isfinite(zeta))
            throw std::invalid_argument("CccpIterate: zeta must be >= 0");
        const double power = W_c.trace().real() + W_e.trace().real();
        if (power > power_budget * (1.0 + 1e-6))
            throw std::invalid_argument("CccpIterate: power budget exceeded");
    }
};

struct LogPair
{
    double tau = 0.0;
    double mu = 0.0;
};

inline LogPair tau_mu(int j, const CoefficientTable& tab, const NetworkInstance& inst,
                      const CMat& W_c, const CMat& W_e)
{
    const CMat wc = checked_psd(W_c, "tau_mu W_c");
    const CMat we = checked_psd(W_e, "tau_mu W_e");
    LogPair out;
    out.tau = std::log(inst.sigma2 + trace_product(tab.Phi(j), wc) + trace_product(tab.Psi(j), we));
    out.mu = std::log(inst.sigma2 + trace_product(tab.Sigma(j), wc) + trace_product(tab.Theta(j), we));
    return out;
}

struct OutageTerms
{
    double lambda = 0.0; ///< tr(H_b (W_c + W_e)), the nonzero eigenvalue of the symbol quadratic form
    double xi = 0.0;     ///< threshold on lambda |s_1|^2
    double rho = 0.0;    ///< -ln(1 - epsilon)
};

/// Thrown when alpha |g_c|^2 = 0 and the BD link carries no information.
struct DeadBackscatterLink : std::domain_error
{
    DeadBackscatterLink() : std::domain_error("dead BD link: alpha |g_c|^2 = 0") {}
};

inline OutageTerms lambda_xi_rho(const NetworkInstance& inst, const CMat& W_c, const CMat& W_e,
                                 double omega, double zeta, double epsilon)
{
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("lambda_xi_rho: epsilon must lie in (0,1)");
    if (!(omega >= 1.0) || !(zeta >= 0.0))
        throw std::invalid_argument("lambda_xi_rho: requires omega >= 1 and zeta >= 0");
    const double k = inst.bd_gain_c();
    if (k == 0.0)
        throw DeadBackscatterLink();
    const CMat hb = outer(inst.h_b);
    OutageTerms t;
    t.lambda = trace_product(hb, W_c) + trace_product(hb, W_e);
    t.xi = inst.sigma2 * (omega * (zeta + 1.0) - 1.0) / k;
    t.rho = outage_rho(epsilon);
    return t;
}

struct EtaValues
{
    double eta1 = 0.0, eta2 = 0.0, eta3 = 0.0, eta4 = 0.0;
};

/// eta1 - eta2 = omega (zeta + 1) and eta3 - eta4 = zeta (sigma2 + tr(H_v (W_c + W_e))).
inline EtaValues eta_values(double omega, double zeta, const NetworkInstance& inst,
                            const CMat& W_c, const CMat& W_e)
{
    const CMat hv = outer(inst.h_v);
    const double leak = inst.sigma2 + trace_product(hv, W_c) + trace_product(hv, W_e);
    EtaValues e;
    e.eta1 = 0.5 * (omega + zeta + 1.0) * (omega + zeta + 1.0);
    e.eta2 = 0.5 * omega * omega + 0.5 * (zeta + 1.0) * (zeta + 1.0);
    e.eta3 = 0.5 * (zeta + leak) * (zeta + leak);
    e.eta4 = 0.5 * zeta * zeta + 0.5 * leak * leak;
    return e;
}

/// Tangent upper bound of mu_j at the anchor, evaluated at (W_c, W_e).
inline double linearize_mu(int j, const CoefficientTable& tab, const NetworkInstance& inst,
                           const CccpIterate& anchor, const CMat& W_c, const CMat& W_e)
{
    const double base = inst.sigma2 + trace_product(tab.Sigma(j), anchor.W_c) +
                        trace_product(tab.Theta(j), anchor.W_e);
    if (!(base > 0.0))
        throw std::invalid_argument("linearize_mu: anchor log argument is not positive");
    const double step = trace_product(tab.Sigma(j), W_c - anchor.W_c) +
                        trace_product(tab.Theta(j), W_e - anchor.W_e);
    return std::log(base) + step / base;
}

/// Tangent lower bound of eta2 at the anchor's (omega, zeta).
inline double linearize_eta2(const CccpIterate& anchor, double omega, double zeta)
{
    const double wl = anchor.omega;
    const double zl = anchor.zeta + 1.0;
    return 0.5 * wl * wl + 0.5 * zl * zl + wl * (omega - anchor.omega) + zl * (zeta - anchor.zeta);
}

/// Tangent of eta3 at the anchor.  eta3 is convex, so this is a global lower bound.
inline double linearize_eta3(const CccpIterate& anchor, const NetworkInstance& inst, double zeta,
                             const CMat& W_c, const CMat& W_e)
{
    const CMat hv = outer(inst.h_v);
    const double varphi = trace_product(hv, anchor.W_c) + trace_product(hv, anchor.W_e);
    const double leak_now = trace_product(hv, W_c) + trace_product(hv, W_e);
    const double base = anchor.zeta + inst.sigma2 + varphi;
    return 0.5 * base * base + base * (zeta - anchor.zeta + leak_now - varphi);
}

} // namespace secbeam

#endif // SECBEAM_DC_TRANSFORM_HPP
