#ifndef SECBEAM_MODEL_HPP
#define SECBEAM_MODEL_HPP

// Problem data and the exact SINR / secrecy-rate / outage expressions of the
// two-user NOMA downlink with a backscatter device (BD) and an eavesdropper.
//
// Conventions: all powers linear, rates in bits/s/Hz, one noise power sigma2
// at every receiver.  The BD symbol is taken unit-modulus in realizations.

#include "secbeam/linalg.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace secbeam {

struct NetworkInstance
{
    CVec h_c; ///< BS -> central user
    CVec h_e; ///< BS -> cell-edge user
    CVec h_b; ///< BS -> BD
    CVec h_v; ///< BS -> eavesdropper
    cplx g_c{0.0, 0.0}; ///< BD -> central user
    cplx g_e{0.0, 0.0}; ///< BD -> cell-edge user
    cplx g_v{0.0, 0.0}; ///< BD -> eavesdropper
    double alpha = 0.5;
    double sigma2 = 1.0;
    double P = 1000.0;

    int antennas() const { return static_cast<int>(h_c.size()); }

    /// alpha |g|^2 for the three BD links.
    double bd_gain_c() const { return alpha * std::norm(g_c); }
    double bd_gain_e() const { return alpha * std::norm(g_e); }
    double bd_gain_v() const { return alpha * std::norm(g_v); }

    void validate() const
    {
        const auto m = h_c.size();
        if (m < 1)
            throw std::invalid_argument("NetworkInstance: at least one antenna required");
        if (h_e.size() != m || h_b.size() != m || h_v.size() != m)
            throw std::invalid_argument("NetworkInstance: channel vectors must all have length M");
        if (!h_c.allFinite() || !h_e.allFinite() || !h_b.allFinite() || !h_v.allFinite())
            throw std::invalid_argument("NetworkInstance: non-finite channel entry");
        auto finite = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
        if (!finite(g_c) || !finite(g_e) || !finite(g_v))
            throw std::invalid_argument("NetworkInstance: non-finite BD channel");
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw std::invalid_argument("NetworkInstance: alpha must lie in [0,1]");
        if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
            throw std::invalid_argument("NetworkInstance: sigma2 must be positive");
        if (!(P > 0.0) || !std::isfinite(P))
            throw std::invalid_argument("NetworkInstance: P must be positive");
    }
};

struct SecrecyTargets
{
    double r_c = 0.0;
    double r_e = 0.0;
    double epsilon = 0.1;

    void validate() const
    {
        if (!(r_c >= 0.0) || !(r_e >= 0.0) || !std::isfinite(r_c) || !std::isfinite(r_e))
            throw std::invalid_argument("SecrecyTargets: rate targets must be finite and nonnegative");
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw std::invalid_argument("SecrecyTargets: epsilon must lie in (0,1)");
    }
};

struct BeamPair
{
    CVec w_c;
    CVec w_e;

    double power() const { return w_c.squaredNorm() + w_e.squaredNorm(); }
};

struct DirectSinrs
{
    double gamma_ce = 0.0; ///< s_e at the central user, before SIC
    double gamma_cc = 0.0; ///< s_c at the central user, after SIC
    double gamma_vc = 0.0; ///< s_c at the eavesdropper
    double gamma_vb = 0.0; ///< s_b at the eavesdropper
    double gamma_ee = 0.0; ///< s_e at the cell-edge user
    double gamma_ve = 0.0; ///< s_e at the eavesdropper
};

struct SecrecyRates
{
    double R_c = 0.0;
    double R_e = 0.0;
    double R_ce = 0.0;
};

namespace detail {

inline void check_dims(const NetworkInstance& inst, const BeamPair& b)
{
    const auto m = inst.h_c.size();
    if (b.w_c.size() != m || b.w_e.size() != m)
        throw std::invalid_argument("beam length does not match the antenna count");
    if (inst.h_b.size() != m || inst.h_e.size() != m || inst.h_v.size() != m)
        throw std::invalid_argument("channel length does not match the antenna count");
}

inline double gain(const CVec& h, const CVec& w)
{
    return std::norm(h.dot(w)); // Eigen's dot conjugates the first argument: h^H w
}

} // namespace detail

/// f = |h_b^H w_c|^2 + |h_b^H w_e|^2, the average power incident on the BD.
inline double backscatter_gain(const NetworkInstance& inst, const BeamPair& b)
{
    detail::check_dims(inst, b);
    return detail::gain(inst.h_b, b.w_c) + detail::gain(inst.h_b, b.w_e);
}

inline DirectSinrs direct_sinrs(const NetworkInstance& inst, const BeamPair& b)
{
    detail::check_dims(inst, b);
    using detail::gain;
    const double s2 = inst.sigma2;
    const double f = backscatter_gain(inst, b);
    const double bc = inst.bd_gain_c() * f;
    const double be = inst.bd_gain_e() * f;
    const double bv = inst.bd_gain_v() * f;

    const double cc = gain(inst.h_c, b.w_c), ce = gain(inst.h_c, b.w_e);
    const double ec = gain(inst.h_e, b.w_c), ee = gain(inst.h_e, b.w_e);
    const double vc = gain(inst.h_v, b.w_c), ve = gain(inst.h_v, b.w_e);

    DirectSinrs s;
    s.gamma_ce = ce / (s2 + cc + bc);
    s.gamma_cc = cc / (s2 + bc);
    s.gamma_vc = vc / (s2 + ve + bv);
    s.gamma_vb = bv / (s2 + vc + ve);
    s.gamma_ee = ee / (s2 + ec + be);
    s.gamma_ve = ve / (s2 + vc + bv);
    return s;
}

/// Per-realization SINR of the BD symbol at the central user after both SIC stages.
inline double gamma_cb_realized(const NetworkInstance& inst, const BeamPair& b, cplx s_c, cplx s_e)
{
    detail::check_dims(inst, b);
    const cplx mix = inst.h_b.dot(b.w_c) * s_c + inst.h_b.dot(b.w_e) * s_e;
    return inst.bd_gain_c() * std::norm(mix) / inst.sigma2;
}

/// Secrecy rates, deliberately not clipped at zero.
inline SecrecyRates secrecy_rates(const NetworkInstance& inst, const BeamPair& b)
{
    const DirectSinrs s = direct_sinrs(inst, b);
    SecrecyRates r;
    r.R_c = std::log2(1.0 + s.gamma_cc) - std::log2(1.0 + s.gamma_vc);
    r.R_e = std::log2(1.0 + s.gamma_ee) - std::log2(1.0 + s.gamma_ve);
    r.R_ce = std::log2(1.0 + s.gamma_ce) - std::log2(1.0 + s.gamma_ve);
    return r;
}

/// rho = -ln(1 - epsilon), the exponential-tail constant.
inline double outage_rho(double epsilon)
{
    return -std::log1p(-epsilon);
}

/// Closed-form Pr(R_b >= r_b) over Gaussian (s_c, s_e) with the eavesdropper
/// SINR of the BD symbol taken at its averaged value.
inline double rb_outage_success(const NetworkInstance& inst, const BeamPair& b, double r_b)
{
    if (!(r_b >= 0.0))
        throw std::invalid_argument("rb_outage_success: r_b must be nonnegative");
    const double zeta_bar = direct_sinrs(inst, b).gamma_vb;
    const double omega = std::exp2(r_b);
    const double lambda = backscatter_gain(inst, b);
    const double k = inst.bd_gain_c();
    const double excess = omega * (zeta_bar + 1.0);
    if (k == 0.0)
        return excess > 1.0 ? 0.0 : 1.0;
    const double xi = inst.sigma2 * (excess - 1.0) / k;
    if (xi <= 0.0)
        return 1.0;
    if (lambda == 0.0)
        return 0.0;
    return std::exp(-xi / lambda);
}

/// Largest r_b >= 0 whose closed-form success probability is at least
/// 1 - epsilon for fixed beams; empty when even r_b = 0 misses the target.
inline std::optional<double> max_outage_rate(const NetworkInstance& inst, const BeamPair& b,
                                             double epsilon)
{
    const double zeta_bar = direct_sinrs(inst, b).gamma_vb;
    const double lambda = backscatter_gain(inst, b);
    const double omega_max =
        (1.0 + outage_rho(epsilon) * inst.bd_gain_c() * lambda / inst.sigma2) / (1.0 + zeta_bar);
    if (omega_max < 1.0)
        return std::nullopt;
    return std::log2(omega_max);
}

} // namespace secbeam

#endif // SECBEAM_MODEL_HPP
