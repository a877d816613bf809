#ifndef SECBEAM_TESTS_SUPPORT_HPP
#define SECBEAM_TESTS_SUPPORT_HPP

// Shared fixtures and loop-based oracles.  The oracles avoid the library's
// matrix forms on purpose: inner products and SINRs are written out directly.

#include "secbeam/secbeam.hpp"

#include <cmath>
#include <complex>
#include <cstdint>

namespace testsupport {

using secbeam::BeamPair;
using secbeam::CMat;
using secbeam::CVec;
using secbeam::cplx;
using secbeam::NetworkInstance;

/// Toy instance: M = 2, sigma2 = 1, alpha = 0.5, h_b = h_c = [1, 0], g_c = 1,
/// no eavesdropper; beams w_c = [2, 0], w_e = [0, 1].
inline NetworkInstance t1()
{
    NetworkInstance inst;
    inst.h_c = CVec::Zero(2);
    inst.h_c(0) = 1.0;
    inst.h_e = CVec::Zero(2);
    inst.h_e(1) = 1.0;
    inst.h_b = CVec::Zero(2);
    inst.h_b(0) = 1.0;
    inst.h_v = CVec::Zero(2);
    inst.g_c = 1.0;
    inst.g_e = 0.0;
    inst.g_v = 0.0;
    inst.alpha = 0.5;
    inst.sigma2 = 1.0;
    inst.P = 10.0;
    return inst;
}

inline BeamPair t1_beams()
{
    BeamPair b;
    b.w_c = CVec::Zero(2);
    b.w_c(0) = 2.0;
    b.w_e = CVec::Zero(2);
    b.w_e(1) = 1.0;
    return b;
}

/// |sum_i conj(h_i) w_i|^2
inline double gain(const CVec& h, const CVec& w)
{
    cplx acc = 0.0;
    for (Eigen::Index i = 0; i < h.size(); ++i)
        acc += std::conj(h(i)) * w(i);
    return std::norm(acc);
}

struct Oracle
{
    double f, gamma_cc, gamma_ce, gamma_vc, gamma_vb, gamma_ee, gamma_ve;
    double R_c, R_e, R_ce;
};

/// SINRs written out per receiver: central user (SIC of s_e, then s_c),
/// cell-edge user and eavesdropper, with the BD reflection as interference.
inline Oracle oracle(const NetworkInstance& n, const BeamPair& b)
{
    Oracle o{};
    o.f = gain(n.h_b, b.w_c) + gain(n.h_b, b.w_e);
    const double ac = n.alpha * std::norm(n.g_c) * o.f;
    const double ae = n.alpha * std::norm(n.g_e) * o.f;
    const double av = n.alpha * std::norm(n.g_v) * o.f;
    const double s = n.sigma2;
    o.gamma_ce = gain(n.h_c, b.w_e) / (gain(n.h_c, b.w_c) + ac + s);
    o.gamma_cc = gain(n.h_c, b.w_c) / (ac + s);
    o.gamma_ee = gain(n.h_e, b.w_e) / (gain(n.h_e, b.w_c) + ae + s);
    o.gamma_vc = gain(n.h_v, b.w_c) / (gain(n.h_v, b.w_e) + av + s);
    o.gamma_ve = gain(n.h_v, b.w_e) / (gain(n.h_v, b.w_c) + av + s);
    o.gamma_vb = av / (gain(n.h_v, b.w_c) + gain(n.h_v, b.w_e) + s);
    o.R_c = std::log((1 + o.gamma_cc) / (1 + o.gamma_vc)) / std::log(2.0);
    o.R_e = std::log((1 + o.gamma_ee) / (1 + o.gamma_ve)) / std::log(2.0);
    o.R_ce = std::log((1 + o.gamma_ce) / (1 + o.gamma_ve)) / std::log(2.0);
    return o;
}

/// Random beams with total power drawn uniformly in (0, P].
inline BeamPair random_beams(secbeam::SplitMix64& rng, int m, double P)
{
    BeamPair b;
    b.w_c = rng.complex_normal_vector(m);
    b.w_e = rng.complex_normal_vector(m);
    const double total = P * rng.uniform();
    const double share = rng.uniform();
    b.w_c *= std::sqrt(share * total) / b.w_c.norm();
    b.w_e *= std::sqrt((1.0 - share) * total) / b.w_e.norm();
    return b;
}

/// Random PSD matrix of rank up to m with the given trace.
inline CMat random_psd(secbeam::SplitMix64& rng, int m, double trace)
{
    CMat g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            g(i, j) = rng.complex_normal();
    CMat w = g * g.adjoint();
    return w * (trace / w.trace().real());
}

} // namespace testsupport

#endif // SECBEAM_TESTS_SUPPORT_HPP
