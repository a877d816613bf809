#ifndef SECBEAM_MONTECARLO_HPP
#define SECBEAM_MONTECARLO_HPP

// Rayleigh instance generation and empirical checks of the outage law.

#include "secbeam/model.hpp"
#include "secbeam/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace secbeam {

/// Channel statistics of the simulated deployment.  Variances are per entry.
struct ChannelProfile
{
    int M = 4;
    double var_h_c = 1.0;
    double var_h_e = 1.0 / 125.0; // 5^-3
    double var_h_b = 1.0;
    double var_h_v = 1e-3;
    double var_g_c = 1.0;
    double var_g_e = 1.0 / 125.0;
    double var_g_v = 1e-3;
    double alpha = 0.5;
    double snr_db = 30.0; ///< P / sigma2
    double epsilon = 0.1;

    void validate() const
    {
        if (M < 1)
            throw std::invalid_argument("ChannelProfile: M must be at least 1");
        for (double v : {var_h_c, var_h_e, var_h_b, var_h_v, var_g_c, var_g_e, var_g_v})
            if (!(v > 0.0) || !std::isfinite(v))
                throw std::invalid_argument("ChannelProfile: variances must be positive");
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw std::invalid_argument("ChannelProfile: alpha must lie in [0,1]");
        if (!std::isfinite(snr_db))
            throw std::invalid_argument("ChannelProfile: snr_db must be finite");
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw std::invalid_argument("ChannelProfile: epsilon must lie in (0,1)");
    }
};

/// sigma2 = 1 and P = 10^(snr_db / 10); identical output for identical seeds.
inline NetworkInstance sample_instance(const ChannelProfile& profile, std::uint64_t seed)
{
    profile.validate();
    SplitMix64 rng(seed, 0x5eedULL);
    NetworkInstance inst;
    inst.h_c = rng.complex_normal_vector(profile.M, profile.var_h_c);
    inst.h_e = rng.complex_normal_vector(profile.M, profile.var_h_e);
    inst.h_b = rng.complex_normal_vector(profile.M, profile.var_h_b);
    inst.h_v = rng.complex_normal_vector(profile.M, profile.var_h_v);
    inst.g_c = rng.complex_normal(profile.var_g_c);
    inst.g_e = rng.complex_normal(profile.var_g_e);
    inst.g_v = rng.complex_normal(profile.var_g_v);
    inst.alpha = profile.alpha;
    inst.sigma2 = 1.0;
    inst.P = std::pow(10.0, profile.snr_db / 10.0);
    return inst;
}

struct MonteCarloReport
{
    long long trials = 0;
    long long successes = 0;
    double empirical = 0.0;
    double closed_form = 0.0;
    double half_width = 0.0; ///< 3 sqrt(p (1 - p) / N) at the closed-form p
    bool pass = false;
};

/// Draws (s_c, s_e) ~ CN(0, I) per trial; trial i uses stream (seed, i).
/// Success: 1 + gamma_cb >= 2^r_b (1 + gamma_vb).
inline MonteCarloReport estimate_outage(const NetworkInstance& inst, const BeamPair& b, double r_b,
                                        long long n, std::uint64_t seed)
{
    if (n < 1)
        throw std::invalid_argument("estimate_outage: at least one trial required");
    const double zeta_bar = direct_sinrs(inst, b).gamma_vb;
    const double threshold = std::exp2(r_b) * (1.0 + zeta_bar);
    const cplx a_c = inst.h_b.dot(b.w_c);
    const cplx a_e = inst.h_b.dot(b.w_e);
    const double scale = inst.bd_gain_c() / inst.sigma2;

    MonteCarloReport rep;
    rep.trials = n;
    for (long long i = 0; i < n; ++i) {
        SplitMix64 rng(seed, static_cast<std::uint64_t>(i));
        const cplx s_c = rng.complex_normal();
        const cplx s_e = rng.complex_normal();
        const double gamma_cb = scale * std::norm(a_c * s_c + a_e * s_e);
        if (1.0 + gamma_cb >= threshold)
            ++rep.successes;
    }
    rep.empirical = static_cast<double>(rep.successes) / static_cast<double>(n);
    rep.closed_form = rb_outage_success(inst, b, r_b);
    const double p = rep.closed_form;
    rep.half_width = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    rep.pass = std::abs(rep.empirical - rep.closed_form) <= rep.half_width;
    return rep;
}

/// Samples of |h_b^H w_c s_c + h_b^H w_e s_e|^2.
inline std::vector<double> sample_quadratic_form(const NetworkInstance& inst, const BeamPair& b,
                                                 long long n, std::uint64_t seed)
{
    const cplx a_c = inst.h_b.dot(b.w_c);
    const cplx a_e = inst.h_b.dot(b.w_e);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        SplitMix64 rng(seed, static_cast<std::uint64_t>(i));
        const cplx s_c = rng.complex_normal();
        const cplx s_e = rng.complex_normal();
        out[static_cast<std::size_t>(i)] = std::norm(a_c * s_c + a_e * s_e);
    }
    return out;
}

/// Kolmogorov-Smirnov distance between samples and Exponential(mean).
inline double ks_exponential(std::vector<double> samples, double mean)
{
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf = 1.0 - std::exp(-samples[i] / mean);
        d = std::max({d, cdf - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - cdf});
    }
    return d;
}

} // namespace secbeam

#endif // SECBEAM_MONTECARLO_HPP
