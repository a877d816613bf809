#ifndef SECBEAM_RANDOM_HPP
#define SECBEAM_RANDOM_HPP

// Counter-derived random streams.  A stream is identified by (seed, index),
// so trial i draws the same numbers regardless of evaluation order.

#include "secbeam/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

namespace secbeam {

class SplitMix64
{
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    SplitMix64(std::uint64_t seed, std::uint64_t stream)
        : state_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL)))
    {}

    std::uint64_t next()
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform in (0, 1], never zero.
    double uniform()
    {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cplx complex_normal(double variance = 1.0)
    {
        const double radius = std::sqrt(-variance * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

    CVec complex_normal_vector(Eigen::Index n, double variance = 1.0)
    {
        CVec v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v(i) = complex_normal(variance);
        return v;
    }

private:
    static std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace secbeam

#endif // SECBEAM_RANDOM_HPP
