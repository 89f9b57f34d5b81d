#ifndef PLCSEG_RANDOM_HPP
#define PLCSEG_RANDOM_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>

namespace plcseg {

/**
 * Seeded random source with a fully specified output sequence.
 *
 * The engine is std::mt19937_64, whose sequence the C++ standard fixes. The
 * distributions are written out here instead of using <random>'s, whose
 * algorithms are implementation-defined:
 *   uniform01  = (next() >> 11) * 2^-53
 *   index(n)   = rejection sampling on next() below the largest multiple of n
 *   normal     = Box-Muller, cosine branch only
 */
class random_source
{
  public:
    explicit random_source(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::size_t index(std::size_t n)
    {
        const std::uint64_t range = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
        std::uint64_t x = next();
        while (x >= limit)
            x = next();
        return static_cast<std::size_t>(x % range);
    }

    double normal(double mean = 0.0, double sigma = 1.0)
    {
        double u1 = uniform01();
        while (u1 <= 0.0)
            u1 = uniform01();
        const double u2 = uniform01();
        return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Normal sample redrawn until it lies within `cutoff` standard deviations.
    double truncated_normal(double sigma, double cutoff)
    {
        if (sigma <= 0.0)
            return 0.0;
        for (;;) {
            const double z = normal();
            if (std::abs(z) <= cutoff)
                return sigma * z;
        }
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace plcseg

#endif // PLCSEG_RANDOM_HPP
