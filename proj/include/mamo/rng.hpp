#ifndef MAMO_RNG_HPP
#define MAMO_RNG_HPP

#include <cstdint>
#include <random>

namespace mamo {

/// Deterministic random source. Double and integer draws are derived from
/// raw mt19937_64 output so streams are identical across standard library
/// implementations (std::uniform_real_distribution is not portable).
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : m_engine(seed) {}

    std::uint64_t raw() { return m_engine(); }

    /// Uniform double in [0, 1).
    double uniform01()
    {
        return static_cast<double>(raw() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi)
    {
        return lo + (hi - lo) * uniform01();
    }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    int uniform_int(int n)
    {
        const std::uint64_t bound =
            UINT64_MAX - (UINT64_MAX % static_cast<std::uint64_t>(n));
        for (;;) {
            const std::uint64_t v = raw();
            if (v < bound) {
                return static_cast<int>(v % static_cast<std::uint64_t>(n));
            }
        }
    }

private:
    std::mt19937_64 m_engine;
};

/// splitmix64 step; used to derive independent seeds from one master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace mamo

#endif
