#pragma once

#include <bit>
#include <cstdint>
#include <string_view>

namespace cellforge
{
//! Finalizer of the splitmix64 generator; a good 64-bit bit mixer on its own.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) noexcept
{
    return mix64(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

inline std::uint64_t hash_double(double v) noexcept
{
    if (v == 0.0)
        v = 0.0; // fold -0
    return std::bit_cast<std::uint64_t>(v);
}

constexpr std::uint64_t hash_string(std::string_view s) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/*!
 * Portable 64-bit generator (splitmix64).
 *
 * Every stochastic decision in the library draws from this type so that a
 * fixed seed reproduces bit-identical results across compilers and platforms;
 * the standard distributions are implementation-defined and are not used.
 */
class SplitMix64
{
  public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    //! Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept
    {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept
    {
        return lo + (hi - lo) * uniform();
    }

    //! Unbiased integer in [0, n). n must be nonzero.
    std::uint64_t below(std::uint64_t n) noexcept
    {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do
        {
            x = next();
        } while (x >= limit);
        return x % n;
    }

  private:
    std::uint64_t state_;
};

} // namespace cellforge
