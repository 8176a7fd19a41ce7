#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ltcn {

/// Counter-based 64-bit generator: draw n is splitmix64(seed + n * golden).
/// Draws are a pure function of (seed, counter), so any sample can be
/// regenerated without replaying the stream.
class CounterRng
{
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    static constexpr std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return mix(seed_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    /// Uniform in (0, 1); never returns 0 so log() is safe.
    double next_open_unit() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_open_unit(); }

    /// Standard normal via Box-Muller; both draws are consumed in fixed order
    /// and the sine branch is cached.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_open_unit();
        const double u2 = next_open_unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace ltcn
