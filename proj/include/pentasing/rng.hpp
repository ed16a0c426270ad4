// Counter-based deterministic random numbers. Every draw is a pure function
// of (seed, stream, counter), so multistart batches produce identical seeds
// on any platform and in any evaluation order.

#ifndef PENTASING_RNG_HPP
#define PENTASING_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace pentasing {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : state_(detail::splitmix64(seed ^ detail::splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1))) {}

    std::uint64_t next_u64() {
        state_ = detail::splitmix64(state_);
        return state_;
    }

    // Uniform in [0,1) with 53 significant bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform direction; rejection sampling keeps it libm-free and portable.
    std::array<double, 3> unit_vector() {
        for (;;) {
            double x = uniform(-1.0, 1.0), y = uniform(-1.0, 1.0), z = uniform(-1.0, 1.0);
            double n2 = x * x + y * y + z * z;
            if (n2 > 1.0 || n2 < 1e-4) continue;
            double inv = 1.0 / std::sqrt(n2);
            return {x * inv, y * inv, z * inv};
        }
    }

private:
    std::uint64_t state_;
};

// Halton sequence (index starts at 1): the fixed low-discrepancy source for
// sampling grids.
inline double halton(std::uint64_t index, unsigned base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

}  // namespace pentasing

#endif
