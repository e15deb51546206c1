// rng.hpp — deterministic random streams for trajectory sampling.
//
// std::normal_distribution is implementation-defined, which would break the
// bit-reproducibility contract of ensemble runs.  We generate gaussians by
// Box-Muller from explicit 53-bit uniforms instead.
#pragma once

#include <cmath>
#include <cstdint>

#include "rtrg/types.hpp"

namespace rtrg {

// splitmix64, used both as a stream and to derive per-trajectory seeds.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in (0, 1]; never returns 0 so log() below is safe
    double next_uniform() {
        const std::uint64_t bits = next_u64() >> 11; // 53 bits
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // z = (x + iy)/sqrt(2): E[z z*] = 1, E[z^2] = 0
    cplx next_complex_gaussian() {
        const double x = next_gaussian();
        const double y = next_gaussian();
        return cplx(x, y) / std::sqrt(2.0);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    SplitMix64 mix(base ^ (0x632be59bd9b4e019ull + index * 0x9e3779b97f4a7c15ull));
    mix.next_u64();
    return mix.next_u64();
}

} // namespace rtrg
