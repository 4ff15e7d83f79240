#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace grex {

// Deterministic random stream. All distributions are implemented by hand on
// top of the raw 64-bit generator so that sequences are bit-identical across
// platforms and standard library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed == 0 ? 0x9e3779b97f4a7c15ull : seed) {
        // warm up so that nearby seeds decorrelate
        for (int i = 0; i < 4; ++i) next_u64();
    }

    // Derive an independent stream identified by name (and optional index).
    Rng stream(std::string_view name, std::uint64_t index = 0) const {
        std::uint64_t h = fnv1a(name);
        h ^= index + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return Rng(state_ ^ h);
    }

    std::uint64_t next_u64() {
        // xorshift* variant; period 2^64-1 on nonzero states
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dull;
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller; consumes two uniforms per draw.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        return h;
    }

private:
    std::uint64_t state_;
};

}  // namespace grex
