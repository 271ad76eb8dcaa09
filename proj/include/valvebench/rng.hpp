#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace valvebench {

/**
 * SeededRng — deterministic random source for every stochastic element
 * (noise signals, weight init, exploration, replay sampling, resets).
 *
 * The engine is std::mt19937_64 (bit-exact across platforms by the
 * standard); the uniform and Gaussian transforms are written out here
 * instead of using std::*_distribution, whose output is
 * implementation-defined. Identical seed + identical call sequence
 * gives an identical stream everywhere.
 */
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    static std::string algorithm() { return "mt19937_64/box-muller-v1"; }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [a, b).
    double uniform(double a, double b) { return a + uniform01() * (b - a); }

    /// Gaussian via Box-Muller; consumes exactly two uniforms per sample.
    double gaussian(double mu, double sigma) {
        const double u1 = 1.0 - uniform01(); // (0, 1], keeps log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mu + sigma * r * std::cos(2.0 * M_PI * u2);
    }

    /// Uniform integer in [0, n); rejection sampling, no modulo bias.
    std::uint64_t index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Derive an independent sub-stream for a named purpose.
    SeededRng derive(std::uint64_t stream_tag) const {
        return SeededRng(splitmix64(seed_ ^ (0x9E3779B97F4A7C15ull * (stream_tag + 1))));
    }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace valvebench
