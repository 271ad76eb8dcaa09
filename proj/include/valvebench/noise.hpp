#pragma once

#include <cstdint>
#include <string>

#include "valvebench/rng.hpp"
#include "valvebench/timebase.hpp"
#include "valvebench/waveform.hpp"

namespace valvebench {

enum class NoiseKind { GaussianHold, SineMix };

/**
 * Disturbance source description. Two flavors:
 *   gaussian-hold — Gaussian(mu, sigma) redrawn every 1/update_hz seconds,
 *                   zero-order held in between;
 *   sine-mix      — sum of n_components sinusoids with frequencies uniform
 *                   in [f_min, f_max] Hz and random phases, modeling
 *                   broadband mechanical vibration.
 */
struct NoiseSpec {
    NoiseKind kind = NoiseKind::GaussianHold;
    double mu = 0.0;
    double sigma = 0.0;
    double update_hz = 1.0; // gaussian-hold refresh rate
    double f_min = 0.0;     // sine-mix band, Hz
    double f_max = 0.0;
    int n_components = 1;
    double amplitude = 0.0; // sine-mix total peak amplitude
    std::uint64_t seed = 0;

    void validate(const TimeBase& tb) const;

    static NoiseSpec gaussian_hold(double mu, double sigma, double update_hz, std::uint64_t seed);
    static NoiseSpec sine_mix(double f_min, double f_max, int n, double amplitude, std::uint64_t seed);
};

/// Gaussian zero-order-hold noise; deterministic under the rng's seed.
Signal gaussian_hold_noise(const NoiseSpec& spec, const TimeBase& tb, SeededRng& rng);

/// Sinusoid-mix vibration; per-component amplitude = amplitude / n_components.
Signal sine_mix_noise(const NoiseSpec& spec, const TimeBase& tb, SeededRng& rng);

/// Dispatch on spec.kind using a stream derived from spec.seed.
Signal build_noise(const NoiseSpec& spec, const TimeBase& tb);

NoiseKind noise_kind_from_string(const std::string& s);

} // namespace valvebench
