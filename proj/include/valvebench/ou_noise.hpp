#pragma once

#include <cmath>

#include "valvebench/errors.hpp"
#include "valvebench/rng.hpp"

namespace valvebench::rl {

/**
 * Ornstein-Uhlenbeck exploration noise with geometric variance decay.
 * The variance shrinks by (1 - decay) per sample, so its half-life in
 * steps is log(1/2) / log(1 - decay).
 */
struct OuState {
    double x = 0.0;
    double variance = 1.5;
    double decay = 1e-5;
    double mean = 0.0;
    double mean_attraction = 0.15;

    void reset(double initial_variance) {
        x = 0.0;
        variance = initial_variance;
    }
};

inline double ou_half_life_steps(double decay) {
    return std::log(0.5) / std::log(1.0 - decay);
}

/// Draw one noise sample and decay the variance.
inline double ou_sample(OuState& state, double ts, SeededRng& rng) {
    if (!(ts > 0.0)) throw ConfigError("ou_sample: ts must be > 0");
    const double z = rng.gaussian(0.0, 1.0);
    state.x += state.mean_attraction * (state.mean - state.x) * ts +
               std::sqrt(state.variance) * std::sqrt(ts) * z;
    state.variance *= (1.0 - state.decay);
    return state.x;
}

} // namespace valvebench::rl
