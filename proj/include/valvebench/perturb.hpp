#pragma once

#include <array>
#include <cmath>

#include "valvebench/errors.hpp"

namespace valvebench {

/// Third-order loop perturbation: three unit-gain first-order lags in series.
struct PerturbParams {
    double tau1 = 1.0;
    double tau2 = 5.0;
    double tau3 = 10.0; // seconds

    std::array<double, 3> taus() const { return {tau1, tau2, tau3}; }

    void validate() const {
        for (double tau : taus())
            if (!(tau > 0.0) || !std::isfinite(tau))
                throw ConfigError("perturb: time constants must be finite and > 0");
    }
};

struct PerturbState {
    std::array<double, 3> stage{0.0, 0.0, 0.0};

    void fill(double value) { stage = {value, value, value}; }
};

/// Cascade of three ZOH-discretized lags; DC gain is exactly 1.
inline double perturb_step(PerturbState& state, const PerturbParams& params, double input, double ts) {
    if (!std::isfinite(input))
        throw ConfigError("perturb_step: non-finite input");
    double v = input;
    const auto taus = params.taus();
    for (std::size_t i = 0; i < 3; ++i) {
        const double a = std::exp(-ts / taus[i]);
        state.stage[i] = a * state.stage[i] + (1.0 - a) * v;
        v = state.stage[i];
    }
    return v;
}

} // namespace valvebench
