#pragma once

#include <cmath>

#include "valvebench/errors.hpp"

namespace valvebench {

/**
 * Filtered PID gains. The derivative term is the first-order-filtered form
 * kd*N*s/(s+N); N places the filter pole. Defaults are the benchmark plant's
 * auto-tuned values. Note kd is negative as tuned; it is accepted verbatim,
 * and the tiny N effectively suppresses the derivative path.
 */
struct PidGains {
    double kp = 0.3631;
    double ki = 0.0045;
    double kd = -1.72;
    double n = 0.0114;

    void validate() const {
        if (!(n >= 0.0) || !std::isfinite(n))
            throw ConfigError("pid: n must be finite and >= 0");
        if (!std::isfinite(kp) || !std::isfinite(ki) || !std::isfinite(kd))
            throw ConfigError("pid: gains must be finite");
    }
};

struct PidState {
    double integ = 0.0; // integral of error
    double dfilt = 0.0; // derivative filter state
};

/// Zero the controller. A reset controller reproduces a fresh one exactly.
inline void pid_reset(PidState& state) {
    state.integ = 0.0;
    state.dfilt = 0.0;
}

/**
 * One control update. Forward-Euler integrator (no anti-windup) and
 * forward-Euler derivative filter; stable for ts*n well below 2.
 */
inline double pid_step(PidState& state, const PidGains& gains, double e, double ts) {
    if (!(ts > 0.0)) throw ConfigError("pid_step: ts must be > 0");
    if (!std::isfinite(e)) throw ConfigError("pid_step: non-finite error");
    const double d_term = gains.kd * gains.n * (e - state.dfilt);
    state.dfilt += ts * gains.n * (e - state.dfilt);
    state.integ += e * ts;
    return gains.kp * e + gains.ki * state.integ + d_term;
}

} // namespace valvebench
