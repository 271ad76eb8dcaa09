#pragma once

#include <cmath>

#include "valvebench/errors.hpp"

namespace valvebench {

/// Static (breakaway) and dynamic (sliding) friction, in flow-command units.
struct ValveParams {
    double fs = 8.40;
    double fd = 3.524;

    void validate() const {
        if (!(fs >= 0.0) || !(fd >= 0.0) || !std::isfinite(fs) || !std::isfinite(fd))
            throw ConfigError("valve: fs and fd must be finite and >= 0");
        if (fd > fs)
            throw ConfigError("valve: fd must be <= fs");
    }
};

/// Valve memory: the last position the stem actually attained.
struct ValveState {
    double x_prev = 0.0;
};

/**
 * One step of the stiction/deadband valve. The commanded position u only
 * moves the stem when it differs from the held position by more than fs;
 * motion then lands short of the command by the sliding friction fd.
 * Returns the new position and updates the state.
 */
inline double valve_step(ValveState& state, const ValveParams& params, double u) {
    if (!std::isfinite(u) || !std::isfinite(state.x_prev))
        throw ConfigError("valve_step: non-finite input");
    const double delta = u - state.x_prev;
    double x;
    if (delta > params.fs) {
        x = u - params.fd;
    } else if (delta < -params.fs) {
        x = u + params.fd;
    } else {
        x = state.x_prev;
    }
    state.x_prev = x;
    return x;
}

} // namespace valvebench
