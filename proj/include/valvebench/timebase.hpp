#pragma once

#include <cmath>
#include <cstddef>

#include "valvebench/errors.hpp"

namespace valvebench {

/// Discrete time grid: sample interval and total step count.
struct TimeBase {
    double ts = 1.0;          // sample interval, seconds
    std::size_t horizon = 1;  // total steps

    double duration() const { return ts * static_cast<double>(horizon); }

    void validate() const {
        if (!(ts > 0.0) || !std::isfinite(ts))
            throw ConfigError("time.ts must be a finite positive number");
        if (horizon < 1)
            throw ConfigError("time.horizon must be >= 1");
    }

    /// Grid for a duration in seconds (steps = round(duration/ts), min 1).
    static TimeBase for_duration(double duration_s, double ts) {
        TimeBase tb;
        tb.ts = ts;
        const double n = std::round(duration_s / ts);
        tb.horizon = n < 1.0 ? 1 : static_cast<std::size_t>(n);
        tb.validate();
        return tb;
    }
};

} // namespace valvebench
