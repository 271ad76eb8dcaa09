#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "valvebench/errors.hpp"

namespace valvebench {

/// First-order-plus-time-delay process: gain k, time constant T, dead time L.
struct FoptdParams {
    double k = 3.8163;
    double t_const = 156.46; // seconds
    double delay = 2.5;      // seconds, magnitude of the dead time

    void validate() const {
        if (!(t_const > 0.0) || !std::isfinite(t_const))
            throw ConfigError("process: T must be finite and > 0");
        if (!(delay >= 0.0) || !std::isfinite(delay))
            throw ConfigError("process: delay must be finite and >= 0");
        if (!std::isfinite(k))
            throw ConfigError("process: k must be finite");
    }
};

/**
 * Process state: first-order lag output plus an integer-step delay line
 * (dead time rounded to round(delay/ts) samples, so the realized delay is
 * within ts/2 of the requested one).
 *
 * The lag is the zero-order-hold exact discretization
 *   y <- a*y + (1-a)*k*x_d,  a = exp(-ts/T),
 * which is unconditionally stable for any ts.
 */
class FoptdState {
public:
    FoptdState(const FoptdParams& params, double ts)
        : ts_(ts), y_(0.0) {
        if (!(ts > 0.0)) throw ConfigError("foptd: ts must be > 0");
        params.validate();
        const long long n = std::llround(params.delay / ts);
        delay_line_.assign(static_cast<std::size_t>(n < 0 ? 0 : n), 0.0);
        head_ = 0;
    }

    double ts() const { return ts_; }
    double y() const { return y_; }
    std::size_t delay_steps() const { return delay_line_.size(); }

    void set_output(double y) { y_ = y; }

    void fill_delay_line(double value) {
        for (double& v : delay_line_) v = value;
    }

    /// Push x into the delay line, pop the delayed sample.
    double shift(double x) {
        if (delay_line_.empty()) return x;
        const double out = delay_line_[head_];
        delay_line_[head_] = x;
        head_ = (head_ + 1) % delay_line_.size();
        return out;
    }

private:
    double ts_;
    double y_;
    std::vector<double> delay_line_;
    std::size_t head_ = 0;
};

/// Advance the process one sample with valve position x; returns the new output.
inline double foptd_step(FoptdState& state, const FoptdParams& params, double x) {
    if (!std::isfinite(x))
        throw ConfigError("foptd_step: non-finite input");
    const double x_delayed = state.shift(x);
    const double a = std::exp(-state.ts() / params.t_const);
    state.set_output(a * state.y() + (1.0 - a) * params.k * x_delayed);
    return state.y();
}

} // namespace valvebench
