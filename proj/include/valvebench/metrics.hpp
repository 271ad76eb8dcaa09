#pragma once

#include <vector>

#include "valvebench/errors.hpp"

namespace valvebench {

/// Closed-loop run record; all series share one length and the time grid.
struct Trajectory {
    std::vector<double> time;
    std::vector<double> reference;
    std::vector<double> output;
    std::vector<double> control;
    std::vector<double> valve_position;

    std::size_t size() const { return time.size(); }
    void validate() const;
};

/**
 * Trajectory-tracking quality numbers. Settling uses the conventional
 * 2% band around the final reference, measured from the last reference
 * change; ripple is the standard deviation of the output over the final
 * 20% of samples.
 */
struct Metrics {
    double iae = 0.0;
    double ise = 0.0;
    double overshoot_pct = 0.0;
    double settling_time_s = 0.0; // infinity when the band is never held
    double ripple = 0.0;
    double steady_state_error = 0.0; // r_final minus mean output, final window
};

Metrics compute_metrics(const Trajectory& traj, double ts);

} // namespace valvebench
