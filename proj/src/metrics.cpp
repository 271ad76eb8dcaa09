#include "valvebench/metrics.hpp"

#include <cmath>
#include <limits>

namespace valvebench {

void Trajectory::validate() const {
    const std::size_t n = time.size();
    if (n == 0) throw ConfigError("trajectory: empty");
    if (reference.size() != n || output.size() != n || control.size() != n ||
        valve_position.size() != n)
        throw ConfigError("trajectory: series lengths differ");
}

Metrics compute_metrics(const Trajectory& traj, double ts) {
    traj.validate();
    const std::size_t n = traj.size();

    Metrics m;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = traj.reference[i] - traj.output[i];
        m.iae += std::abs(e) * ts;
        m.ise += e * e * ts;
    }

    // Index of the last reference change; 0 for a constant reference.
    std::size_t change_idx = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (traj.reference[i] != traj.reference[i - 1]) change_idx = i;
    const double r_final = traj.reference[n - 1];
    const double t_change = traj.time[change_idx];

    double peak = 0.0;
    for (std::size_t i = change_idx; i < n; ++i)
        peak = std::max(peak, traj.output[i] - r_final);
    m.overshoot_pct = r_final != 0.0 ? std::max(peak / std::abs(r_final), 0.0) * 100.0 : 0.0;

    const double band = 0.02 * std::abs(r_final);
    std::size_t settle_idx = n; // n = never settles
    for (std::size_t i = n; i-- > change_idx;) {
        if (std::abs(traj.output[i] - r_final) <= band)
            settle_idx = i;
        else
            break;
    }
    m.settling_time_s = settle_idx < n ? traj.time[settle_idx] - t_change
                                       : std::numeric_limits<double>::infinity();

    const std::size_t window = n / 5 > 0 ? n / 5 : 1;
    const std::size_t w0 = n - window;
    double mean = 0.0;
    for (std::size_t i = w0; i < n; ++i) mean += traj.output[i];
    mean /= static_cast<double>(window);
    double var = 0.0;
    for (std::size_t i = w0; i < n; ++i) {
        const double d = traj.output[i] - mean;
        var += d * d;
    }
    m.ripple = std::sqrt(var / static_cast<double>(window));
    m.steady_state_error = r_final - mean;
    return m;
}

} // namespace valvebench
