#pragma once

#include <optional>

#include "valvebench/foptd.hpp"
#include "valvebench/perturb.hpp"
#include "valvebench/valve.hpp"

namespace valvebench {

/// Steady-state-consistent initialization: output pinned at initial_flow,
/// valve parked at the position that sustains it, delay line pre-filled.
inline void plant_reset(FoptdState& foptd, ValveState& valve, const FoptdParams& params,
                        double initial_flow, double max_flow) {
    if (!(initial_flow >= 0.0) || initial_flow > max_flow)
        throw ConfigError("plant_reset: initial_flow out of [0, max_flow]");
    const double x_ss = initial_flow / params.k;
    valve.x_prev = x_ss;
    foptd.set_output(initial_flow);
    foptd.fill_delay_line(x_ss);
}

/**
 * Controlled plant: stiction valve feeding the FOPTD process, with the
 * optional third-order perturbation cascade appended at the output.
 */
class Plant {
public:
    Plant(const ValveParams& valve_params, const FoptdParams& process_params, double ts,
          std::optional<PerturbParams> perturb = std::nullopt)
        : valve_params_(valve_params),
          process_params_(process_params),
          ts_(ts),
          process_(process_params, ts),
          perturb_params_(perturb) {
        valve_params_.validate();
        if (perturb_params_) {
            perturb_params_->validate();
            perturb_state_.emplace();
        }
    }

    /// Apply the flow command; returns the process output.
    double step(double u) {
        const double x = valve_step(valve_state_, valve_params_, u);
        double y = foptd_step(process_, process_params_, x);
        if (perturb_state_)
            y = perturb_step(*perturb_state_, *perturb_params_, y, ts_);
        return y;
    }

    void reset(double initial_flow, double max_flow) {
        plant_reset(process_, valve_state_, process_params_, initial_flow, max_flow);
        if (perturb_state_) perturb_state_->fill(initial_flow);
    }

    double valve_position() const { return valve_state_.x_prev; }
    double output() const {
        if (perturb_state_) return perturb_state_->stage[2];
        return process_.y();
    }
    double ts() const { return ts_; }
    const ValveParams& valve_params() const { return valve_params_; }
    const FoptdParams& process_params() const { return process_params_; }

private:
    ValveParams valve_params_;
    FoptdParams process_params_;
    double ts_;
    ValveState valve_state_;
    FoptdState process_;
    std::optional<PerturbParams> perturb_params_;
    std::optional<PerturbState> perturb_state_;
};

} // namespace valvebench
