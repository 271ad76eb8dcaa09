#include "valvebench/env.hpp"

#include <algorithm>
#include <cmath>

namespace valvebench {

double reward(double e, double y, const EnvConfig& cfg) {
    if (!std::isfinite(e) || !std::isfinite(y))
        throw ConfigError("reward: non-finite input");
    if (y <= 0.0 || y > cfg.max_flow) return cfg.penalty;
    if (cfg.reward_kind == RewardKind::Discrete)
        return std::abs(e) < cfg.delta ? 10.0 : -1.0;
    return std::min(1.0 / (std::abs(e) + cfg.lambda), cfg.reward_cap);
}

ValveEnv::ValveEnv(const EnvConfig& cfg, const ValveParams& valve, const FoptdParams& process,
                   std::optional<PerturbParams> perturb)
    : cfg_(cfg), plant_(valve, process, cfg.ts, perturb) {
    cfg_.validate();
}

Observation ValveEnv::reset(SeededRng& rng) {
    const double reference = rng.uniform(cfg_.ref_min, cfg_.ref_max);
    const double initial_flow = rng.uniform(cfg_.ref_min, cfg_.ref_max);
    return reset_to(reference, initial_flow);
}

Observation ValveEnv::reset_to(double reference, double initial_flow) {
    plant_.reset(initial_flow, cfg_.max_flow);
    reference_ = reference;
    ie_ = 0.0;
    step_count_ = 0;
    done_ = false;
    started_ = true;
    return Observation{plant_.output(), reference_ - plant_.output(), 0.0};
}

StepResult ValveEnv::step(double action) {
    if (!started_ || done_)
        throw ConfigError("env: step called on a finished episode");
    const double y = plant_.step(action);
    const double e = reference_ - y;
    ie_ += e * cfg_.ts;
    ++step_count_;

    StepResult r;
    r.obs = Observation{y, e, ie_};
    r.reward = reward(e, y, cfg_);
    const bool bound_trip = (y <= 0.0 || y > cfg_.max_flow);
    r.done = bound_trip || step_count_ >= cfg_.episode_steps;
    r.info = StepInfo{plant_.valve_position(), action};
    done_ = r.done;
    return r;
}

RewardKind reward_kind_from_string(const std::string& s) {
    if (s == "hybrid") return RewardKind::Hybrid;
    if (s == "discrete") return RewardKind::Discrete;
    throw ConfigError("reward: unknown kind '" + s + "' (expected hybrid|discrete)");
}

} // namespace valvebench
