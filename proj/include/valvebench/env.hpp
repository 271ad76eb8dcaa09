#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>

#include "valvebench/plant.hpp"
#include "valvebench/rng.hpp"

namespace valvebench {

enum class RewardKind { Hybrid, Discrete };

struct EnvConfig {
    double max_flow = 200.0;
    double ref_min = 25.0;
    double ref_max = 175.0;
    std::size_t episode_steps = 150;
    double delta = 1.0;      // allowable error margin for the discrete reward
    double lambda = 0.1;     // division guard in the reciprocal reward
    double reward_cap = 10.0;
    double penalty = -100.0; // out-of-bounds reward
    double ts = 1.0;
    RewardKind reward_kind = RewardKind::Hybrid;
    bool normalize_obs = false; // divide the observation vector by max_flow

    double obs_scale() const { return normalize_obs ? max_flow : 1.0; }

    void validate() const {
        if (!(ref_min >= 0.0) || !(ref_min < ref_max) || !(ref_max <= max_flow))
            throw ConfigError("env: need 0 <= ref_min < ref_max <= max_flow");
        if (!(lambda > 0.0)) throw ConfigError("env: lambda must be > 0");
        if (!(penalty < 0.0)) throw ConfigError("env: penalty must be < 0");
        if (episode_steps < 1) throw ConfigError("env: episode_steps must be >= 1");
        if (!(ts > 0.0)) throw ConfigError("env: ts must be > 0");
        if (!(reward_cap > 0.0)) throw ConfigError("env: reward_cap must be > 0");
        if (!(delta > 0.0)) throw ConfigError("env: delta must be > 0");
    }
};

/// Raw (unscaled) observation: output, error, and running error integral.
struct Observation {
    double y = 0.0;
    double e = 0.0;
    double ie = 0.0;
};

struct StepInfo {
    double valve_position = 0.0;
    double action = 0.0; // flow command as received
};

struct StepResult {
    Observation obs;
    double reward = 0.0;
    bool done = false;
    StepInfo info;
};

/// Out-of-bounds flow earns the penalty; in-band reward is the capped
/// reciprocal of |e| (hybrid) or the three-level discrete form.
double reward(double e, double y, const EnvConfig& cfg);

/**
 * Closed-loop training environment: one stiction valve driving the FOPTD
 * process (perturbation cascade optional), constant per-episode reference,
 * random reset, bound/horizon termination.
 */
class ValveEnv {
public:
    ValveEnv(const EnvConfig& cfg, const ValveParams& valve, const FoptdParams& process,
             std::optional<PerturbParams> perturb = std::nullopt);

    /// Reference and initial flow drawn Uniform[ref_min, ref_max].
    Observation reset(SeededRng& rng);

    /// Deterministic reset for evaluation runs.
    Observation reset_to(double reference, double initial_flow);

    /// Advance one step with a flow command; throws if the episode is over.
    StepResult step(double action);

    double reference() const { return reference_; }
    bool done() const { return done_; }
    std::size_t step_count() const { return step_count_; }
    const EnvConfig& config() const { return cfg_; }
    const Plant& plant() const { return plant_; }

    /// Observation as the 3-vector the agent consumes (scaling applied).
    std::array<double, 3> obs_vector(const Observation& o) const {
        const double s = cfg_.obs_scale();
        return {o.y / s, o.e / s, o.ie / s};
    }

private:
    EnvConfig cfg_;
    Plant plant_;
    double reference_ = 0.0;
    double ie_ = 0.0;
    std::size_t step_count_ = 0;
    bool done_ = true;
    bool started_ = false;
};

RewardKind reward_kind_from_string(const std::string& s);

} // namespace valvebench
