#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "valvebench/nn.hpp"
#include "valvebench/ou_noise.hpp"
#include "valvebench/replay.hpp"

namespace valvebench::rl {

struct AgentConfig {
    double gamma = 0.9;
    double critic_lr = 1e-3;
    double actor_lr = 1e-4;
    std::size_t batch_size = 64;
    double tau = 1e-3;
    std::size_t replay_capacity = 100000;
    double ou_variance = 1.5;
    double ou_variance_decay = 1e-5;
    double ou_mean = 0.0;
    double ou_mean_attraction = 0.15;
    double action_low = 0.0;
    double action_high = 100.0;

    void validate() const;
};

/**
 * Action-value network: observation path FC(50)-relu-FC(25), action path
 * FC(25), merged by elementwise addition, relu, then a linear unit.
 */
class Critic {
public:
    Critic() = default;
    Critic(std::size_t obs_dim, std::uint64_t seed);

    double value(std::span<const double> obs, double action) const;

    struct Cache {
        nn::ForwardCache obs_path;
        nn::ForwardCache act_path;
        nn::ForwardCache head;
        std::vector<double> merged_pre; // obs_path output + act_path output
    };
    double value(std::span<const double> obs, double action, Cache& cache) const;

    struct Grads {
        nn::Gradients obs_path, act_path, head;
        void zero();
        void scale(double f);
    };
    Grads zero_grads() const;

    /// Backprop d(value)*dq through the merge; accumulates parameter grads,
    /// returns (d obs, d action).
    std::pair<std::vector<double>, double> backward(const Cache& cache, double dq,
                                                    Grads& grads) const;

    /// Gradient of the value w.r.t. the action input only (parameters untouched).
    double action_gradient(std::span<const double> obs, double action) const;

    struct Opt {
        nn::OptState obs_path, act_path, head;
    };
    Opt zero_opt() const;
    void apply(const Grads& grads, Opt& opt, double lr);

    void soft_update_from(const Critic& online, double tau);

    nn::DenseNet& obs_path() { return obs_path_; }
    nn::DenseNet& act_path() { return act_path_; }
    nn::DenseNet& head() { return head_; }
    const nn::DenseNet& obs_path() const { return obs_path_; }
    const nn::DenseNet& act_path() const { return act_path_; }
    const nn::DenseNet& head() const { return head_; }
    std::size_t param_count() const;

private:
    nn::DenseNet obs_path_; // obs_dim -> 50 relu -> 25 linear
    nn::DenseNet act_path_; // 1 -> 25 linear
    nn::DenseNet head_;     // 25 -> 1 linear (after merge relu)
};

/// TD targets y = r + gamma*(1-done)*Q'(s', mu'(s')); never bootstraps
/// through done transitions.
std::vector<double> td_targets(const std::vector<Transition>& batch,
                               const nn::DenseNet& target_actor, const Critic& target_critic,
                               double gamma);

/**
 * DDPG agent: tanh-bounded actor, additive-merge critic, target copies of
 * both, uniform replay, OU exploration. One training loop mutates an agent
 * at a time; evaluation-only actor copies are safe to use concurrently.
 */
class Agent {
public:
    Agent(const AgentConfig& config, double ts, std::uint64_t seed);

    struct ActResult {
        double action = 0.0; // flow-command units
        double raw = 0.0;    // normalized (-1, 1) value after noise/clip
    };
    ActResult act_detailed(std::span<const double> obs, bool explore);
    double act(std::span<const double> obs, bool explore) {
        return act_detailed(obs, explore).action;
    }

    void observe(const Transition& t) { replay_.push(t); }

    struct LearnStats {
        bool updated = false; // false = replay not yet filled, step skipped
        double critic_loss = 0.0;
        double actor_objective = 0.0;
    };
    LearnStats learn_step();

    const AgentConfig& config() const { return config_; }
    double ts() const { return ts_; }

    nn::DenseNet& actor() { return actor_; }
    const nn::DenseNet& actor() const { return actor_; }
    Critic& critic() { return critic_; }
    const Critic& critic() const { return critic_; }
    nn::DenseNet& target_actor() { return target_actor_; }
    const nn::DenseNet& target_actor() const { return target_actor_; }
    Critic& target_critic() { return target_critic_; }
    const Critic& target_critic() const { return target_critic_; }
    ReplayBuffer& replay() { return replay_; }
    const ReplayBuffer& replay() const { return replay_; }
    OuState& ou() { return ou_; }
    const OuState& ou() const { return ou_; }

    /// Fresh exploration and replay for a new curriculum grade; weights kept.
    void reset_exploration();
    void reset_replay() { replay_.clear(); }

    /// Map a normalized (-1,1) value onto [action_low, action_high].
    double scale_action(double raw) const;

    /// Hash over all four networks' parameters (weight-continuity checks).
    std::uint64_t param_hash() const;

    static std::vector<nn::LayerSpec> actor_specs(std::size_t obs_dim);

    /// Rebuild internals from deserialized parts (checkpoint loading).
    void restore(const nn::DenseNet& actor, const Critic& critic, const nn::DenseNet& target_actor,
                 const Critic& target_critic, const OuState& ou);

private:
    AgentConfig config_;
    double ts_;
    nn::DenseNet actor_;
    Critic critic_;
    nn::DenseNet target_actor_;
    Critic target_critic_;
    nn::OptState actor_opt_;
    Critic::Opt critic_opt_;
    OuState ou_;
    ReplayBuffer replay_;
    SeededRng sample_rng_;
    SeededRng noise_rng_;
};

} // namespace valvebench::rl
