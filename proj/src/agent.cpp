#include "valvebench/agent.hpp"

#include <algorithm>
#include <cmath>

namespace valvebench::rl {

void AgentConfig::validate() const {
    if (!(gamma >= 0.0) || !(gamma <= 1.0)) throw ConfigError("agent: gamma must be in [0, 1]");
    if (!(tau > 0.0) || !(tau <= 1.0)) throw ConfigError("agent: tau must be in (0, 1]");
    if (batch_size < 1) throw ConfigError("agent: batch_size must be >= 1");
    if (batch_size > replay_capacity)
        throw ConfigError("agent: batch_size must be <= replay_capacity");
    if (!(action_low < action_high))
        throw ConfigError("agent: action_low must be < action_high");
    if (!(ou_variance_decay >= 0.0) || !(ou_variance_decay < 1.0))
        throw ConfigError("agent: ou_variance_decay must be in [0, 1)");
    if (!(ou_variance >= 0.0)) throw ConfigError("agent: ou_variance must be >= 0");
    if (!(critic_lr > 0.0) || !(actor_lr > 0.0))
        throw ConfigError("agent: learning rates must be > 0");
}

Critic::Critic(std::size_t obs_dim, std::uint64_t seed) {
    using nn::Activation;
    obs_path_ = nn::DenseNet::init(
        {{obs_dim, 50, Activation::Relu}, {50, 25, Activation::Linear}}, seed);
    act_path_ = nn::DenseNet::init({{1, 25, Activation::Linear}}, seed ^ 0x5bd1e995u);
    head_ = nn::DenseNet::init({{25, 1, Activation::Linear}}, seed ^ 0xc2b2ae35u);
}

double Critic::value(std::span<const double> obs, double action, Cache& cache) const {
    const std::vector<double> zo = nn::forward(obs_path_, obs, &cache.obs_path);
    const double act_in[1] = {action};
    const std::vector<double> za = nn::forward(act_path_, act_in, &cache.act_path);
    cache.merged_pre.resize(zo.size());
    std::vector<double> h(zo.size());
    for (std::size_t i = 0; i < zo.size(); ++i) {
        cache.merged_pre[i] = zo[i] + za[i];
        h[i] = cache.merged_pre[i] > 0.0 ? cache.merged_pre[i] : 0.0;
    }
    return nn::forward(head_, h, &cache.head)[0];
}

double Critic::value(std::span<const double> obs, double action) const {
    Cache cache;
    return value(obs, action, cache);
}

void Critic::Grads::zero() {
    obs_path.zero();
    act_path.zero();
    head.zero();
}

void Critic::Grads::scale(double f) {
    obs_path.scale(f);
    act_path.scale(f);
    head.scale(f);
}

Critic::Grads Critic::zero_grads() const {
    return Grads{nn::Gradients::zeros_like(obs_path_), nn::Gradients::zeros_like(act_path_),
                 nn::Gradients::zeros_like(head_)};
}

std::pair<std::vector<double>, double> Critic::backward(const Cache& cache, double dq,
                                                        Grads& grads) const {
    const double dq_arr[1] = {dq};
    const std::vector<double> dh = nn::backward(head_, cache.head, dq_arr, grads.head);
    std::vector<double> dm(dh.size());
    for (std::size_t i = 0; i < dh.size(); ++i)
        dm[i] = cache.merged_pre[i] > 0.0 ? dh[i] : 0.0;
    const std::vector<double> dobs = nn::backward(obs_path_, cache.obs_path, dm, grads.obs_path);
    const std::vector<double> dact = nn::backward(act_path_, cache.act_path, dm, grads.act_path);
    return {dobs, dact[0]};
}

double Critic::action_gradient(std::span<const double> obs, double action) const {
    Cache cache;
    (void)value(obs, action, cache);
    Grads scratch = zero_grads();
    return backward(cache, 1.0, scratch).second;
}

Critic::Opt Critic::zero_opt() const {
    return Opt{nn::OptState::zeros_like(obs_path_), nn::OptState::zeros_like(act_path_),
               nn::OptState::zeros_like(head_)};
}

void Critic::apply(const Grads& grads, Opt& opt, double lr) {
    nn::opt_step(obs_path_, grads.obs_path, opt.obs_path, lr);
    nn::opt_step(act_path_, grads.act_path, opt.act_path, lr);
    nn::opt_step(head_, grads.head, opt.head, lr);
}

void Critic::soft_update_from(const Critic& online, double tau) {
    nn::soft_update(obs_path_, online.obs_path_, tau);
    nn::soft_update(act_path_, online.act_path_, tau);
    nn::soft_update(head_, online.head_, tau);
}

std::size_t Critic::param_count() const {
    return obs_path_.param_count() + act_path_.param_count() + head_.param_count();
}

std::vector<double> td_targets(const std::vector<Transition>& batch,
                               const nn::DenseNet& target_actor, const Critic& target_critic,
                               double gamma) {
    if (batch.empty()) throw ConfigError("td_targets: empty batch");
    std::vector<double> targets;
    targets.reserve(batch.size());
    for (const Transition& t : batch) {
        double y = t.reward;
        if (!t.done) {
            const double next_raw = nn::forward(target_actor, t.next_obs)[0];
            y += gamma * target_critic.value(t.next_obs, next_raw);
        }
        targets.push_back(y);
    }
    return targets;
}

std::vector<nn::LayerSpec> Agent::actor_specs(std::size_t obs_dim) {
    using nn::Activation;
    return {{obs_dim, 50, Activation::Relu},
            {50, 25, Activation::Relu},
            {25, 1, Activation::Tanh}};
}

Agent::Agent(const AgentConfig& config, double ts, std::uint64_t seed)
    : config_(config),
      ts_(ts),
      actor_(nn::DenseNet::init(actor_specs(3), SeededRng(seed).derive(1).seed())),
      critic_(3, SeededRng(seed).derive(2).seed()),
      target_actor_(actor_),
      target_critic_(critic_),
      actor_opt_(nn::OptState::zeros_like(actor_)),
      critic_opt_(critic_.zero_opt()),
      replay_(config.replay_capacity),
      sample_rng_(SeededRng(seed).derive(3)),
      noise_rng_(SeededRng(seed).derive(4)) {
    config_.validate();
    if (!(ts_ > 0.0)) throw ConfigError("agent: ts must be > 0");
    ou_.variance = config_.ou_variance;
    ou_.decay = config_.ou_variance_decay;
    ou_.mean = config_.ou_mean;
    ou_.mean_attraction = config_.ou_mean_attraction;
}

double Agent::scale_action(double raw) const {
    return config_.action_low + (raw + 1.0) * 0.5 * (config_.action_high - config_.action_low);
}

Agent::ActResult Agent::act_detailed(std::span<const double> obs, bool explore) {
    double raw = nn::forward(actor_, obs)[0];
    if (explore) {
        raw += ou_sample(ou_, ts_, noise_rng_);
        raw = std::clamp(raw, -1.0, 1.0);
    }
    return ActResult{scale_action(raw), raw};
}

Agent::LearnStats Agent::learn_step() {
    if (replay_.size() < config_.batch_size) return LearnStats{};

    const std::vector<Transition> batch = replay_.sample(config_.batch_size, sample_rng_);
    const std::vector<double> targets =
        td_targets(batch, target_actor_, target_critic_, config_.gamma);
    const double inv_n = 1.0 / static_cast<double>(batch.size());

    // Critic: minimize mean squared TD error. Actions are stored in raw
    // normalized units, the same space the actor emits (see act_detailed).
    Critic::Grads cgrads = critic_.zero_grads();
    double critic_loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        Critic::Cache cache;
        const double q = critic_.value(batch[i].obs, batch[i].action, cache);
        const double err = q - targets[i];
        critic_loss += err * err * inv_n;
        critic_.backward(cache, 2.0 * err * inv_n, cgrads);
    }
    critic_.apply(cgrads, critic_opt_, config_.critic_lr);

    // Actor: ascend mean Q(s, actor(s)); gradient is chained through the
    // critic's action-input gradient. Adam minimizes, so feed -dJ.
    // The scratch grads are never read, only the returned input gradient.
    nn::Gradients agrads = nn::Gradients::zeros_like(actor_);
    Critic::Grads scratch = critic_.zero_grads();
    double actor_objective = 0.0;
    for (const Transition& t : batch) {
        nn::ForwardCache acache;
        const double raw = nn::forward(actor_, t.obs, &acache)[0];
        Critic::Cache ccache;
        const double q = critic_.value(t.obs, raw, ccache);
        actor_objective += q * inv_n;
        const double dq_da = critic_.backward(ccache, 1.0, scratch).second;
        const double out_grad[1] = {-dq_da * inv_n};
        nn::backward(actor_, acache, out_grad, agrads);
    }
    nn::opt_step(actor_, agrads, actor_opt_, config_.actor_lr);

    nn::soft_update(target_actor_, actor_, config_.tau);
    target_critic_.soft_update_from(critic_, config_.tau);

    return LearnStats{true, critic_loss, actor_objective};
}

void Agent::reset_exploration() {
    ou_.reset(config_.ou_variance);
}

std::uint64_t Agent::param_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xFF;
            h *= 1099511628211ull;
        }
    };
    mix(nn::net_param_hash(actor_));
    mix(nn::net_param_hash(critic_.obs_path()));
    mix(nn::net_param_hash(critic_.act_path()));
    mix(nn::net_param_hash(critic_.head()));
    mix(nn::net_param_hash(target_actor_));
    mix(nn::net_param_hash(target_critic_.obs_path()));
    mix(nn::net_param_hash(target_critic_.act_path()));
    mix(nn::net_param_hash(target_critic_.head()));
    return h;
}

void Agent::restore(const nn::DenseNet& actor, const Critic& critic,
                    const nn::DenseNet& target_actor, const Critic& target_critic,
                    const OuState& ou) {
    if (!actor.same_shape(actor_) || !target_actor.same_shape(target_actor_))
        throw DataError("agent: checkpoint network shape mismatch");
    if (!critic.obs_path().same_shape(critic_.obs_path()) ||
        !critic.act_path().same_shape(critic_.act_path()) ||
        !critic.head().same_shape(critic_.head()) ||
        !target_critic.obs_path().same_shape(critic_.obs_path()))
        throw DataError("agent: checkpoint critic shape mismatch");
    actor_ = actor;
    critic_ = critic;
    target_actor_ = target_actor;
    target_critic_ = target_critic;
    ou_ = ou;
    // Optimizer moments restart; they are training scratch, not policy state.
    actor_opt_ = nn::OptState::zeros_like(actor_);
    critic_opt_ = critic_.zero_opt();
}

} // namespace valvebench::rl
