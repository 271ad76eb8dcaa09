#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "valvebench/env.hpp"

using namespace valvebench;

namespace {

EnvConfig default_cfg() {
    EnvConfig cfg;
    cfg.ts = 1.0;
    return cfg;
}

ValveEnv make_env(const EnvConfig& cfg = default_cfg()) {
    return ValveEnv(cfg, ValveParams{0.84, 0.3524}, FoptdParams{3.8163, 156.46, 0.1});
}

} // namespace

TEST_CASE("reward: out-of-band flow earns the penalty") {
    EnvConfig cfg = default_cfg();
    CHECK(reward(0.0, cfg.max_flow + 0.001, cfg) == -100.0);
    CHECK(reward(0.0, 0.0, cfg) == -100.0); // y <= 0 inclusive
    CHECK(reward(0.0, -5.0, cfg) == -100.0);
    CHECK(reward(0.0, 0.0001, cfg) > 0.0);
}

TEST_CASE("reward: capped reciprocal of the absolute error") {
    EnvConfig cfg = default_cfg(); // lambda 0.1, cap 10
    CHECK(reward(0.0, 100.0, cfg) == 10.0);
    CHECK(reward(0.9, 100.0, cfg) == doctest::Approx(1.0));
    CHECK(reward(-0.9, 100.0, cfg) == doctest::Approx(1.0));
    CHECK(reward(9.9, 100.0, cfg) == doctest::Approx(0.1));
}

TEST_CASE("reward: non-increasing in |e| and bounded") {
    EnvConfig cfg = default_cfg();
    double prev = cfg.reward_cap + 1.0;
    for (double e = 0.0; e < 250.0; e += 0.25) {
        const double r = reward(e, 100.0, cfg);
        CHECK(r <= prev);
        CHECK(r <= cfg.reward_cap);
        CHECK(r >= cfg.penalty);
        prev = r;
    }
}

TEST_CASE("reward: discrete variant follows the three-level table") {
    EnvConfig cfg = default_cfg();
    cfg.reward_kind = RewardKind::Discrete;
    cfg.delta = 1.0;
    CHECK(reward(0.5, 100.0, cfg) == 10.0);
    CHECK(reward(1.5, 100.0, cfg) == -1.0);
    CHECK(reward(0.5, 300.0, cfg) == -100.0);
}

TEST_CASE("env reset: seeded rng reproduces the reference and flow draw") {
    ValveEnv env1 = make_env();
    ValveEnv env2 = make_env();
    SeededRng r1(33), r2(33);
    const Observation o1 = env1.reset(r1);
    const Observation o2 = env2.reset(r2);
    CHECK(env1.reference() == env2.reference());
    CHECK(o1.y == o2.y);
}

TEST_CASE("env reset: reference draw is uniform over [ref_min, ref_max]") {
    EnvConfig cfg = default_cfg(); // [25, 175]
    ValveEnv env = make_env(cfg);
    SeededRng rng(404);
    const int n = 10000;
    int deciles[10] = {0};
    for (int i = 0; i < n; ++i) {
        env.reset(rng);
        const double frac = (env.reference() - cfg.ref_min) / (cfg.ref_max - cfg.ref_min);
        deciles[std::min(9, int(frac * 10.0))]++;
    }
    for (int d : deciles) CHECK(std::abs(d - n / 10) <= 0.03 * n);
}

TEST_CASE("env reset: initial observation satisfies e = r - y and ie = 0") {
    ValveEnv env = make_env();
    SeededRng rng(3);
    const Observation o = env.reset(rng);
    CHECK(o.e == env.reference() - o.y);
    CHECK(o.ie == 0.0);
}

TEST_CASE("env step: holding the reset fixed point keeps the error constant") {
    ValveEnv env = make_env();
    const Observation o0 = env.reset_to(120.0, 100.0);
    const double u_hold = env.plant().valve_position();
    const double e0 = o0.e;
    for (int i = 0; i < 150 && !env.done(); ++i) {
        const StepResult r = env.step(u_hold);
        CHECK(r.obs.e == doctest::Approx(e0).epsilon(1e-9));
        CHECK(r.reward > env.config().penalty);
    }
}

TEST_CASE("env step: driving beyond max_flow ends the episode with the penalty") {
    EnvConfig cfg = default_cfg();
    cfg.episode_steps = 4000;
    ValveEnv env = make_env(cfg);
    env.reset_to(100.0, 100.0);
    StepResult last;
    int steps = 0;
    while (!env.done()) {
        last = env.step(100.0); // k * 99.65 = 380 >> 200 eventually
        ++steps;
    }
    CHECK(last.reward == -100.0);
    CHECK(last.done);
    CHECK(steps < 4000);
    CHECK(last.obs.y > cfg.max_flow);
}

TEST_CASE("env step: horizon termination carries a normal reward") {
    EnvConfig cfg = default_cfg();
    cfg.episode_steps = 10;
    ValveEnv env = make_env(cfg);
    env.reset_to(100.0, 100.0);
    const double u_hold = env.plant().valve_position();
    StepResult last;
    for (int i = 0; i < 10; ++i) last = env.step(u_hold);
    CHECK(last.done);
    CHECK(last.reward > 0.0);
    CHECK(env.done());
}

TEST_CASE("env step: stepping a finished episode is an error") {
    EnvConfig cfg = default_cfg();
    cfg.episode_steps = 2;
    ValveEnv env = make_env(cfg);
    env.reset_to(100.0, 100.0);
    env.step(26.0);
    env.step(26.0);
    CHECK_THROWS_AS(env.step(26.0), ConfigError);
}

TEST_CASE("env: ie equals ts times the exact error sum") {
    EnvConfig cfg = default_cfg();
    cfg.ts = 0.5;
    ValveEnv env = make_env(cfg);
    env.reset_to(150.0, 60.0);
    SeededRng rng(8);
    double expected_ie = 0.0;
    for (int i = 0; i < 150 && !env.done(); ++i) {
        const StepResult r = env.step(rng.uniform(10.0, 40.0));
        expected_ie += r.obs.e * cfg.ts;
        CHECK(r.obs.ie == expected_ie);
    }
}

TEST_CASE("env: bound trip always terminates with the penalty") {
    EnvConfig cfg = default_cfg();
    cfg.episode_steps = 100000;
    ValveEnv env = make_env(cfg);
    SeededRng rng(55);
    for (int episode = 0; episode < 20; ++episode) {
        env.reset(rng);
        while (!env.done()) {
            const StepResult r = env.step(rng.uniform(0.0, 100.0));
            if (r.reward == cfg.penalty) CHECK(r.done);
            if (r.obs.y <= 0.0 || r.obs.y > cfg.max_flow) {
                CHECK(r.reward == cfg.penalty);
                CHECK(r.done);
            }
        }
    }
}

TEST_CASE("env: observation scaling divides all three components") {
    EnvConfig cfg = default_cfg();
    cfg.normalize_obs = true;
    ValveEnv env = make_env(cfg);
    env.reset_to(100.0, 50.0);
    const StepResult r = env.step(30.0);
    const auto v = env.obs_vector(r.obs);
    CHECK(v[0] == r.obs.y / 200.0);
    CHECK(v[1] == r.obs.e / 200.0);
    CHECK(v[2] == r.obs.ie / 200.0);
}

TEST_CASE("env: config validation") {
    EnvConfig bad = default_cfg();
    bad.ref_min = 150.0;
    bad.ref_max = 100.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    EnvConfig bad2 = default_cfg();
    bad2.lambda = 0.0;
    CHECK_THROWS_AS(bad2.validate(), ConfigError);
    EnvConfig bad3 = default_cfg();
    bad3.penalty = 1.0;
    CHECK_THROWS_AS(bad3.validate(), ConfigError);
}
