#include "valvebench/experiment.hpp"

#include <cmath>

#include "valvebench/checkpoint.hpp"

namespace valvebench {

std::vector<ControllerKind> ControllerSet::list() const {
    std::vector<ControllerKind> out;
    if (pid) out.push_back(ControllerKind::Pid);
    if (rl) out.push_back(ControllerKind::Rl);
    if (two_move) out.push_back(ControllerKind::TwoMove);
    return out;
}

std::string to_string(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::Pid: return "pid";
        case ControllerKind::Rl: return "rl";
        case ControllerKind::TwoMove: return "two_move";
    }
    return "?";
}

RlPolicy RlPolicy::from_checkpoint(const std::string& path) {
    rl::LoadedCheckpoint loaded = rl::load_checkpoint(path);
    RlPolicy p;
    p.actor = loaded.agent.actor();
    p.obs_scale = loaded.meta.obs_scale;
    p.action_low = loaded.meta.agent_config.action_low;
    p.action_high = loaded.meta.agent_config.action_high;
    return p;
}

double RlPolicy::act(double y, double e, double ie) const {
    const double obs[3] = {y / obs_scale, e / obs_scale, ie / obs_scale};
    const double raw = nn::forward(actor, obs)[0];
    return action_low + (raw + 1.0) * 0.5 * (action_high - action_low);
}

void ExperimentSpec::validate() const {
    if (!controllers.any()) throw ConfigError("experiment: no controllers configured");
    if (!(duration_s > 0.0)) throw ConfigError("experiment: duration must be > 0");
    if (!(ts > 0.0)) throw ConfigError("experiment: ts must be > 0");
    valve.validate();
    process.validate();
    pid.validate();
    if (perturb) perturb->validate();
    if (two_move) two_move->validate();
    reference.validate(timebase());
}

namespace {

Signal optional_noise(const std::optional<NoiseSpec>& spec, const TimeBase& tb,
                      std::uint64_t run_seed, std::uint64_t tag) {
    if (!spec) return Signal(tb.horizon, 0.0);
    NoiseSpec s = *spec;
    if (s.seed == 0) s.seed = SeededRng(run_seed).derive(tag).seed();
    return build_noise(s, tb);
}

} // namespace

Trajectory run_closed_loop(const ExperimentSpec& spec, ControllerKind controller,
                           const RlPolicy* policy) {
    spec.validate();
    if (controller == ControllerKind::Rl && policy == nullptr)
        throw ConfigError("experiment: rl controller requested without a policy");
    if (controller == ControllerKind::TwoMove && !spec.two_move)
        throw ConfigError("experiment: two_move controller requested without parameters");

    const TimeBase tb = spec.timebase();
    const Signal ref = build_waveform(spec.reference, tb);
    const Signal ci = optional_noise(spec.noise_controller_input, tb, spec.seed, 1);
    const Signal pi = optional_noise(spec.noise_plant_input, tb, spec.seed, 2);
    const Signal po = optional_noise(spec.noise_plant_output, tb, spec.seed, 3);

    Plant plant(spec.valve, spec.process, spec.ts, spec.perturb);
    plant.reset(spec.initial_flow, spec.max_flow);

    PidState pid_state;
    double ie = 0.0;
    TwoMoveParams tm;
    double tm_u0 = 0.0, tm_second = 0.0;
    if (controller == ControllerKind::TwoMove) {
        tm = *spec.two_move;
        if (!std::isfinite(tm.x_ss_hat) || tm.x_ss_hat == 0.0)
            tm.x_ss_hat = spec.reference.final_level() / spec.process.k;
        tm_u0 = plant.valve_position();
    }

    Trajectory traj;
    traj.time.reserve(tb.horizon);
    traj.reference.reserve(tb.horizon);
    traj.output.reserve(tb.horizon);
    traj.control.reserve(tb.horizon);
    traj.valve_position.reserve(tb.horizon);

    // Measurement noise first applies to the output of step 0, so the series
    // upstream of an injection point are untouched in the first step.
    double y_measured = plant.output();
    for (std::size_t i = 0; i < tb.horizon; ++i) {
        const double r = ref[i];
        const double r_disturbed = r + ci[i];
        const double e = r_disturbed - y_measured;

        double u = 0.0;
        switch (controller) {
            case ControllerKind::Pid:
                u = pid_step(pid_state, spec.pid, e, spec.ts);
                break;
            case ControllerKind::Rl:
                u = policy->act(y_measured, e, ie);
                ie += e * spec.ts;
                break;
            case ControllerKind::TwoMove:
                if (i == 0) {
                    u = two_move_step(tm, tm_u0, TwoMovePhase::First);
                } else if (i == 1) {
                    tm_second = two_move_step(tm, tm_u0, TwoMovePhase::Second);
                    u = tm_second;
                } else {
                    u = two_move_step(tm, tm_second, TwoMovePhase::Hold);
                }
                break;
        }

        const double u_disturbed = u + pi[i];
        const double y = plant.step(u_disturbed);
        y_measured = y + po[i];

        traj.time.push_back(static_cast<double>(i) * spec.ts);
        traj.reference.push_back(r);
        traj.output.push_back(y);
        traj.control.push_back(u);
        traj.valve_position.push_back(plant.valve_position());
    }
    return traj;
}

std::vector<DoeCell> run_doe(const ExperimentSpec& base, const DoeLevels& levels,
                             const RlPolicy& policy) {
    // Table order: (low, low), (low, high), (high, low), (high, high).
    const double delays[4] = {levels.delay_low, levels.delay_low, levels.delay_high,
                              levels.delay_high};
    const double fss[4] = {levels.fs_low, levels.fs_high, levels.fs_low, levels.fs_high};
    const double fds[4] = {levels.fd_low, levels.fd_high, levels.fd_low, levels.fd_high};

    std::vector<DoeCell> cells;
    for (int i = 0; i < 4; ++i) {
        ExperimentSpec spec = base;
        spec.reference = WaveformSpec::constant(100.0, base.duration_s);
        spec.valve.fs = fss[i];
        spec.valve.fd = fds[i];
        spec.process.delay = delays[i];
        spec.controllers = ControllerSet{false, true, false};

        DoeCell cell;
        cell.delay = delays[i];
        cell.fs = fss[i];
        cell.fd = fds[i];
        const Trajectory traj = run_closed_loop(spec, ControllerKind::Rl, &policy);
        cell.metrics = compute_metrics(traj, spec.ts);
        cells.push_back(cell);
    }
    return cells;
}

WaveformSpec benchmark_waveform() {
    WaveformSpec w;
    w.segments = {
        {SegmentKind::Hold, 100.0, 400.0}, {SegmentKind::Hold, 140.0, 400.0},
        {SegmentKind::Hold, 80.0, 400.0},  {SegmentKind::Hold, 120.0, 400.0},
        {SegmentKind::Hold, 100.0, 400.0},
    };
    return w;
}

WaveformSpec arbitrary_waveform() {
    WaveformSpec w;
    w.segments = {
        {SegmentKind::Hold, 60.0, 200.0},  {SegmentKind::Ramp, 150.0, 400.0},
        {SegmentKind::Hold, 150.0, 200.0}, {SegmentKind::Ramp, 70.0, 300.0},
        {SegmentKind::Hold, 70.0, 300.0},  {SegmentKind::Ramp, 120.0, 300.0},
        {SegmentKind::Hold, 120.0, 300.0},
    };
    return w;
}

bool is_valid_experiment_id(const std::string& id) {
    return id == "1" || id == "2" || id == "3a" || id == "3b" || id == "3c" || id == "4" ||
           id == "5" || id == "6";
}

std::vector<NamedExperiment> experiment_preset(const std::string& id, const PresetContext& ctx) {
    if (!is_valid_experiment_id(id))
        throw ConfigError("unknown experiment id '" + id + "' (expected 1|2|3a|3b|3c|4|5|6)");

    ExperimentSpec spec;
    spec.valve = ctx.valve;
    spec.process = ctx.process;
    spec.pid = ctx.pid;
    spec.two_move = ctx.two_move;
    spec.controllers = ctx.controllers;
    spec.ts = ctx.ts;
    spec.seed = ctx.seed;
    spec.duration_s = 2000.0;
    spec.initial_flow = 0.0;

    const NoiseSpec ref_noise = NoiseSpec::gaussian_hold(0.0, 0.01, 1.0, 0);
    const NoiseSpec strong_noise = NoiseSpec::gaussian_hold(0.0, 3.0, 1.0, 0);

    auto reference_or = [&](const WaveformSpec& fallback) {
        return ctx.reference_override ? *ctx.reference_override : fallback;
    };

    if (id == "1") {
        spec.reference = reference_or(WaveformSpec::constant(100.0, 2000.0));
        spec.noise_controller_input = ref_noise;
    } else if (id == "2") {
        spec.reference = reference_or(benchmark_waveform());
        spec.noise_controller_input = ref_noise;
    } else if (id == "3a") {
        spec.reference = reference_or(benchmark_waveform());
        spec.noise_controller_input = strong_noise;
    } else if (id == "3b") {
        spec.reference = reference_or(benchmark_waveform());
        spec.noise_plant_input = strong_noise;
    } else if (id == "3c") {
        spec.reference = reference_or(benchmark_waveform());
        spec.noise_plant_output = strong_noise;
    } else if (id == "4") {
        // Vibration band 30-100 Hz needs a 400 Hz grid; the run is shortened
        // to keep the trajectory file a sensible size.
        spec.ts = 1.0 / 400.0;
        spec.duration_s = 120.0;
        spec.reference = reference_or(WaveformSpec::constant(100.0, 120.0));
        spec.noise_plant_output = NoiseSpec::sine_mix(30.0, 100.0, 8, 2.0, 0);
    } else if (id == "5") {
        spec.reference = reference_or(arbitrary_waveform());
        spec.noise_controller_input = ref_noise;
    } else if (id == "6") {
        spec.reference = reference_or(benchmark_waveform());
        spec.noise_controller_input = ref_noise;
        spec.perturb = ctx.perturb;
        ExperimentSpec low = spec;
        low.reference = spec.reference.scaled(0.4);
        return {{"full", spec}, {"low", low}};
    }
    return {{"full", spec}};
}

} // namespace valvebench
