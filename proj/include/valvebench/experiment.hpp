#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "valvebench/metrics.hpp"
#include "valvebench/nn.hpp"
#include "valvebench/noise.hpp"
#include "valvebench/pid.hpp"
#include "valvebench/plant.hpp"
#include "valvebench/two_move.hpp"
#include "valvebench/waveform.hpp"

namespace valvebench {

enum class ControllerKind { Pid, Rl, TwoMove };

struct ControllerSet {
    bool pid = true;
    bool rl = false;
    bool two_move = false;

    bool any() const { return pid || rl || two_move; }
    std::vector<ControllerKind> list() const;
};

std::string to_string(ControllerKind kind);

/// Evaluation-only policy extracted from a checkpoint: the trained actor,
/// its observation scaling, and the action range it was trained with.
struct RlPolicy {
    nn::DenseNet actor;
    double obs_scale = 1.0;
    double action_low = 0.0;
    double action_high = 100.0;

    static RlPolicy from_checkpoint(const std::string& path);
    double act(double y, double e, double ie) const;
};

/**
 * One comparative evaluation: a reference profile, optional disturbances at
 * the controller input / plant input / plant output, the plant under test,
 * and the controllers to run over it.
 */
struct ExperimentSpec {
    WaveformSpec reference;
    std::optional<NoiseSpec> noise_controller_input;
    std::optional<NoiseSpec> noise_plant_input;
    std::optional<NoiseSpec> noise_plant_output;
    ValveParams valve;
    FoptdParams process;
    std::optional<PerturbParams> perturb;
    ControllerSet controllers;
    PidGains pid;
    std::optional<TwoMoveParams> two_move;
    double duration_s = 2000.0;
    double ts = 1.0;
    std::uint64_t seed = 0;
    double initial_flow = 0.0;
    double max_flow = 200.0;

    TimeBase timebase() const { return TimeBase::for_duration(duration_s, ts); }
    void validate() const;
};

/// Run the closed loop for one controller; records clean reference, true
/// plant output, the controller command, and the valve position.
Trajectory run_closed_loop(const ExperimentSpec& spec, ControllerKind controller,
                           const RlPolicy* policy = nullptr);

/// Two-level factor levels for the delay/friction design of experiments.
struct DoeLevels {
    double delay_low = 0.025, delay_high = 2.5;
    double fs_low = 0.084, fs_high = 8.4;
    double fd_low = 0.0352, fd_high = 3.524;
};

struct DoeCell {
    double delay = 0.0, fs = 0.0, fd = 0.0;
    Metrics metrics;
};

/// The four {delay, friction} combinations on a constant-100 reference,
/// evaluated with the trained policy.
std::vector<DoeCell> run_doe(const ExperimentSpec& base, const DoeLevels& levels,
                             const RlPolicy& policy);

/// Inputs a preset needs from the run configuration.
struct PresetContext {
    ValveParams valve;
    FoptdParams process;
    PerturbParams perturb;
    PidGains pid;
    std::optional<TwoMoveParams> two_move;
    ControllerSet controllers;
    double ts = 1.0;
    std::uint64_t seed = 0;
    std::optional<WaveformSpec> reference_override;
};

struct NamedExperiment {
    std::string case_label; // "full", or "low" for the reduced-magnitude run
    ExperimentSpec spec;
};

/// The benchmark experiment catalogue: ids 1, 2, 3a, 3b, 3c, 4, 5, 6.
/// Experiment 6 expands to two runs (full and reduced reference magnitude).
std::vector<NamedExperiment> experiment_preset(const std::string& id, const PresetContext& ctx);

bool is_valid_experiment_id(const std::string& id);

/// Multi-level profile standing in for the published benchmark waveform
/// (its numeric breakpoints are not published; this is an approximation).
WaveformSpec benchmark_waveform();

/// Ramp-bearing profile for the generalization experiment.
WaveformSpec arbitrary_waveform();

} // namespace valvebench
