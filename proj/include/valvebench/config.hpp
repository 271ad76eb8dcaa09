#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "valvebench/agent.hpp"
#include "valvebench/curriculum.hpp"
#include "valvebench/env.hpp"
#include "valvebench/experiment.hpp"

namespace valvebench {

/**
 * Run configuration, loaded from a sectioned key=value text file.
 * Parsing is strict: unknown sections or keys, duplicates, and malformed
 * values are errors that name the offending entry. Every field has a
 * documented default, so an empty file is a valid configuration.
 */
struct RunConfig {
    TimeBase time{1.0, 2000};
    ValveParams valve;
    FoptdParams process;
    bool perturb_enabled = false;
    PerturbParams perturb;
    PidGains pid;
    rl::AgentConfig agent;
    EnvConfig env;
    bool log_steps = false;

    std::optional<WaveformSpec> reference;
    std::optional<NoiseSpec> noise_controller_input;
    std::optional<NoiseSpec> noise_plant_input;
    std::optional<NoiseSpec> noise_plant_output;
    std::optional<Curriculum> curriculum;
    std::optional<TwoMoveParams> two_move;

    std::string experiment_id;                     // empty = take from --experiment
    std::optional<double> experiment_duration_s;   // preset override
    std::optional<ControllerSet> controllers;      // default decided per command
    std::uint64_t seed = 1;

    static RunConfig load(const std::string& path);
    static RunConfig from_string(const std::string& text, const std::string& origin);

    void validate() const;

    /// Canonical dump of every effective field; the config hash is FNV-1a64
    /// over this string, so defaulted and explicit settings hash alike.
    std::string canonical_string() const;
    std::uint64_t hash() const;
};

std::uint64_t fnv1a64(const std::string& s);

} // namespace valvebench
