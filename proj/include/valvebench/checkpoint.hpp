#pragma once

#include <cstdint>
#include <string>

#include "valvebench/agent.hpp"

namespace valvebench::rl {

/**
 * Agent checkpoint (.ckpt): one versioned file bundling the four networks
 * (the critic contributes its three sub-nets), the exploration state, the
 * agent configuration and the run-config hash, behind an index header with
 * grade label and creation metadata.
 */
struct CheckpointMeta {
    std::string grade_label;
    std::string created; // free-form creation metadata (UTC timestamp)
    std::uint64_t config_hash = 0;
    AgentConfig agent_config;
    double obs_scale = 1.0; // divisor applied to observations during training
    double ts = 1.0;
    OuState ou;
};

void save_checkpoint(const std::string& path, const Agent& agent, const std::string& grade_label,
                     std::uint64_t config_hash, double obs_scale, const std::string& created);

/// Load into a freshly constructed agent; throws DataError on corrupt input.
/// rng_seed seeds the restored agent's sampling/exploration streams (the
/// checkpoint stores no RNG state).
struct LoadedCheckpoint {
    CheckpointMeta meta;
    Agent agent;
};
LoadedCheckpoint load_checkpoint(const std::string& path, std::uint64_t rng_seed = 0);

/// Header plus layer shapes, without requiring a valid agent (inspect).
struct CheckpointSummary {
    std::uint32_t version = 0;
    CheckpointMeta meta;
    std::size_t param_count = 0;
    std::vector<std::vector<nn::LayerSpec>> net_shapes; // per stored net
};
CheckpointSummary inspect_checkpoint(const std::string& path);

} // namespace valvebench::rl
