#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace valvebench {

inline constexpr const char* kToolVersion = "0.1.0";

/// Record of one CLI run: what was run, with which config, what came out.
/// Written atomically (temp file + rename) when the run finishes.
struct RunManifest {
    std::string run_id;
    std::string command;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;
    std::string started;
    std::string finished;
    bool complete = true;
    std::vector<std::string> files;
};

void write_manifest(const std::string& path, const RunManifest& manifest);

/// Deterministic run id derived from config hash and seed.
std::string make_run_id(std::uint64_t config_hash, std::uint64_t seed);

std::string utc_timestamp();

} // namespace valvebench
