#include "valvebench/manifest.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "valvebench/errors.hpp"

namespace valvebench {

std::string utc_timestamp() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string make_run_id(std::uint64_t config_hash, std::uint64_t seed) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%016llx-s%llu",
                  static_cast<unsigned long long>(config_hash),
                  static_cast<unsigned long long>(seed));
    return buf;
}

void write_manifest(const std::string& path, const RunManifest& m) {
    nlohmann::ordered_json j;
    j["run_id"] = m.run_id;
    j["command"] = m.command;
    char hash_buf[24];
    std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                  static_cast<unsigned long long>(m.config_hash));
    j["config_hash"] = hash_buf;
    j["seed"] = m.seed;
    j["tool_version"] = m.tool_version;
    j["started"] = m.started;
    j["finished"] = m.finished;
    j["complete"] = m.complete;
    j["files"] = m.files;

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write manifest '" + path + "'");
        out << j.dump(2) << '\n';
    }
    std::remove(path.c_str());
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw DataError("cannot finalize manifest '" + path + "'");
}

} // namespace valvebench
