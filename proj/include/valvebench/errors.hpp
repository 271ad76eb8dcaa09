#pragma once

#include <stdexcept>
#include <string>

namespace valvebench {

/// Bad run configuration: unknown key, out-of-range value, missing file.
/// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad data artifact: corrupt or truncated checkpoint, version mismatch.
/// The CLI maps this to exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace valvebench
