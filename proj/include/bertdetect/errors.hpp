#pragma once

#include <stdexcept>
#include <string>

namespace bertdetect {

// Bad inputs: files, CSV rows, config values, shape mismatches. CLI exit 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Training produced a non-finite quantity. CLI exit 2.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bertdetect
