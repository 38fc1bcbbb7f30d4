#pragma once

// Shared helpers for the test suites.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>

#include <unistd.h>

#include <bertdetect/io.hpp>
#include <bertdetect/model.hpp>

namespace testsup {

inline std::string data_dir() {
#ifdef BD_DATA_DIR
    return BD_DATA_DIR;
#else
    return "tests/data";
#endif
}

inline std::string data_path(const std::string& name) { return data_dir() + "/" + name; }

// Fresh per-process scratch directory; contents are disposable.
inline std::string temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("bertdetect_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir.string();
}

inline std::uint64_t fnv1a64(const float* data, std::size_t count) {
    std::uint64_t h = 1469598103934665603ull;
    const auto* bytes = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < count * sizeof(float); ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

// Small encoder used for numeric checks: 2 layers, 8 hidden, 2 heads.
inline bertdetect::BertConfig tiny_config() {
    bertdetect::BertConfig c;
    c.num_layers = 2;
    c.hidden_size = 8;
    c.num_heads = 2;
    c.ff_size = 16;
    c.vocab_size = 32;
    c.max_positions = 16;
    return c;
}

}  // namespace testsup
