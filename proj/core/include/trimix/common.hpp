#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace trimix {

// Configuration rejected before any work started (bad field, inconsistent
// combination). The message names the offending field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// File-level failure: unreadable path, bad magic, corrupt record. Messages
// carry a byte offset where one is known.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested instance is not visible in the requested camera/time.
class NotVisibleError : public std::runtime_error {
public:
    explicit NotVisibleError(const std::string& msg) : std::runtime_error(msg) {}
};

// 64-bit FNV-1a. Used for config hashes and for deriving rng substreams
// from string labels.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value);

} // namespace trimix
