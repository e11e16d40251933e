#ifndef FLUCTLAB_UTIL_HPP
#define FLUCTLAB_UTIL_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>

#include "fluctlab/errors.hpp"

namespace fluctlab {

// Renders a double with 17 significant digits ("%.17g"), enough to
// reconstruct the exact bit pattern on re-parse.
inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// Derives the seed of trial `index` from a master seed.  The scheme is a
// fixed splitmix64-style hash, so serial and parallel sweeps agree:
//   trial_seed = mix64(master + (index + 1) * 0x9E3779B97F4A7C15)
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master + (index + 1) * 0x9E3779B97F4A7C15ull);
}

}  // namespace fluctlab

#endif
