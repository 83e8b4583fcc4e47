#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace specb {

// 64-bit FNV-1a over raw bytes. Used for config hashes, completion-cache
// keys, and stream tags for seed derivation.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// splitmix64 finalizer. Derives independent stream seeds (graph, alpha, noise,
// posterior sampling) from one base seed so that streams never alias.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Fixed-format float for CSV/SVG output. %.12g is locale-independent here
// (we never call setlocale) and stable across repeated executions.
inline std::string fmt_g(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline std::string fmt_g17(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace specb
