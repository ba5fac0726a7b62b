#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace parascope {

// splitmix64: cheap stateless mixer used to derive per-record / per-sample seeds.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix64(uint64_t a, uint64_t b) {
    return mix64(a ^ mix64(b));
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline uint64_t fnv1a64(const std::vector<int>& ids) {
    uint64_t h = 1469598103934665603ULL;
    for (int id : ids) {
        for (int shift = 0; shift < 32; shift += 8) {
            h ^= static_cast<unsigned char>((static_cast<uint32_t>(id) >> shift) & 0xff);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

inline std::string hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

// Deterministic engine for everything that samples. One engine per logical
// stream, seeded through mix64 so streams never alias.
using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t seed) {
    return Rng(mix64(seed, 0x5eedULL));
}

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

std::vector<std::string> split_words(std::string_view text);
std::string lowercase(std::string_view s);

}  // namespace parascope
