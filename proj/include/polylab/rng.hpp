#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace polylab::rng {

// splitmix64: used to derive independent streams from one config seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_tag(std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// All randomness in the toolkit flows from (seed, tag) pairs; no ambient
// entropy anywhere, so identical configs replay bit-identically.
inline std::mt19937_64 stream(std::uint64_t seed, std::string_view tag,
                              std::uint64_t index = 0) {
    std::uint64_t s = seed ^ hash_tag(tag);
    s ^= 0x6a09e667f3bcc908ULL * (index + 1);
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

// k random nodes in [lo, hi] with guaranteed pairwise separation:
// a jittered uniform grid (jitter < 0.5 keeps the cells disjoint).
inline std::vector<double> jittered_nodes(std::mt19937_64& g, int k, double lo,
                                          double hi, double jitter = 0.35) {
    const double cell = (hi - lo) / k;
    std::vector<double> nodes(k);
    for (int i = 0; i < k; ++i)
        nodes[i] = lo + cell * (i + 0.5 + uniform(g, -jitter, jitter));
    return nodes;
}

} // namespace polylab::rng
