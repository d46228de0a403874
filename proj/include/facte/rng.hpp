#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace facte {

/// 64-bit FNV-1a. Stable across platforms; used for cache keys and RNG
/// sub-stream derivation.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// A deterministic RNG sub-stream derived from a root seed and a textual key.
/// Concurrent consumers each own their stream, so scheduling never perturbs
/// the random sequence.
class KeyedStream {
public:
    KeyedStream(std::uint64_t root_seed, std::string_view key)
        : engine_(splitmix64(root_seed ^ fnv1a64(key))) {}

    std::mt19937_64& engine() { return engine_; }

    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        std::uniform_int_distribution<std::int64_t> d(lo, hi);
        return d(engine_);
    }

    double uniform_real() {
        std::uniform_real_distribution<double> d(0.0, 1.0);
        return d(engine_);
    }

    bool coin() { return uniform_int(0, 1) == 1; }

private:
    std::mt19937_64 engine_;
};

/// Builds the canonical sub-stream key for a per-cell decision.
inline std::string stream_key(std::string_view candidate_id, int split_index,
                              std::string_view tag) {
    std::string k;
    k.reserve(candidate_id.size() + tag.size() + 16);
    k.append(candidate_id);
    k.push_back('/');
    k.append(std::to_string(split_index));
    k.push_back('/');
    k.append(tag);
    return k;
}

}  // namespace facte
