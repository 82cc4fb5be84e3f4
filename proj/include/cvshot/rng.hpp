#pragma once

#include <cstdint>
#include <random>

namespace cvshot {

// Deterministic sub-stream derivation: every (seed, stream id) pair owns an
// independent generator, so groups can be simulated in parallel without
// sharing state. Stream ids are built from small structured tags.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

enum class StreamPurpose : std::uint64_t {
    AliceSymbols = 1,
    Assignment = 2,
    GroupNoise = 3,
    Generic = 4,
};

inline std::uint64_t stream_id(StreamPurpose purpose, unsigned quadrature, unsigned group = 0) {
    return (static_cast<std::uint64_t>(purpose) << 48) |
           (static_cast<std::uint64_t>(quadrature) << 40) | group;
}

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t id)
        : engine_(splitmix64(splitmix64(seed) ^ splitmix64(id))) {}

    double standard_normal() { return normal_(engine_); }

    /// Normal draw with the given variance (not std deviation).
    double normal_var(double variance) {
        return variance > 0.0 ? std::sqrt(variance) * normal_(engine_) : 0.0;
    }

    double uniform01() { return uniform_(engine_); }

    /// Uniform integer in [0, n).
    std::uint32_t uniform_index(std::uint32_t n) {
        std::uniform_int_distribution<std::uint32_t> dist(0, n - 1);
        return dist(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace cvshot
