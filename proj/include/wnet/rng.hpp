#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace wnet {

/// Deterministic pseudorandom stream shared by every stochastic component
/// (initialization, dropout, shuffling, fold assignment).
///
/// The engine is mt19937_64, whose output sequence is pinned by the C++
/// standard, and all derived draws (uniform doubles, bounded integers) are
/// computed from raw 64-bit words with fixed arithmetic, so a given
/// (seed, position) pair replays identically on every platform. The standard
/// library distributions are deliberately not used; their output is
/// implementation-defined.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t next_u64() {
        ++position_;
        return engine_();
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_uniform();
    }

    /// Uniform integer in [0, n). n must be >= 1.
    std::size_t next_below(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t position() const { return position_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    std::uint64_t position_ = 0;
};

/// splitmix64 finalizer; mixes all input bits into the output.
inline std::uint64_t mix_bits(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic child seed for (master seed, index); used to give each
/// cross-validation fold an isolated stream derived from one master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix_bits(master + 0x9E3779B97F4A7C15ULL * (index + 1));
}

/// Fisher-Yates shuffle driven by the stream; unlike std::shuffle the visit
/// order and draw mapping are fixed, so results replay across platforms.
template <typename T>
void shuffle(std::vector<T>& values, RngStream& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::size_t j = rng.next_below(i);
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace wnet
