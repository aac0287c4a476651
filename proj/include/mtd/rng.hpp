#pragma once

#include <cstdint>
#include <random>

namespace mtd {

namespace detail {

// splitmix64 finalizer; used to turn (seed, stream) pairs into well-spread
// 64-bit seeds for independent substreams.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Seedable deterministic generator. Identical seed => bit-identical stream.
/// A single Rng must be owned by exactly one execution stream; independent
/// work derives its own generator via substream().
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(detail::mix64(seed)) {}

    std::uint64_t next_u64() { return gen_(); }

    /// U(0,1), both endpoints excluded.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Generator for an independent stream derived from (seed, stream index).
    Rng substream(std::uint64_t stream) const {
        return Rng(detail::mix64(seed_ ^ detail::mix64(stream + 0x51ed2701ULL)));
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace mtd
