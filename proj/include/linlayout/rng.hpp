#pragma once

#include <cstdint>
#include <random>

namespace linlayout {

/// Purpose tags for independent generator streams derived from one seed.
enum class Stream : std::uint64_t {
    Init = 1,
    Minibatch = 2,
    Data = 3,
    Shuffle = 4,
    Outliers = 5,
    Undersample = 6,
    Solver = 7,
};

/// Deterministic 64-bit generator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Distributions are implemented here rather than taken from
/// <random>, because the library's distribution algorithms are
/// implementation-defined:
///   - uniform():  top 53 bits of one draw, scaled to [0, 1)
///   - uniform_open(): (k + 1) * 2^-53, in (0, 1]
///   - normal():   Box-Muller cosine branch, one normal per two draws
///   - below(n):   rejection sampling on the largest multiple of n
/// Streams are derived by mixing (seed, tag) through SplitMix64.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed);

    /// Child generator for one purpose; equal (seed, tag) gives equal streams.
    static SeededRng derive(std::uint64_t seed, Stream tag);
    static SeededRng derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                            std::uint64_t c = 0);

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next() { return engine_(); }
    double uniform();
    double uniform_open();
    double uniform(double lo, double hi);
    double normal();
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace linlayout
