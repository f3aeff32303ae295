#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace critperc {

__extension__ typedef unsigned __int128 uint128_t;

/// Identifies one reproducible random stream. Configurations and sample
/// streams are pure functions of (seed, stream).
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    RngSpec withStream(std::uint64_t s) const { return {seed, s}; }
    RngSpec offset(std::uint64_t k) const { return {seed, stream + k}; }

    friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Key of the (seed, stream) pair; combine with a counter through counterWord.
constexpr std::uint64_t streamKey(const RngSpec& rng) {
    return mix64(rng.seed ^ mix64(rng.stream ^ 0x6a09e667f3bcc909ULL));
}

constexpr std::uint64_t counterWord(std::uint64_t key, std::uint64_t counter) {
    return mix64(key ^ mix64(counter + 0xbb67ae8584caa73bULL));
}

/// Threshold t such that a uniform 64-bit word w satisfies P(w < t) = p,
/// exact for dyadic p. p >= 1 is handled by BernoulliThreshold::always.
class BernoulliThreshold {
public:
    explicit BernoulliThreshold(double p) {
        if (!(p > 0.0)) {
            threshold_ = 0;
        } else if (p >= 1.0) {
            always_ = true;
        } else {
            threshold_ = static_cast<std::uint64_t>(std::ldexp(p, 64));
        }
    }

    bool accept(std::uint64_t word) const { return always_ || word < threshold_; }

private:
    std::uint64_t threshold_ = 0;
    bool always_ = false;
};

/// Sequential generator over one stream. Satisfies UniformRandomBitGenerator,
/// but draws go through the helpers below so results do not depend on the
/// standard library's distribution implementations.
class StreamRng {
public:
    using result_type = std::uint64_t;

    explicit StreamRng(const RngSpec& rng) : key_(streamKey(rng)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return counterWord(key_, counter_++); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), bound > 0 (Lemire's method).
    std::uint64_t below(std::uint64_t bound) {
        uint128_t m = static_cast<uint128_t>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t floor = (0 - bound) % bound;
            while (low < floor) {
                m = static_cast<uint128_t>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace critperc
