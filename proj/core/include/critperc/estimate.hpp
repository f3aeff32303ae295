#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "critperc/rng.hpp"

namespace critperc {

/// Monte Carlo accumulator over integer-valued samples. All state is
/// integral, so merging is associative and commutative bit for bit.
struct Estimate {
    std::uint64_t samples = 0;
    std::uint64_t sum = 0;
    uint128_t sumSquares = 0;
    bool indicator = false;
    RngSpec seed;  ///< seed and first stream of the pooled samples

    void add(std::uint64_t value) {
        ++samples;
        sum += value;
        sumSquares += static_cast<uint128_t>(value) * value;
    }

    double mean() const { return samples == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(samples); }
    double secondMoment() const {
        return samples == 0 ? 0.0 : static_cast<double>(static_cast<long double>(sumSquares) / samples);
    }
    /// Indicators: sqrt(p(1-p)/N). Otherwise the sample standard deviation over sqrt(N).
    double standardError() const;

    friend Estimate merge(const Estimate& a, const Estimate& b);
    friend bool operator==(const Estimate&, const Estimate&) = default;
};

Estimate merge(const Estimate& a, const Estimate& b);

/// Persists partially accumulated estimates so an interrupted run resumes
/// at the next unfinished chunk. Keys identify one estimate within a run.
class CheckpointSink {
public:
    virtual ~CheckpointSink() = default;
    virtual bool load(const std::string& key, Estimate& partial) = 0;
    virtual void store(const std::string& key, const Estimate& partial) = 0;
};

struct RunOptions {
    unsigned threads = 1;
    std::uint64_t chunk = 1'000'000;          ///< checkpoint granularity in samples
    CheckpointSink* checkpoint = nullptr;
    std::string checkpointKey;
    std::vector<std::uint64_t>* raw = nullptr;  ///< per-sample values in stream order
    std::uint64_t stopAfterChunks = 0;        ///< 0 = run to completion (nonzero simulates an interruption)
};

/// Draws `budget` samples; sample k uses stream base.stream + k, so the
/// result does not depend on the thread count or on checkpoint restarts.
Estimate runSamples(std::uint64_t budget, const RngSpec& base, bool indicator,
                    const std::function<std::uint64_t(const RngSpec&)>& sample, const RunOptions& options = {});

using MultiSample = std::function<void(const RngSpec&, std::span<std::uint64_t>)>;

/// Like runSamples, for a sampler that yields one value per estimate on each
/// draw. Checkpoint keys get the suffix "/<index>"; raw dumps record value 0.
std::vector<Estimate> runSamplesMulti(std::uint64_t budget, const RngSpec& base, const std::vector<bool>& indicator,
                                      const MultiSample& sample, const RunOptions& options = {});

/// Stream base reserved for one (experiment, row, purpose) block; blocks
/// are 2^32 streams apart so they never overlap.
inline RngSpec streamBlock(std::uint64_t seed, std::uint64_t block) { return {seed, block << 32}; }

/// Deterministic block id from a tag and integer coordinates.
std::uint64_t blockId(const std::string& tag, std::int64_t a = 0, std::int64_t b = 0);

/// Sub-block of `rng` for one purpose; sample offsets stay below 2^32.
inline RngSpec subStream(const RngSpec& rng, const std::string& tag, std::int64_t a = 0, std::int64_t b = 0) {
    return {rng.seed, rng.stream + (blockId(tag, a, b) << 32)};
}

}  // namespace critperc
