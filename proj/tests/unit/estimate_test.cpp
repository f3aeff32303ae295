#include <gtest/gtest.h>

#include <map>

#include "critperc/estimate.hpp"

using namespace critperc;

namespace {

class MemorySink : public CheckpointSink {
public:
    bool load(const std::string& key, Estimate& partial) override {
        auto it = store_.find(key);
        if (it == store_.end()) return false;
        partial = it->second;
        return true;
    }
    void store(const std::string& key, const Estimate& partial) override { store_[key] = partial; }
    std::size_t size() const { return store_.size(); }

private:
    std::map<std::string, Estimate> store_;
};

std::uint64_t draw(const RngSpec& rng) { return StreamRng(rng)() % 7; }

}  // namespace

TEST(Estimate, MergeIsAssociativeAndCommutative) {
    Estimate a, b, c;
    for (std::uint64_t v : {1, 5, 2}) a.add(v);
    for (std::uint64_t v : {0, 9}) b.add(v);
    c.add(3);
    EXPECT_EQ(merge(merge(a, b), c), merge(a, merge(b, c)));
    EXPECT_EQ(merge(a, b).sum, merge(b, a).sum);
    EXPECT_EQ(merge(Estimate{}, a), a);
    EXPECT_EQ(merge(merge(a, b), c).samples, 6u);
}

TEST(Estimate, StandardErrors) {
    Estimate ind;
    ind.indicator = true;
    for (int k = 0; k < 100; ++k) ind.add(k % 4 == 0);
    EXPECT_DOUBLE_EQ(ind.standardError(), std::sqrt(0.25 * 0.75 / 100));
    Estimate values;
    for (std::uint64_t v : {2, 4, 4, 4, 5, 5, 7, 9}) values.add(v);
    EXPECT_DOUBLE_EQ(values.mean(), 5.0);
    EXPECT_NEAR(values.standardError(), std::sqrt(32.0 / 7.0 / 8.0), 1e-12);
    EXPECT_DOUBLE_EQ(values.secondMoment(), 29.0);
}

TEST(RunSamples, ThreadCountDoesNotChangeResult) {
    const RngSpec base{11, 1000};
    const Estimate one = runSamples(5000, base, false, draw);
    for (unsigned t : {2u, 3u, 8u}) {
        RunOptions o;
        o.threads = t;
        o.chunk = 777;
        EXPECT_EQ(runSamples(5000, base, false, draw, o), one);
    }
}

TEST(RunSamples, RawValuesFollowStreamOrder) {
    std::vector<std::uint64_t> raw;
    RunOptions o;
    o.threads = 3;
    o.raw = &raw;
    runSamples(50, {2, 7}, false, draw, o);
    ASSERT_EQ(raw.size(), 50u);
    for (std::uint64_t k = 0; k < 50; ++k) EXPECT_EQ(raw[k], draw({2, 7 + k}));
}

TEST(RunSamples, ResumesFromCheckpoint) {
    const RngSpec base{3, 0};
    const Estimate full = runSamples(1000, base, true, [](const RngSpec& r) { return draw(r) < 3; });
    MemorySink sink;
    RunOptions o;
    o.chunk = 128;
    o.checkpoint = &sink;
    o.checkpointKey = "row";
    o.stopAfterChunks = 3;
    const Estimate partial = runSamples(1000, base, true, [](const RngSpec& r) { return draw(r) < 3; }, o);
    EXPECT_EQ(partial.samples, 384u);
    o.stopAfterChunks = 0;
    o.threads = 2;
    EXPECT_EQ(runSamples(1000, base, true, [](const RngSpec& r) { return draw(r) < 3; }, o), full);
    std::vector<std::uint64_t> raw;
    o.raw = &raw;
    EXPECT_THROW(runSamples(1000, base, true, [](const RngSpec& r) { return draw(r) < 3; }, o), std::runtime_error);
}

TEST(RunSamplesMulti, OutputsShareDraws) {
    MemorySink sink;
    RunOptions o;
    o.checkpoint = &sink;
    o.checkpointKey = "k";
    const auto out = runSamplesMulti(
        300, {1, 0}, {false, true},
        [](const RngSpec& r, std::span<std::uint64_t> v) {
            v[0] = draw(r);
            v[1] = v[0] == 0;
        },
        o);
    EXPECT_EQ(out[0], runSamples(300, {1, 0}, false, draw));
    EXPECT_TRUE(out[1].indicator);
    EXPECT_EQ(sink.size(), 2u);
    EXPECT_THROW(runSamples(0, {}, false, draw), std::invalid_argument);
}

TEST(Streams, BlocksAreDisjoint) {
    EXPECT_EQ(streamBlock(4, 2).stream, 2ULL << 32);
    EXPECT_NE(blockId("pi", 1), blockId("pi", 2));
    EXPECT_NE(blockId("pi"), blockId("hc"));
    EXPECT_EQ(blockId("pi", 3, 4), blockId("pi", 3, 4));
    const RngSpec r = subStream({9, 5}, "x", 1);
    EXPECT_EQ(r.seed, 9u);
    EXPECT_EQ(r.stream & 0xffffffffULL, 5u);
}
