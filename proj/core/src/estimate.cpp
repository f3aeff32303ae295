#include "critperc/estimate.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace critperc {

double Estimate::standardError() const {
    if (samples == 0) return 0.0;
    const double n = static_cast<double>(samples);
    const double m = mean();
    if (indicator) return std::sqrt(std::max(0.0, m * (1.0 - m)) / n);
    if (samples < 2) return 0.0;
    const long double centered = static_cast<long double>(sumSquares) - static_cast<long double>(sum) * m;
    const double variance = static_cast<double>(std::max<long double>(0.0L, centered / (n - 1.0)));
    return std::sqrt(variance / n);
}

Estimate merge(const Estimate& a, const Estimate& b) {
    if (a.samples == 0) return b;
    if (b.samples == 0) return a;
    Estimate out;
    out.samples = a.samples + b.samples;
    out.sum = a.sum + b.sum;
    out.sumSquares = a.sumSquares + b.sumSquares;
    out.indicator = a.indicator && b.indicator;
    out.seed = a.seed.stream <= b.seed.stream ? a.seed : b.seed;
    return out;
}

namespace {

std::vector<Estimate> runRange(std::uint64_t first, std::uint64_t last, const RngSpec& base,
                               const std::vector<bool>& indicator, const MultiSample& sample, unsigned threads,
                               std::vector<std::uint64_t>* raw) {
    const std::uint64_t count = last - first;
    const std::size_t outputs = indicator.size();
    threads = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, count)));
    std::vector<std::vector<Estimate>> partial(threads, std::vector<Estimate>(outputs));
    std::vector<std::vector<std::uint64_t>> values(raw ? threads : 0);
    auto work = [&](unsigned w) {
        const std::uint64_t lo = first + count * w / threads;
        const std::uint64_t hi = first + count * (w + 1) / threads;
        std::vector<std::uint64_t> draw(outputs);
        auto& acc = partial[w];
        for (std::size_t o = 0; o < outputs; ++o) {
            acc[o].indicator = indicator[o];
            acc[o].seed = base.offset(lo);
        }
        for (std::uint64_t k = lo; k < hi; ++k) {
            std::fill(draw.begin(), draw.end(), 0);
            sample(base.offset(k), draw);
            for (std::size_t o = 0; o < outputs; ++o) acc[o].add(draw[o]);
            if (raw) values[w].push_back(draw[0]);
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    }
    std::vector<Estimate> out(outputs);
    for (const auto& p : partial)
        for (std::size_t o = 0; o < outputs; ++o) out[o] = merge(out[o], p[o]);
    for (std::size_t o = 0; o < outputs; ++o) out[o].indicator = indicator[o];
    if (raw)
        for (const auto& v : values) raw->insert(raw->end(), v.begin(), v.end());
    return out;
}

}  // namespace

std::vector<Estimate> runSamplesMulti(std::uint64_t budget, const RngSpec& base, const std::vector<bool>& indicator,
                                      const MultiSample& sample, const RunOptions& options) {
    if (budget == 0) throw std::invalid_argument("sample budget must be positive");
    if (indicator.empty()) throw std::invalid_argument("at least one output is required");
    const std::size_t outputs = indicator.size();
    const std::uint64_t chunk = std::max<std::uint64_t>(1, options.chunk);
    auto key = [&](std::size_t o) {
        return outputs == 1 ? options.checkpointKey : options.checkpointKey + "/" + std::to_string(o);
    };

    std::vector<Estimate> total(outputs);
    for (std::size_t o = 0; o < outputs; ++o) {
        total[o].indicator = indicator[o];
        total[o].seed = base;
    }
    std::uint64_t done = 0;
    if (options.checkpoint) {
        std::vector<Estimate> loaded(outputs);
        bool all = true;
        for (std::size_t o = 0; o < outputs && all; ++o) all = options.checkpoint->load(key(o), loaded[o]);
        if (all) {
            done = loaded[0].samples;
            for (const auto& e : loaded)
                if (e.samples != done) throw std::runtime_error("checkpoint entries disagree on the sample count");
            if (done > budget) throw std::runtime_error("checkpoint holds more samples than the budget");
            if (options.raw && done > 0) throw std::runtime_error("raw dumps cannot resume from a checkpoint");
            total = std::move(loaded);
        }
    }
    std::uint64_t chunks = 0;
    while (done < budget) {
        const std::uint64_t next = std::min(budget, done + chunk);
        const auto part = runRange(done, next, base, indicator, sample, options.threads, options.raw);
        for (std::size_t o = 0; o < outputs; ++o) {
            total[o] = merge(total[o], part[o]);
            total[o].indicator = indicator[o];
            total[o].seed = base;
        }
        done = next;
        if (options.checkpoint)
            for (std::size_t o = 0; o < outputs; ++o) options.checkpoint->store(key(o), total[o]);
        if (options.stopAfterChunks != 0 && ++chunks >= options.stopAfterChunks) break;
    }
    return total;
}

Estimate runSamples(std::uint64_t budget, const RngSpec& base, bool indicator,
                    const std::function<std::uint64_t(const RngSpec&)>& sample, const RunOptions& options) {
    return runSamplesMulti(
               budget, base, {indicator},
               [&](const RngSpec& rng, std::span<std::uint64_t> out) { out[0] = sample(rng); }, options)
        .front();
}

std::uint64_t blockId(const std::string& tag, std::int64_t a, std::int64_t b) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : tag) h = (h ^ c) * 0x100000001b3ULL;
    h = mix64(h ^ static_cast<std::uint64_t>(a));
    h = mix64(h ^ static_cast<std::uint64_t>(b));
    return h & 0xffffffffULL;
}

}  // namespace critperc
