#include "critperc/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace critperc {
namespace {

/// value -> number of configurations with j open variable edges, per j.
using Histogram = std::map<std::int64_t, std::vector<std::uint64_t>>;

void validate(const EnumerationTask& task) {
    if (task.variableEdges.size() > EnumerationTask::kMaxVariableEdges)
        throw std::invalid_argument("enumeration cap exceeded: at most 24 variable edges");
    if (!(task.p >= 0.0 && task.p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
    auto sorted = task.variableEdges;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("variable edges repeat");
    for (const auto& e : sorted)
        if (!task.background.contains(e)) throw std::invalid_argument("variable edge outside the window");
}

/// Gray-code walk over [first, last): each step flips one variable edge.
void walk(const EnumerationTask& task, std::uint64_t first, std::uint64_t last, const Observable& observable,
          const Event* condition, Histogram& out) {
    const std::size_t k = task.variableEdges.size();
    Configuration config = task.background;
    const std::uint64_t startCode = first ^ (first >> 1);
    int open = 0;
    for (std::size_t b = 0; b < k; ++b) {
        const bool bit = (startCode >> b) & 1U;
        config.set(task.variableEdges[b], bit);
        open += bit ? 1 : 0;
    }
    for (std::uint64_t i = first; i < last; ++i) {
        if (i != first) {
            const auto b = static_cast<std::size_t>(std::countr_zero(i));
            const EdgeId& e = task.variableEdges[b];
            const bool now = !config.isOpen(e);
            config.set(e, now);
            open += now ? 1 : -1;
        }
        if (condition && !(*condition)(config)) continue;
        auto& row = out[observable(config)];
        if (row.empty()) row.assign(k + 1, 0);
        ++row[static_cast<std::size_t>(open)];
    }
}

Histogram histogram(const EnumerationTask& task, const Observable& observable, const Event* condition) {
    validate(task);
    const std::uint64_t total = std::uint64_t{1} << task.variableEdges.size();
    const unsigned threads =
        static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(task.threads, total)));
    std::vector<Histogram> parts(threads);
    auto work = [&](unsigned w) { walk(task, total * w / threads, total * (w + 1) / threads, observable, condition, parts[w]); };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    }
    Histogram merged;
    for (const auto& part : parts) {
        for (const auto& [value, row] : part) {
            auto& dst = merged[value];
            if (dst.empty()) dst.assign(row.size(), 0);
            for (std::size_t j = 0; j < row.size(); ++j) dst[j] += row[j];
        }
    }
    return merged;
}

/// Weight p^j (1-p)^(k-j) of one configuration with j open variable edges.
std::vector<long double> weights(std::size_t k, double p) {
    std::vector<long double> w(k + 1);
    const long double q = 1.0L - p;
    for (std::size_t j = 0; j <= k; ++j)
        w[j] = std::pow(static_cast<long double>(p), static_cast<long double>(j)) *
               std::pow(q, static_cast<long double>(k - j));
    // Total mass must be 1.
    long double mass = 0.0L, binom = 1.0L;
    for (std::size_t j = 0; j <= k; ++j) {
        mass += binom * w[j];
        binom = binom * static_cast<long double>(k - j) / static_cast<long double>(j + 1);
    }
    if (std::fabs(mass - 1.0L) > 1e-12L) throw std::logic_error("enumeration weights do not sum to one");
    return w;
}

struct Moments {
    long double mass = 0.0L;
    long double first = 0.0L;
    std::int64_t count = 0;
    std::int64_t countedSum = 0;
};

Moments moments(const Histogram& h, std::size_t k, double p) {
    const auto w = weights(k, p);
    Moments m;
    for (const auto& [value, row] : h) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            const long double mass = static_cast<long double>(row[j]) * w[j];
            m.mass += mass;
            m.first += mass * static_cast<long double>(value);
            m.count += static_cast<std::int64_t>(row[j]);
            m.countedSum += static_cast<std::int64_t>(row[j]) * value;
        }
    }
    return m;
}

bool isHalf(double p) { return p == 0.5; }

}  // namespace

EnumerationTask EnumerationTask::allEdges(const Region& window, double p) {
    EnumerationTask task{Configuration(window), window.edges(), p, 1};
    return task;
}

std::string ExactValue::toString() const {
    if (exact) return std::to_string(exact->numerator()) + "/" + std::to_string(exact->denominator());
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17Lg", value);
    return buf;
}

ExactValue enumerateProbability(const EnumerationTask& task, const Event& event) {
    return enumerateExpectation(task, [&](const Configuration& c) -> std::int64_t { return event(c) ? 1 : 0; });
}

ExactValue enumerateExpectation(const EnumerationTask& task, const Observable& observable) {
    const std::size_t k = task.variableEdges.size();
    const Moments m = moments(histogram(task, observable, nullptr), k, task.p);
    ExactValue out;
    out.value = m.first;
    if (isHalf(task.p)) out.exact = Rational(m.countedSum, std::int64_t{1} << k);
    return out;
}

ExactValue enumerateConditionalExpectation(const EnumerationTask& task, const Observable& observable,
                                           const Event& condition) {
    const std::size_t k = task.variableEdges.size();
    const Moments m = moments(histogram(task, observable, &condition), k, task.p);
    if (m.count == 0 || !(m.mass > 0.0L)) throw std::domain_error("conditioning event has probability zero");
    ExactValue out;
    out.value = m.first / m.mass;
    if (isHalf(task.p)) out.exact = Rational(m.countedSum, m.count);
    return out;
}

std::map<std::int64_t, ExactValue> enumerateDistribution(const EnumerationTask& task, const Observable& observable) {
    const std::size_t k = task.variableEdges.size();
    const auto h = histogram(task, observable, nullptr);
    const auto w = weights(k, task.p);
    std::map<std::int64_t, ExactValue> out;
    for (const auto& [value, row] : h) {
        ExactValue v;
        std::int64_t count = 0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            v.value += static_cast<long double>(row[j]) * w[j];
            count += static_cast<std::int64_t>(row[j]);
        }
        if (isHalf(task.p)) v.exact = Rational(count, std::int64_t{1} << k);
        out.emplace(value, v);
    }
    return out;
}

}  // namespace critperc
