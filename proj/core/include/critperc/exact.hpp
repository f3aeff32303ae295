#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "critperc/lattice.hpp"

namespace critperc {

/// Exhaustive enumeration over the states of a small set of edges; every
/// other edge of the window keeps its state from `background`.
struct EnumerationTask {
    static constexpr std::size_t kMaxVariableEdges = 24;

    Configuration background;
    std::vector<EdgeId> variableEdges;
    double p = 0.5;
    unsigned threads = 1;

    /// All edges of the window vary; the background is irrelevant.
    static EnumerationTask allEdges(const Region& window, double p);
};

using Rational = boost::rational<std::int64_t>;

/// Enumeration result; `exact` is set for p = 1/2, where every probability is
/// a dyadic rational with denominator 2^(variable edges).
struct ExactValue {
    long double value = 0.0L;
    std::optional<Rational> exact;

    double toDouble() const { return static_cast<double>(value); }
    /// "num/den" when exact, otherwise a decimal with 17 significant digits.
    std::string toString() const;
};

using Observable = std::function<std::int64_t(const Configuration&)>;
using Event = std::function<bool(const Configuration&)>;

ExactValue enumerateProbability(const EnumerationTask& task, const Event& event);
ExactValue enumerateExpectation(const EnumerationTask& task, const Observable& observable);
/// Throws std::domain_error when the conditioning event has probability 0.
ExactValue enumerateConditionalExpectation(const EnumerationTask& task, const Observable& observable,
                                           const Event& condition);
/// Exact law of an integer observable.
std::map<std::int64_t, ExactValue> enumerateDistribution(const EnumerationTask& task, const Observable& observable);

}  // namespace critperc
