#include <gtest/gtest.h>

#include <map>

#include "critperc/events.hpp"
#include "support.hpp"

using namespace critperc;
namespace ts = testing_support;

namespace {

const PartitionSpec kTiny{1, 3, 1};

/// Edges that decide O_{0,0} for (m, s, t) = (1, 3, 1): the 16 edges of the
/// width-one ring at radius 2, and two parallel edges in each corridor.
std::vector<EdgeId> ringEdges() { return cellRegions(kTiny, 0, 0).middle.edges(); }

std::vector<std::pair<EdgeId, EdgeId>> corridorPairs() {
    using O = Orientation;
    return {{{{2, 0}, O::Horizontal}, {{2, 1}, O::Horizontal}},
            {{{-3, 0}, O::Horizontal}, {{-3, 1}, O::Horizontal}},
            {{{0, 2}, O::Vertical}, {{1, 2}, O::Vertical}},
            {{{0, -3}, O::Vertical}, {{1, -3}, O::Vertical}}};
}

bool tinyOracle(const Configuration& c) {
    for (const auto& e : ringEdges())
        if (!c.isOpen(e)) return false;
    for (const auto& [a, b] : corridorPairs())
        if (!c.isOpen(a) && !c.isOpen(b)) return false;
    return true;
}

std::vector<EdgeId> tinyRelevantEdges() {
    auto edges = ringEdges();
    for (const auto& [a, b] : corridorPairs()) {
        edges.push_back(a);
        edges.push_back(b);
    }
    return edges;
}

void expectWitnessesValid(const Configuration& c, const PartitionSpec& spec, const EventReport& r) {
    for (const auto& w : r.circuits) {
        const Region middle = cellRegions(spec, w.i, w.j).middle;
        for (const auto& e : w.circuit.edges()) {
            EXPECT_TRUE(middle.containsEdge(e));
            EXPECT_TRUE(c.isOpen(e));
        }
    }
    for (const auto& w : r.connections) {
        const auto cell = cellRegions(spec, w.i, w.j);
        const Region& corridor = w.direction == Direction::Horizontal ? cell.corridorH : cell.corridorV;
        for (std::size_t k = 0; k < w.path.size(); ++k) {
            EXPECT_TRUE(corridor.contains(w.path[k]));
            if (k + 1 < w.path.size()) {
                const auto e = EdgeId::between(w.path[k], w.path[k + 1]);
                EXPECT_TRUE(!c.contains(e) || c.isOpen(e));
            }
        }
    }
}

}  // namespace

TEST(EventO, AllOpen) {
    const PartitionSpec spec{3, 9, 3};
    const Region W = Region::box(27);
    const Configuration c(W, EdgeState::Open);
    const EventReport r = eventO(c, spec, W);
    ASSERT_TRUE(r.holds) << r.failure;
    EXPECT_TRUE(r.failure.empty());
    EXPECT_EQ(r.circuits.size(), 9u);
    EXPECT_EQ(r.connections.size(), 24u);
    for (const auto& w : r.circuits) EXPECT_EQ(w.circuit.length(), 48u);  // the outer rim of A2
    expectWitnessesValid(c, spec, r);
    for (const auto& w : r.connections) EXPECT_EQ(w.path.size(), 2u * spec.t + 1);  // straight across
}

TEST(EventO, AllClosedFailsAtFirstAnnulus) {
    const PartitionSpec spec{3, 9, 3};
    const Region W = Region::box(27);
    const EventReport r = eventO(Configuration(W), spec, W);
    EXPECT_FALSE(r.holds);
    EXPECT_EQ(r.failure, "no open circuit in annulus A2(-1,-1)");
    EXPECT_TRUE(r.circuits.empty());
}

TEST(EventO, SingleCellWindow) {
    const PartitionSpec spec{3, 9, 3};
    const Region W = cellRegions(spec, 1, 0).box;
    const EventReport r = eventO(Configuration(W, EdgeState::Open), spec, W);
    EXPECT_TRUE(r.holds);
    EXPECT_EQ(r.circuits.size(), 1u);
    EXPECT_EQ(r.connections.size(), 4u);
    EXPECT_THROW(eventO(Configuration(Region::box(27)), spec, Region::box(10)), std::invalid_argument);
    EXPECT_THROW(eventO(Configuration(Region::box(27)), spec, cellRegions(spec, 2, 0).box), std::invalid_argument);
}

TEST(EventO, TinyInstanceMatchesReduction) {
    const Region W = cellRegions(kTiny, 0, 0).box;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        const double p = seed % 2 ? 0.97 : 0.9;
        const Configuration c = ts::randomConfiguration(W, p, seed);
        const EventReport r = eventO(c, kTiny, W);
        ASSERT_EQ(r.holds, tinyOracle(c)) << seed;
        if (r.holds) expectWitnessesValid(completeOutside(c, W, EdgeState::Open), kTiny, r);
    }
}

TEST(EventO, TinyInstanceIgnoresOtherEdges) {
    const Region W = cellRegions(kTiny, 0, 0).box;
    const auto relevant = tinyRelevantEdges();
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Configuration c = ts::randomConfiguration(W, 0.95, seed);
        const bool before = eventO(c, kTiny, W).holds;
        for (const auto& e : W.edges()) {
            if (std::find(relevant.begin(), relevant.end(), e) != relevant.end()) continue;
            c.flip(e);
            ASSERT_EQ(eventO(c, kTiny, W).holds, before) << seed;
            c.flip(e);
        }
    }
}

TEST(EventO, TinyInstanceExactProbability) {
    const Region W = cellRegions(kTiny, 0, 0).box;
    // Twelve ring edges fixed open, four ring edges and the eight corridor
    // edges free: P = p^4 (1 - (1-p)^2)^4.
    Configuration background(W);
    const auto ring = ringEdges();
    for (const auto& e : ring) background.set(e, true);
    std::vector<EdgeId> variable(ring.begin(), ring.begin() + 4);
    for (const auto& [a, b] : corridorPairs()) {
        variable.push_back(a);
        variable.push_back(b);
    }
    EnumerationTask task{background, variable, 0.5, 1};
    auto event = [&](const Configuration& c) { return eventO(c, kTiny, W).holds; };
    EXPECT_EQ(*enumerateProbability(task, event).exact, Rational(81, 4096));
    task.p = 0.9;
    EXPECT_NEAR(enumerateProbability(task, event).toDouble(), std::pow(0.9, 4) * std::pow(0.99, 4), 1e-14);
}

TEST(EventO, Json) {
    const Region W = cellRegions(kTiny, 0, 0).box;
    const EventReport r = eventO(Configuration(W, EdgeState::Open), kTiny, W);
    const std::string brief = toJson(r, false);
    EXPECT_NE(brief.find("\"holds\":true"), std::string::npos);
    EXPECT_EQ(brief.find("\"sites\""), std::string::npos);
    EXPECT_NE(toJson(r, true).find("\"sites\":[[-2,-2]"), std::string::npos);
}

TEST(EventG, ExtremesAndExact) {
    const Region w = Region::box(3);
    EXPECT_TRUE(eventG(Configuration(w), kTiny, 0, 0));
    EXPECT_FALSE(eventG(Configuration(w, EdgeState::Open), kTiny, 0, 0));
    const auto exact = enumerateProbability(EnumerationTask::allEdges(Region::box(1), 0.5),
                                            [](const Configuration& c) { return eventG(c, kTiny, 0, 0); });
    EXPECT_EQ(*exact.exact, Rational(1, 16));
}

TEST(EventG, InsideOfDualCircuitDoesNotAffectO) {
    const PartitionSpec spec{1, 6, 2};
    const Region W = cellRegions(spec, 0, 0).box;
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 300 && checked < 25; ++seed) {
        Configuration c = ts::randomConfiguration(W, 0.6, seed);
        const auto beta = innermostClosedDualCircuit(c, cellRegions(spec, 0, 0).inner);
        if (!beta) continue;
        ++checked;
        const bool before = eventO(c, spec, W).holds;
        const Region inside = beta->interior();
        const Configuration fresh = ts::randomConfiguration(W, 0.5, 1000 + seed);
        for (const auto& e : inside.edges()) c.set(e, fresh.isOpen(e));
        EXPECT_EQ(eventO(c, spec, W).holds, before);
    }
    EXPECT_GT(checked, 0);
}

TEST(EventD, MatchesScan) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const int n = 2 + static_cast<int>(seed % 4);
        const Region box = Region::box(n);
        const ClusterLabeling l(ts::randomConfiguration(box, 0.5, seed), box);
        const double a = 0.05 * (seed % 7 + 1), b = a + 0.3;
        bool scan = false;
        for (const auto& cl : ts::clusters(ts::randomConfiguration(box, 0.5, seed), box)) {
            const double v = static_cast<double>(cl.size()) / (n * n * 0.6);
            scan = scan || (v > a && v < b);
        }
        EXPECT_EQ(eventD(l, n, a, b, 0.6), scan);
    }
}

TEST(EventD, Extremes) {
    const Region box = Region::box(2);
    const ClusterLabeling open(Configuration(box, EdgeState::Open), box);
    EXPECT_FALSE(eventD(open, 2, 25.0 / 4.0, 30.0, 1.0));
    EXPECT_TRUE(eventD(open, 2, 1.0, 7.0, 1.0));
    EXPECT_THROW(eventD(open, 2, 1.0, 7.0, 0.0), std::invalid_argument);
}

TEST(EventD, SmallestBoxExact) {
    const Region box = Region::box(1);
    const auto v = enumerateProbability(EnumerationTask::allEdges(box, 0.5), [&](const Configuration& c) {
        return eventD(ClusterLabeling(c, box), 1, 1.5, 4.5, 1.0);
    });
    EXPECT_EQ(*v.exact, Rational(1211, 2048));
}

TEST(CrossingCluster, Extremes) {
    const PartitionSpec spec{3, 6, 2};
    EXPECT_TRUE(crossingClusterCheck(Configuration(Region::box(18), EdgeState::Open), spec, 18));
    EXPECT_FALSE(crossingClusterCheck(Configuration(Region::box(18)), spec, 18));
    EXPECT_THROW(crossingClusterCheck(Configuration(Region::box(18)), spec, 17), std::invalid_argument);
}

TEST(CrossingCluster, ImpliedByO) {
    const PartitionSpec spec{3, 6, 2};
    const Region W = Region::box(18);
    int holds = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const Configuration c = ts::randomConfiguration(W, 0.93, seed);
        if (!eventO(c, spec, W).holds) continue;
        ++holds;
        EXPECT_TRUE(crossingClusterCheck(c, spec, 18)) << seed;
    }
    EXPECT_GT(holds, 5);
}

TEST(Niceness, AllOpenWindow) {
    const PartitionSpec spec{1, 6, 2};
    const CellRegions cell = cellRegions(spec, 0, 0);
    const Configuration open(cell.box, EdgeState::Open);
    const auto gamma = eventO(open, spec, cell.box).circuits.at(0).circuit;
    const PartialSampler sampler{open, {}, 1.0};
    const auto est = nicenessExpectation(gamma, spec, 0, 0, sampler, 250, {1, 0});
    EXPECT_FALSE(est.insufficientSupport());
    EXPECT_EQ(est.estimate.samples, 250u);
    EXPECT_DOUBLE_EQ(est.estimate.mean(), static_cast<double>(cell.shell.size()));
}

TEST(Niceness, InsufficientSupportIsFlagged) {
    const PartitionSpec spec{1, 6, 2};
    const CellRegions cell = cellRegions(spec, 0, 0);
    const auto gamma = eventO(Configuration(cell.box, EdgeState::Open), spec, cell.box).circuits.at(0).circuit;
    const PartialSampler sampler{Configuration(cell.box), {}, 0.5};
    const auto est = nicenessExpectation(gamma, spec, 0, 0, sampler, 300, {1, 0});
    EXPECT_TRUE(est.insufficientSupport());
    EXPECT_EQ(est.attempts, 300u);
}

TEST(Niceness, ExactPerCircuitAndMarkov) {
    // Open background with a few variable edges on both rims of A2 and
    // around one site of A3, so several widest circuits are attainable.
    const PartitionSpec spec{1, 6, 2};
    const CellRegions cell = cellRegions(spec, 0, 0);
    using O = Orientation;
    const std::vector<EdgeId> variable = {
        {{4, -1}, O::Vertical}, {{4, 0}, O::Vertical},   {{4, 1}, O::Vertical},    {{3, -1}, O::Vertical},
        {{3, 0}, O::Vertical},  {{3, 1}, O::Vertical},   {{2, 2}, O::Horizontal},  {{1, 2}, O::Horizontal},
        {{2, 2}, O::Vertical},  {{2, 1}, O::Vertical},   {{0, 3}, O::Horizontal},  {{0, 4}, O::Horizontal}};
    const EnumerationTask task{Configuration(cell.box, EdgeState::Open), variable, 0.5, 1};

    std::map<std::vector<SiteCoord>, Circuit> attainable;
    Configuration c(cell.box, EdgeState::Open);
    for (std::uint64_t mask = 0; mask < (1u << variable.size()); ++mask) {
        ts::applyMask(c, variable, mask);
        const auto r = eventO(c, spec, cell.box);
        if (r.holds) attainable.emplace(r.circuits[0].circuit.sites(), r.circuits[0].circuit);
    }
    ASSERT_GE(attainable.size(), 3u);

    auto ctilde = [&](const Configuration& x) { return static_cast<std::int64_t>(boundaryTouchCount(x, cell.shell)); };
    auto holdsO = [&](const Configuration& x) { return eventO(x, spec, cell.box).holds; };
    const Rational overall = *enumerateConditionalExpectation(task, ctilde, holdsO).exact;
    const Rational pO = *enumerateProbability(task, holdsO).exact;

    Rational total(0), markovMass(0);
    for (const auto& [key, gamma] : attainable) {
        const Rational e = *nicenessExpectationExact(gamma, spec, 0, 0, task).exact;
        const Rational pGamma = *enumerateProbability(task, [&](const Configuration& x) {
                                     const auto r = eventO(x, spec, cell.box);
                                     return r.holds && r.circuits[0].circuit == gamma;
                                 }).exact;
        total += pGamma * e;
        if (e <= 2 * overall) markovMass += pGamma;
    }
    EXPECT_EQ(total, overall * pO);           // law of total expectation
    EXPECT_GE(markovMass / pO, Rational(1, 2));  // Markov
}

TEST(Niceness, MonteCarloAgreesWithExact) {
    const PartitionSpec spec{1, 3, 1};
    const CellRegions cell = cellRegions(spec, 0, 0);
    Configuration background(cell.box, EdgeState::Open);
    std::vector<EdgeId> variable;
    for (const auto& [a, b] : corridorPairs()) {
        variable.push_back(a);
        variable.push_back(b);
    }
    for (const auto& e : Region::box(1).edges())
        if (e.site == SiteCoord{0, 0} || e.other() == SiteCoord{0, 0}) variable.push_back(e);
    ASSERT_EQ(variable.size(), 12u);
    const auto gamma = eventO(background, spec, cell.box).circuits.at(0).circuit;
    const ExactValue exact = nicenessExpectationExact(gamma, spec, 0, 0, {background, variable, 0.5, 1});
    const auto mc = nicenessExpectation(gamma, spec, 0, 0, {background, variable, 0.5}, 4000, {5, 0});
    ASSERT_FALSE(mc.insufficientSupport());
    EXPECT_NEAR(mc.estimate.mean(), exact.toDouble(), 4 * mc.estimate.standardError() + 1e-12);
}
