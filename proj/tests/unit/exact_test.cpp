#include <gtest/gtest.h>

#include "critperc/clusters.hpp"
#include "critperc/exact.hpp"
#include "critperc/topology.hpp"
#include "support.hpp"

using namespace critperc;
namespace ts = testing_support;

namespace {

bool originReachesBoundary(const Configuration& c) {
    const Region box = Region::box(1);
    for (auto v : ts::reach(c, box, {{0, 0}}))
        if (normInf(v) == 1) return true;
    return false;
}

}  // namespace

TEST(Enumeration, SingleEdge) {
    const Region w = Region::rectangle(0, 1, 0, 0);
    const auto e = w.edges().front();
    const auto v = enumerateProbability(EnumerationTask::allEdges(w, 0.5), [&](const Configuration& c) { return c.isOpen(e); });
    ASSERT_TRUE(v.exact);
    EXPECT_EQ(*v.exact, Rational(1, 2));
    EXPECT_EQ(v.toString(), "1/2");
}

TEST(Enumeration, OneArmFullAndReduced) {
    const auto full = enumerateProbability(EnumerationTask::allEdges(Region::box(1), 0.5), originReachesBoundary);
    EXPECT_EQ(*full.exact, Rational(15, 16));
    // Only the four edges at the origin matter.
    EnumerationTask reduced{Configuration(Region::box(1)), {}, 0.5, 1};
    for (const auto& e : Region::box(1).edges())
        if (e.site == SiteCoord{0, 0} || e.other() == SiteCoord{0, 0}) reduced.variableEdges.push_back(e);
    EXPECT_EQ(*enumerateProbability(reduced, originReachesBoundary).exact, Rational(15, 16));
}

TEST(Enumeration, GeneralP) {
    const auto v = enumerateProbability(EnumerationTask::allEdges(Region::box(1), 0.3), originReachesBoundary);
    EXPECT_FALSE(v.exact);
    EXPECT_NEAR(v.toDouble(), 1.0 - std::pow(0.7, 4), 1e-15);
}

TEST(Enumeration, StrictCrossingOfUnitSquare) {
    const Region box = Region::rectangle(0, 1, 0, 1);
    const auto v = enumerateProbability(EnumerationTask::allEdges(box, 0.5), [&](const Configuration& c) {
        return hasHorizontalCrossing(c, box, CrossingVariant::Strict);
    });
    EXPECT_EQ(*v.exact, Rational(3, 4));
}

TEST(Enumeration, DistributionIsAPartition) {
    for (double p : {0.5, 0.23}) {
        const auto law = enumerateDistribution(EnumerationTask::allEdges(Region::box(1), p), [](const Configuration& c) {
            return static_cast<std::int64_t>(maxClusterSize(ClusterLabeling(c, Region::box(1))));
        });
        long double total = 0;
        Rational exact(0);
        for (const auto& [value, prob] : law) {
            total += prob.value;
            if (prob.exact) exact += *prob.exact;
        }
        EXPECT_NEAR(static_cast<double>(total), 1.0, 1e-12);
        if (p == 0.5) {
            EXPECT_EQ(exact, Rational(1));
            EXPECT_EQ(*law.at(9).exact, Rational(431, 4096));
        }
    }
}

TEST(Enumeration, ConditionalExpectation) {
    const Region box = Region::box(1);
    const auto task = EnumerationTask::allEdges(box, 0.5);
    auto ctilde = [&](const Configuration& c) { return static_cast<std::int64_t>(boundaryTouchCount(c, box)); };
    auto sure = [](const Configuration&) { return true; };
    EXPECT_EQ(*enumerateConditionalExpectation(task, ctilde, sure).exact, *enumerateExpectation(task, ctilde).exact);
    EXPECT_EQ(*enumerateExpectation(task, ctilde).exact, Rational(143, 16));
    auto spokesOpen = [&](const Configuration& c) {
        for (const auto& e : box.edges())
            if ((e.site == SiteCoord{0, 0} || e.other() == SiteCoord{0, 0}) && !c.isOpen(e)) return false;
        return true;
    };
    const auto cond = enumerateConditionalExpectation(task, ctilde, spokesOpen);
    EXPECT_EQ(*cond.exact, Rational(9));
    EXPECT_GE(cond.toDouble(), 5.0);
    EXPECT_THROW(enumerateConditionalExpectation(task, ctilde, [](const Configuration&) { return false; }),
                 std::domain_error);
}

TEST(Enumeration, ThreadCountDoesNotMatter) {
    auto task = EnumerationTask::allEdges(Region::rectangle(0, 3, 0, 2), 0.37);
    const Region box = task.background.window();
    auto crossing = [&](const Configuration& c) { return hasHorizontalCrossing(c, box, CrossingVariant::Standard); };
    const auto one = enumerateProbability(task, crossing);
    task.threads = 3;
    EXPECT_EQ(enumerateProbability(task, crossing).value, one.value);
}

TEST(Enumeration, Guards) {
    EXPECT_THROW(enumerateProbability(EnumerationTask::allEdges(Region::box(2), 0.5), [](const Configuration&) { return true; }),
                 std::invalid_argument);
    EnumerationTask repeated{Configuration(Region::box(1)), {}, 0.5, 1};
    repeated.variableEdges = {Region::box(1).edges()[0], Region::box(1).edges()[0]};
    EXPECT_THROW(enumerateProbability(repeated, [](const Configuration&) { return true; }), std::invalid_argument);
    EnumerationTask foreign{Configuration(Region::box(1)), {{{5, 5}, Orientation::Horizontal}}, 0.5, 1};
    EXPECT_THROW(enumerateProbability(foreign, [](const Configuration&) { return true; }), std::invalid_argument);
}
