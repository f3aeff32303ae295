// Acceptance suite: one PASS/FAIL line per criterion.
//   critperc_acceptance --cli <path to critperc> [--only N,...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include "critperc/clusters.hpp"
#include "critperc/estimators.hpp"
#include "critperc/events.hpp"
#include "critperc/exact.hpp"

using namespace critperc;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

RunOptions runOptions() {
    RunOptions o;
    o.threads = threads();
    return o;
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

double toDouble(const Rational& r) { return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()); }

/// |estimate - exact| in units of sqrt(p(1-p)/N) at the exact p.
double zIndicator(const Estimate& e, double exact) {
    const double se = std::sqrt(exact * (1 - exact) / static_cast<double>(e.samples));
    if (se == 0.0) return e.mean() == exact ? 0.0 : INFINITY;
    return std::fabs(e.mean() - exact) / se;
}

bool reachesBoundary(const Configuration& c) {
    const Region box = Region::box(1);
    const ClusterLabeling l(c, box);
    for (auto v : box.boundary().sites())
        if (l.label(v) == l.label({0, 0})) return true;
    return false;
}

// ------------------------------------------------------------------ 1

Outcome oracleEquivalence() {
    constexpr std::uint64_t N = 100000;
    const RngSpec base{20240601, 0};
    const Region box1 = Region::box(1);
    const auto task1 = EnumerationTask::allEdges(box1, 0.5);
    std::vector<std::string> bad;
    double worst = 0.0;
    int instances = 0;
    auto check = [&](const std::string& name, double z, bool exactAgrees) {
        ++instances;
        worst = std::max(worst, z);
        if (z > 4.0) bad.push_back(name + " z=" + fmt(z, 3));
        if (!exactAgrees) bad.push_back(name + " enumeration disagrees with the frozen value");
    };

    // Frozen values from an independent brute-force enumerator.
    const Rational piOne(15, 16), hcOne(3, 4), ctildeOne(143, 16), gOne(1, 16), dOne(1211, 2048);
    const Rational oTiny(81, 1 << 24);
    const std::map<std::int64_t, std::int64_t> maxCounts = {{1, 1},   {2, 130}, {3, 452}, {4, 660}, {5, 657},
                                                           {6, 680}, {7, 564}, {8, 521}, {9, 431}};

    {
        const Estimate e = estimatePi(1, 0.5, N, subStream(base, "pi"), runOptions());
        const auto exact = enumerateProbability(task1, reachesBoundary);
        check("pi(1)", zIndicator(e, toDouble(piOne)), *exact.exact == piOne);
    }
    {
        const Region square = Region::rectangle(0, 1, 0, 1);
        const Estimate e = estimateHC(1, 1, 0.5, CrossingVariant::Strict, N, subStream(base, "hc"), runOptions());
        const auto exact = enumerateProbability(EnumerationTask::allEdges(square, 0.5), [&](const Configuration& c) {
            return hasHorizontalCrossing(c, square, CrossingVariant::Strict);
        });
        check("HC(1,1) strict", zIndicator(e, toDouble(hcOne)), *exact.exact == hcOne);
    }
    {
        std::vector<bool> kinds(10, true);
        kinds[0] = false;
        const auto e = runSamplesMulti(
            N, subStream(base, "M1"), kinds,
            [&](const RngSpec& s, std::span<std::uint64_t> out) {
                const Configuration c = sampleConfiguration(box1, 0.5, s);
                const auto m = maxClusterSize(ClusterLabeling(c, box1));
                out[m] = 1;
                out[0] = boundaryTouchCount(c, box1);
            },
            runOptions());
        const auto law = enumerateDistribution(task1, [&](const Configuration& c) {
            return static_cast<std::int64_t>(maxClusterSize(ClusterLabeling(c, box1)));
        });
        for (const auto& [m, count] : maxCounts) {
            const Rational exact(count, 4096);
            check("P(M_1=" + std::to_string(m) + ")", zIndicator(e[static_cast<std::size_t>(m)], toDouble(exact)),
                  law.count(m) && *law.at(m).exact == exact);
        }
        const auto mean = enumerateExpectation(task1, [&](const Configuration& c) {
            return static_cast<std::int64_t>(boundaryTouchCount(c, box1));
        });
        check("E[C~(Lambda_1)]", std::fabs(e[0].mean() - toDouble(ctildeOne)) / e[0].standardError(),
              *mean.exact == ctildeOne);
    }
    {
        const PartitionSpec tiny{1, 3, 1};
        const Region W = cellRegions(tiny, 0, 0).box;
        const Estimate e = runSamples(
            N, subStream(base, "O"), true,
            [&](const RngSpec& s) -> std::uint64_t { return eventO(sampleConfiguration(W, 0.5, s), tiny, W).holds; },
            runOptions());
        // O reduces to 24 edges: the radius-2 ring and two edges per corridor.
        check("O^{1,3,1}", zIndicator(e, toDouble(oTiny)), true);
        const Estimate g = runSamples(
            N, subStream(base, "G"), true,
            [&](const RngSpec& s) -> std::uint64_t { return eventG(sampleConfiguration(box1, 0.5, s), tiny, 0, 0); },
            runOptions());
        const auto exact = enumerateProbability(task1, [&](const Configuration& c) { return eventG(c, tiny, 0, 0); });
        check("G at s=3,t=1", zIndicator(g, toDouble(gOne)), *exact.exact == gOne);
    }
    {
        auto inD = [&](const Configuration& c) { return eventD(ClusterLabeling(c, box1), 1, 1.5, 4.5, 1.0); };
        const Estimate e = runSamples(
            N, subStream(base, "D"), true,
            [&](const RngSpec& s) -> std::uint64_t { return inD(sampleConfiguration(box1, 0.5, s)); }, runOptions());
        check("D_1 on (1.5,4.5)", zIndicator(e, toDouble(dOne)), *enumerateProbability(task1, inD).exact == dOne);
    }
    Outcome o;
    o.pass = bad.empty();
    o.detail = std::to_string(instances) + " oracle instances at 10^5 samples, worst |z| = " + fmt(worst, 3);
    for (const auto& b : bad) o.detail += "; " + b;
    return o;
}

// ------------------------------------------------------------------ 2

Outcome dualityExactness() {
    std::uint64_t checked = 0, violations = 0;
    int boxes = 0;
    for (int k = 1; k <= 16; ++k)
        for (int l = 1; l <= 16; ++l) {
            const Region box = Region::rectangle(0, k, 0, l);
            const auto edges = box.edges();
            if (edges.size() > 16) continue;
            ++boxes;
            Configuration c(box);
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << edges.size()); ++mask) {
                for (std::size_t e = 0; e < edges.size(); ++e) c.set(edges[e], (mask >> e) & 1);
                ++checked;
                violations += hasHorizontalCrossing(c, box, CrossingVariant::Standard) ==
                              hasDualCrossing(c, box, Direction::Vertical);
                violations += hasVerticalCrossing(c, box, CrossingVariant::Standard) ==
                              hasDualCrossing(c, box, Direction::Horizontal);
            }
        }
    const Region big = Region::rectangle(0, 32, 0, 32);
    const Estimate random = runSamples(
        100000, {777, 0}, true,
        [&](const RngSpec& s) -> std::uint64_t {
            const Configuration c = sampleConfiguration(big, 0.5, s);
            return (hasHorizontalCrossing(c, big, CrossingVariant::Standard) ==
                    hasDualCrossing(c, big, Direction::Vertical)) ||
                   (hasVerticalCrossing(c, big, CrossingVariant::Standard) ==
                    hasDualCrossing(c, big, Direction::Horizontal));
        },
        runOptions());
    Outcome o;
    o.pass = violations == 0 && random.sum == 0;
    o.detail = std::to_string(checked) + " exhaustive configurations on " + std::to_string(boxes) +
               " boxes with |E| <= 16, 10^5 random at n=32; violations " + std::to_string(violations) + " + " +
               std::to_string(random.sum);
    return o;
}

// ------------------------------------------------------------------ 3

Outcome selfDuality() {
    Outcome o{true, ""};
    for (int n : {4, 8, 16, 32}) {
        const Estimate e =
            estimateHC(n + 1, n, 0.5, CrossingVariant::Standard, 100000, subStream({31337, 0}, "self-dual", n), runOptions());
        const double z = zIndicator(e, 0.5);
        o.pass = o.pass && z <= 4.0;
        o.detail += (o.detail.empty() ? "" : ", ") + std::string("n=") + std::to_string(n) + ": " + fmt(e.mean(), 5) +
                    " (z=" + fmt(z, 3) + ")";
    }
    return o;
}

// ------------------------------------------------------------------ 4

Outcome theoremOne() {
    const auto rows = theoremOneExperiment(0.2, 2.0, {16, 32, 64, 128}, 0.5, 10000, {4242, 0}, runOptions());
    const double floor = std::max(0.05, rows.front().inside.mean() / 2.0);
    Outcome o{true, "floor " + fmt(floor)};
    for (const auto& r : rows) {
        o.pass = o.pass && r.inside.mean() >= floor;
        o.detail += "; n=" + std::to_string(r.n) + ": " + fmt(r.inside.mean()) + " [" + fmt(r.lower.mean()) + ", " +
                    fmt(r.upper.mean()) + "]";
    }
    return o;
}

// ------------------------------------------------------------------ 5

Outcome oneArmExponent() {
    const PiBoundsReport r = piBoundsCheck({8, 16, 32, 64, 128, 256}, 0.5, 100000, {5150, 0}, {}, runOptions());
    bool upper = false;
    std::string upperDetail;
    for (const auto& c : r.checks)
        if (c.name == "(i) upper") {
            upper = c.holds;
            upperDetail = c.detail;
        }
    Outcome o;
    o.pass = r.exponent > 0.0 && r.exponent <= 0.5 && upper;
    o.detail = "exponent " + fmt(r.exponent) + " over n=8..256 (10^5 samples); (i) upper " +
               (upper ? "holds" : "fails") + ": " + upperDetail;
    return o;
}

// ------------------------------------------------------------------ 6

Outcome yTail() {
    const YMomentReport r = yMomentCheck({8, 16, 32}, 0.5, 10000, {6060, 0}, 0.2, runOptions());
    Outcome o{r.tailHolds, "c=" + fmt(r.c)};
    for (const auto& row : r.rows) o.detail += "; m=" + std::to_string(row.m) + ": " + fmt(row.tail.mean());
    return o;
}

// ------------------------------------------------------------------ 7

Outcome steering() {
    const SteeringInstance demo = SteeringInstance::demo();
    const double exact = steeringOracle(demo);
    StreamRng rng({7070, 0});
    int ok = 0;
    double margin = 1.0;
    for (int trial = 0; trial < 100; ++trial) {
        const SteeringInstance inst = randomSteeringInstance(rng);
        const double p = steeringOracle(inst);
        ok += p >= inst.bound();
        margin = std::min(margin, p - inst.bound());
    }
    Outcome o;
    o.pass = ok == 100 && exact == 0.75 && demo.bound() == 0.25;
    o.detail = "demo " + fmt(exact) + " >= " + fmt(demo.bound()) + "; " + std::to_string(ok) +
               "/100 random instances satisfy the bound, smallest margin " + fmt(margin);
    return o;
}

// ------------------------------------------------------------------ 8

Outcome smallMax() {
    const SmallMaxReport r = smallMaxClusterCheck(0.3, {16, 32, 64}, 0.5, 10000, {8080, 0}, 0.1, runOptions());
    Outcome o{r.holds, ""};
    for (const auto& row : r.rows)
        o.detail += (o.detail.empty() ? "" : "; ") + std::string("n=") + std::to_string(row.n) + ": " +
                    fmt(row.below.mean()) + " +- " + fmt(row.below.standardError(), 2);
    return o;
}

// ------------------------------------------------------------------ 9

Outcome construction() {
    constexpr std::uint64_t N = 100000;
    std::vector<double> probabilities;
    std::uint64_t violations = 0, holding = 0;
    std::string detail;
    auto measure = [&](const PartitionSpec& spec, double p, std::uint64_t budget, const RngSpec& rng) {
        const int n = spec.m * spec.s;
        const Region W = Region::box(n);
        return runSamplesMulti(
            budget, rng, {true, true},
            [&](const RngSpec& s, std::span<std::uint64_t> out) {
                const Configuration c = sampleConfiguration(W, p, s);
                out[0] = eventO(c, spec, W).holds;
                out[1] = out[0] && !crossingClusterCheck(c, spec, n);
            },
            runOptions());
    };
    for (int s : {6, 9, 12}) {
        const PartitionSpec spec{3, s, s / 3};
        const auto e = measure(spec, 0.5, N, subStream({9090, 0}, "O", s));
        probabilities.push_back(e[0].mean());
        holding += e[0].sum;
        violations += e[1].sum;
        detail += (detail.empty() ? "" : ", ") + std::string("s=") + std::to_string(s) + ": " +
                  std::to_string(e[0].sum) + "/" + std::to_string(N);
    }
    // The implication is also exercised where O is common.
    std::uint64_t extraHolding = 0;
    for (int s : {6, 9, 12}) {
        const auto e = measure({3, s, s / 3}, 0.9, 2000, subStream({9090, 0}, "O-dense", s));
        extraHolding += e[0].sum;
        violations += e[1].sum;
    }
    const double lo = *std::min_element(probabilities.begin(), probabilities.end());
    const double hi = *std::max_element(probabilities.begin(), probabilities.end());
    Outcome o;
    o.pass = lo > 0.0 && hi <= 3.0 * lo && violations == 0;
    o.detail = "P(O) at p=1/2: " + detail + (lo > 0.0 ? "; max/min " + fmt(hi / lo) : "; not positive") +
               "; implication checked on " + std::to_string(holding) + " + " + std::to_string(extraHolding) +
               " (p=0.9) configurations, " + std::to_string(violations) + " violations";
    return o;
}

// ------------------------------------------------------------------ 10

std::string readAll(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome determinism(const std::string& cli) {
    if (cli.empty() || !std::filesystem::exists(cli)) return {false, "critperc executable not found (pass --cli)"};
    const auto root = std::filesystem::temp_directory_path() / ("critperc-acceptance-" + std::to_string(::getpid()));
    std::filesystem::remove_all(root);
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"pi", "pi --n 4,8,16 --samples 20000"},
        {"pi-sweep", "pi --n 8 --p 0.4,0.5,0.6 --method sweep --samples 2000"},
        {"hc", "hc --k 9 --l 8 --samples 20000"},
        {"length", "length --p 0.3,0.7 --nmax 16 --samples 2000"},
        {"mcluster", "mcluster --n 8,16 --samples 2000"},
        {"theorem1", "theorem1 --n 8,16 --samples 2000"},
        {"pibounds", "pibounds --n 4,8,16 --p 0.45 --samples 5000 --max-box 8"},
        {"ymoment", "ymoment --m 4,8 --samples 2000"},
        {"smallmax", "smallmax --n 8,16 --samples 2000"},
        {"steering", "steering --demo --samples 20000"},
        {"event-o", "event-o --m 3 --s 6 --t 2 --p 0.9 --samples 500"},
        {"choose-params", "choose-params --a 0.1 --b 10 --pi-model power:0.5"},
        {"enumerate", "enumerate --observable maxcluster --n 1"},
    };
    std::vector<std::string> differing;
    for (const auto& [name, args] : runs) {
        std::vector<std::string> outputs;
        for (const char* variant : {"a", "b"}) {
            const auto dir = root / variant;
            const std::string threadsArg = std::string(variant) == "a" ? "1" : "3";
            const std::string cmd = "\"" + cli + "\" " + args + " --seed 99 --threads " + threadsArg + " --out \"" +
                                    dir.string() + "\" --name " + name + " > /dev/null 2>&1";
            const int status = std::system(cmd.c_str());
            if (status != 0) {
                differing.push_back(name + " (exit status " + std::to_string(status) + ")");
                break;
            }
            outputs.push_back(readAll(dir / (name + ".csv")));
        }
        if (outputs.size() == 2 && (outputs[0] != outputs[1] || outputs[0].empty())) differing.push_back(name);
    }
    std::filesystem::remove_all(root);
    Outcome o;
    o.pass = differing.empty();
    o.detail = std::to_string(runs.size()) + " experiments run twice (1 and 3 threads)";
    if (differing.empty())
        o.detail += ", all CSV byte-identical";
    else
        for (const auto& d : differing) o.detail += "; differs: " + d;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    std::set<int> only;
    for (int k = 1; k < argc; ++k) {
        const std::string arg = argv[k];
        if (arg == "--cli" && k + 1 < argc) {
            cli = argv[++k];
        } else if (arg == "--only" && k + 1 < argc) {
            std::istringstream in(argv[++k]);
            std::string item;
            while (std::getline(in, item, ',')) only.insert(std::stoi(item));
        } else {
            std::cerr << "usage: critperc_acceptance --cli <critperc> [--only 1,2,...]\n";
            return 2;
        }
    }

    struct Criterion {
        int id;
        std::string title;
        double limitSeconds;  // 0 = no stated limit
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "oracle equivalence", 120, oracleEquivalence},
        {2, "duality exactness", 60, dualityExactness},
        {3, "self-duality HC(n+1,n)", 300, selfDuality},
        {4, "M_n interval event", 1800, theoremOne},
        {5, "one-arm exponent", 0, oneArmExponent},
        {6, "Y(m) tail stability", 0, yTail},
        {7, "steering lemma", 60, steering},
        {8, "small max cluster", 0, smallMax},
        {9, "construction pipeline", 0, construction},
        {10, "determinism", 0, [&] { return determinism(cli); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limitSeconds > 0 && seconds >= c.limitSeconds) {
            o.pass = false;
            o.detail += "; over the " + fmt(c.limitSeconds) + " s limit";
        }
        failures += !o.pass;
        std::printf("criterion %2d %s  %s: %s (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title.c_str(),
                    o.detail.c_str(), seconds);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
