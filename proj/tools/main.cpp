#include <bit>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "critperc/clusters.hpp"
#include "critperc/estimators.hpp"
#include "critperc/events.hpp"
#include "critperc/exact.hpp"
#include "critperc/geometry.hpp"
#include "harness.hpp"

using namespace critperc;
using namespace critperc::cli;

namespace {

struct Common {
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    unsigned threads = 0;
    std::uint64_t chunk = 1'000'000;
    std::string out;
    std::string name;
    std::string config;
    std::string checkpoint;
    std::string raw;
};

// Options that only affect where results go or how fast they arrive.
const std::vector<std::string> kNonResultOptions = {"config", "out", "name", "checkpoint", "raw", "threads", "chunk",
                                                    "witness"};

struct Run {
    std::string experiment;
    Common common;
    std::vector<CsvRow> rows;
    std::unique_ptr<FileCheckpoint> sink;
    std::vector<std::uint64_t> raw;
    bool rawTaken = false;
    std::string insufficient;

    RngSpec rng() const { return {common.seed, common.stream}; }

    RunOptions options(const std::string& key, bool rawStream = false) {
        RunOptions o;
        o.threads = common.threads;
        o.chunk = common.chunk;
        o.checkpoint = sink.get();
        o.checkpointKey = experiment + "/" + key;
        if (rawStream && !common.raw.empty()) {
            if (rawTaken) throw ConfigError("--raw needs a run with a single estimate");
            rawTaken = true;
            o.raw = &raw;
        }
        return o;
    }

    void add(std::int64_t n, double p, const std::string& variant, const Estimate& e) {
        rows.push_back(estimateRow(experiment, n, p, variant, e));
    }
    void addValue(std::int64_t n, double p, const std::string& variant, double value, std::uint64_t samples = 0) {
        rows.push_back({experiment, n, p, variant, samples, value, 0.0, common.seed, common.stream});
    }
};

std::int64_t pKey(double p) { return std::bit_cast<std::int64_t>(p); }

std::string key(const std::string& name, double v) {
    std::ostringstream os;
    os << name << '=' << v;
    return os.str();
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

void requireP(const std::vector<double>& ps) {
    require(!ps.empty(), "p list is empty");
    for (double p : ps) require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
}

void requireSizes(const std::vector<int>& ns, int minimum, const std::string& what) {
    require(!ns.empty(), what + " list is empty");
    for (int n : ns) require(n >= minimum, what + " values must be >= " + std::to_string(minimum));
}

void requireIncreasing(const std::vector<int>& ns, const std::string& what) {
    for (std::size_t k = 1; k < ns.size(); ++k) require(ns[k - 1] < ns[k], what + " list must be strictly increasing");
}

std::string show(const Estimate& e) {
    std::ostringstream os;
    os.precision(6);
    os << e.mean() << " +- " << e.standardError() << " (" << e.samples << " samples)";
    return os.str();
}

bool originReachesBoundary(const Configuration& c, int n) {
    if (n == 0) return true;
    const Region box = Region::box(n);
    const ClusterLabeling l(c, box);
    const auto id = l.label({0, 0});
    for (auto v : box.boundary().sites())
        if (l.label(v) == id) return true;
    return false;
}

void requireFewEdges(const Region& window) {
    require(window.edges().size() <= EnumerationTask::kMaxVariableEdges,
            "exact mode enumerates at most " + std::to_string(EnumerationTask::kMaxVariableEdges) + " edges; " +
                window.describe() + " has " + std::to_string(window.edges().size()));
}

std::uint64_t configurations(const Region& window) { return std::uint64_t{1} << window.edges().size(); }

// ---------------------------------------------------------------- pi

struct PiArgs {
    std::vector<int> n{8};
    std::vector<double> p{0.5};
    std::uint64_t samples = 100000;
    bool exact = false;
    std::string method = "direct";
};

void validatePi(const PiArgs& a) {
    requireSizes(a.n, 0, "n");
    requireP(a.p);
    require(a.samples > 0, "samples must be positive");
    if (a.exact)
        for (int n : a.n) requireFewEdges(Region::box(n));
}

int runPi(Run& run, const PiArgs& a) {
    if (a.exact) {
        for (double p : a.p)
            for (int n : a.n) {
                const Region box = Region::box(n);
                ExactValue v{1.0L, Rational(1)};
                if (n > 0)
                    v = enumerateProbability(EnumerationTask::allEdges(box, p),
                                             [n](const Configuration& c) { return originReachesBoundary(c, n); });
                std::cout << "pi(" << n << ") = " << v.toString() << "  [exact, p=" << p << "]\n";
                run.addValue(n, p, "exact", v.toDouble(), n > 0 ? configurations(box) : 1);
            }
        return 0;
    }
    for (int n : a.n) {
        if (a.method == "sweep") {
            const RngSpec rng = subStream(run.rng(), "pi-sweep", n);
            const SweepCurve curve = newmanZiffSweep(SweepObservable::OneArm, n, 0, a.p, a.samples, rng);
            for (std::size_t q = 0; q < a.p.size(); ++q) {
                run.rows.push_back({run.experiment, n, a.p[q], "sweep", curve.sweeps, curve.mean[q],
                                    curve.standardError[q], rng.seed, rng.stream});
                std::cout << "pi(" << n << ") at p=" << a.p[q] << ": " << curve.mean[q] << " +- "
                          << curve.standardError[q] << " (Newman-Ziff, " << curve.sweeps << " sweeps)\n";
            }
            continue;
        }
        for (double p : a.p) {
            const Estimate e = estimatePi(n, p, a.samples, subStream(run.rng(), "pi", n, pKey(p)),
                                          run.options(key("n", n) + "/" + key("p", p), a.n.size() * a.p.size() == 1));
            run.add(n, p, "direct", e);
            std::cout << "pi(" << n << ") at p=" << p << ": " << show(e) << "\n";
        }
    }
    return 0;
}

// ---------------------------------------------------------------- hc

struct HcArgs {
    int k = 9;
    int l = 8;
    std::vector<double> p{0.5};
    std::string variant = "standard";
    std::uint64_t samples = 100000;
    bool exact = false;
    std::string method = "direct";
};

CrossingVariant parseVariant(const std::string& v) { return v == "strict" ? CrossingVariant::Strict : CrossingVariant::Standard; }

void validateHc(const HcArgs& a) {
    require(a.k >= 1 && a.l >= 1, "HC(k, l) needs k, l >= 1");
    requireP(a.p);
    require(a.samples > 0, "samples must be positive");
    if (a.exact) requireFewEdges(Region::rectangle(0, a.k, 0, a.l));
    require(!(a.method == "sweep" && a.variant == "strict"), "the sweep method supports the standard variant only");
}

int runHc(Run& run, const HcArgs& a) {
    const CrossingVariant variant = parseVariant(a.variant);
    const Region box = Region::rectangle(0, a.k, 0, a.l);
    const std::string label = "HC(" + std::to_string(a.k) + "," + std::to_string(a.l) + ")";
    if (a.method == "sweep" && !a.exact) {
        const RngSpec rng = subStream(run.rng(), "hc-sweep", a.k, a.l);
        const SweepCurve curve = newmanZiffSweep(SweepObservable::HorizontalCrossing, a.k, a.l, a.p, a.samples, rng);
        for (std::size_t q = 0; q < a.p.size(); ++q) {
            run.rows.push_back({run.experiment, a.k, a.p[q], a.variant + "-sweep", curve.sweeps, curve.mean[q],
                                curve.standardError[q], rng.seed, rng.stream});
            std::cout << label << " at p=" << a.p[q] << ": " << curve.mean[q] << " +- " << curve.standardError[q]
                      << " (Newman-Ziff)\n";
        }
        return 0;
    }
    for (double p : a.p) {
        if (a.exact) {
            const ExactValue v = enumerateProbability(EnumerationTask::allEdges(box, p), [&](const Configuration& c) {
                return hasHorizontalCrossing(c, box, variant);
            });
            std::cout << label << " = " << v.toString() << "  [exact, " << a.variant << ", p=" << p << "]\n";
            run.addValue(a.k, p, a.variant + "-exact", v.toDouble(), configurations(box));
            continue;
        }
        const Estimate e = estimateHC(a.k, a.l, p, variant, a.samples, subStream(run.rng(), "hc", a.k * 100003 + a.l, pKey(p)),
                                      run.options(key("p", p), a.p.size() == 1));
        run.add(a.k, p, a.variant, e);
        std::cout << label << " at p=" << p << " (" << a.variant << "): " << show(e) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- length

struct LengthArgs {
    std::vector<double> p{0.45};
    double eps = 0.25;
    int nMax = 64;
    std::uint64_t samples = 10000;
};

void validateLength(const LengthArgs& a) {
    requireP(a.p);
    for (double p : a.p) require(p > 0.0 && p < 1.0, "p must lie in (0, 1)");
    require(a.eps > 0.0 && a.eps < 0.5, "eps must lie in (0, 1/2)");
    require(a.nMax >= 1, "nmax must be >= 1");
    require(a.samples > 0, "samples must be positive");
}

int runLength(Run& run, const LengthArgs& a) {
    for (double p : a.p) {
        const LengthResult r = estimateCharacteristicLength(p, a.eps, a.nMax, a.samples,
                                                            subStream(run.rng(), "length", pKey(p)),
                                                            run.options(key("p", p)));
        for (std::size_t k = 0; k < r.trace.size(); ++k)
            run.add(static_cast<std::int64_t>(k + 1), p, p <= 0.5 ? "crossing" : "dual-crossing", r.trace[k]);
        run.addValue(r.length.value_or(a.nMax), p, r.length ? "L" : "L>=", r.length.value_or(a.nMax));
        std::cout << "L(" << p << ") with eps=" << a.eps << ": " << r.toString()
                  << (r.unresolved ? "  (some n within 3 stderr of eps)" : "") << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- mcluster

struct MclusterArgs {
    std::vector<int> n{16};
    double p = 0.5;
    std::uint64_t samples = 10000;
    bool exact = false;
};

void validateMcluster(const MclusterArgs& a) {
    requireSizes(a.n, 1, "n");
    requireP({a.p});
    require(a.samples > 0, "samples must be positive");
    if (a.exact)
        for (int n : a.n) requireFewEdges(Region::box(n));
}

int runMcluster(Run& run, const MclusterArgs& a) {
    for (int n : a.n) {
        const Region box = Region::box(n);
        if (a.exact) {
            const auto task = EnumerationTask::allEdges(box, a.p);
            auto size = [&](const Configuration& c) {
                return static_cast<std::int64_t>(maxClusterSize(ClusterLabeling(c, box)));
            };
            const ExactValue mean = enumerateExpectation(task, size);
            std::cout << "E[M_" << n << "] = " << mean.toString() << "  [exact, p=" << a.p << "]\n";
            run.addValue(n, a.p, "mean-exact", mean.toDouble(), configurations(box));
            for (const auto& [value, prob] : enumerateDistribution(task, size)) {
                std::cout << "  P(M_" << n << " = " << value << ") = " << prob.toString() << "\n";
                run.addValue(n, a.p, "eq" + std::to_string(value), prob.toDouble(), configurations(box));
            }
            continue;
        }
        const Estimate e = runSamples(
            a.samples, subStream(run.rng(), "mcluster", n, pKey(a.p)), false,
            [&](const RngSpec& s) -> std::uint64_t {
                return maxClusterSize(ClusterLabeling(sampleConfiguration(box, a.p, s), box));
            },
            run.options(key("n", n), a.n.size() == 1));
        run.add(n, a.p, "mean", e);
        std::cout << "E[M_" << n << "] at p=" << a.p << ": " << show(e) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- theorem1

struct TheoremOneArgs {
    double a = 0.2;
    double b = 2.0;
    std::vector<int> n{16, 32, 64, 128};
    double p = 0.5;
    std::uint64_t samples = 10000;
};

void validateTheoremOne(const TheoremOneArgs& a) {
    require(a.a > 0.0, "a must be positive");
    require(a.a < a.b, "a must be smaller than b");
    requireSizes(a.n, 1, "n");
    requireP({a.p});
    require(a.samples > 0, "samples must be positive");
}

int runTheoremOne(Run& run, const TheoremOneArgs& a) {
    const auto rows = theoremOneExperiment(a.a, a.b, a.n, a.p, a.samples, run.rng(), run.options("rows"));
    for (const auto& r : rows) {
        run.add(r.n, a.p, "pi", r.pi);
        run.add(r.n, a.p, "inside", r.inside);
        run.add(r.n, a.p, "inside-lower", r.lower);
        run.add(r.n, a.p, "inside-upper", r.upper);
        std::cout << "n=" << r.n << "  pi=" << show(r.pi) << "\n      P(M_n in (a n^2 pi, b n^2 pi)) = " << show(r.inside)
                  << "  [pi-2se: " << r.lower.mean() << ", pi+2se: " << r.upper.mean() << "]\n";
        if (r.pi.sum == 0) run.insufficient = "pi(" + std::to_string(r.n) + ") has no successes";
    }
    return 0;
}

// ---------------------------------------------------------------- pibounds

struct PiBoundsArgs {
    std::vector<int> n{8, 16, 32, 64, 128, 256};
    double p = 0.5;
    std::uint64_t samples = 100000;
    int maxBox = 32;
    double ratioBand = 2.0;
};

void validatePiBounds(const PiBoundsArgs& a) {
    requireSizes(a.n, 1, "n");
    require(a.n.size() >= 2, "n list needs at least two entries");
    requireIncreasing(a.n, "n");
    requireP({a.p});
    require(a.samples > 0, "samples must be positive");
    require(a.maxBox >= 1, "max-box must be >= 1");
    require(a.ratioBand >= 1.0, "ratio-band must be >= 1");
}

int runPiBounds(Run& run, const PiBoundsArgs& a) {
    const PiBoundsReport r = piBoundsCheck(a.n, a.p, a.samples, run.rng(), {a.maxBox, a.ratioBand}, run.options("pi"));
    for (std::size_t k = 0; k < r.ns.size(); ++k) {
        run.add(r.ns[k], a.p, "pi", r.pi[k]);
        if (r.pi[k].sum == 0) run.insufficient = "pi(" + std::to_string(r.ns[k]) + ") has no successes";
    }
    run.addValue(0, a.p, "exponent", r.exponent, a.samples);
    std::cout << "fitted one-arm exponent: " << r.exponent << "\n";
    for (const auto& c : r.checks) {
        run.addValue(0, a.p, c.name, c.holds ? 1.0 : 0.0, a.samples);
        std::cout << (c.holds ? "holds " : "FAILS ") << c.name << ": " << c.detail << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- ymoment

struct YMomentArgs {
    std::vector<int> m{8, 16, 32};
    double p = 0.5;
    std::uint64_t samples = 10000;
    double floor = 0.2;
};

void validateYMoment(const YMomentArgs& a) {
    requireSizes(a.m, 1, "m");
    requireIncreasing(a.m, "m");
    requireP({a.p});
    require(a.samples > 0, "samples must be positive");
    require(a.floor > 0.0 && a.floor < 1.0, "floor must lie in (0, 1)");
}

int runYMoment(Run& run, const YMomentArgs& a) {
    const YMomentReport r = yMomentCheck(a.m, a.p, a.samples, run.rng(), a.floor, run.options("y"));
    std::cout << "fitted c = " << r.c << " at m=" << a.m.front() << "\n";
    for (const auto& row : r.rows) {
        run.add(row.m, a.p, "pi", row.pi);
        run.add(row.m, a.p, "Y", row.y);
        run.addValue(row.m, a.p, "Y2", row.y.secondMoment(), row.y.samples);
        run.add(row.m, a.p, "tail", row.tail);
        run.add(row.m, a.p, "half-mean", row.halfMean);
        run.addValue(row.m, a.p, "chebyshev", row.chebyshev, row.y.samples);
        std::cout << "m=" << row.m << "  E[Y]=" << row.y.mean() << "  P(Y >= c m^2 pi)=" << show(row.tail)
                  << "  P(Y >= E/2)=" << row.halfMean.mean() << " vs " << row.chebyshev << "\n";
        if (row.pi.sum == 0) run.insufficient = "pi(" + std::to_string(row.m) + ") has no successes";
    }
    std::cout << "tail >= " << a.floor << ": " << (r.tailHolds ? "holds" : "FAILS")
              << "; Chebyshev consistency: " << (r.chebyshevHolds ? "holds" : "FAILS") << "\n";
    return 0;
}

// ---------------------------------------------------------------- smallmax

struct SmallMaxArgs {
    double K = 0.3;
    std::vector<int> n{16, 32, 64};
    double p = 0.5;
    std::uint64_t samples = 10000;
    double floor = 0.1;
};

void validateSmallMax(const SmallMaxArgs& a) {
    require(a.K > 0.0, "K must be positive");
    requireSizes(a.n, 1, "n");
    requireP({a.p});
    require(a.samples > 0, "samples must be positive");
    require(a.floor > 0.0 && a.floor < 1.0, "floor must lie in (0, 1)");
}

int runSmallMax(Run& run, const SmallMaxArgs& a) {
    const SmallMaxReport r = smallMaxClusterCheck(a.K, a.n, a.p, a.samples, run.rng(), a.floor, run.options("rows"));
    for (const auto& row : r.rows) {
        run.add(row.n, a.p, "pi", row.pi);
        run.add(row.n, a.p, "below", row.below);
        std::cout << "n=" << row.n << "  P(M_n < K n^2 pi) = " << show(row.below) << "\n";
        if (row.pi.sum == 0) run.insufficient = "pi(" + std::to_string(row.n) + ") has no successes";
    }
    std::cout << "min >= " << a.floor << ": " << (r.holds ? "holds" : "FAILS") << "\n";
    return 0;
}

// ---------------------------------------------------------------- steering

struct SteeringArgs {
    bool demo = false;
    int random = 0;
    int k = 2;
    double alpha = 1.0;
    double beta = 3.0;
    double eta1 = 0.5;
    double eta2 = 0.5;
    std::vector<std::string> law;
    std::uint64_t samples = 100000;
};

DiscreteLaw parseLaw(const std::string& text) {
    DiscreteLaw law;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) {
        const auto colon = item.find(':');
        require(colon != std::string::npos, "law entries are value:probability, got '" + item + "'");
        try {
            law.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse law entry '" + item + "'");
        }
    }
    return law;
}

SteeringInstance steeringInstance(const SteeringArgs& a) {
    if (a.demo) return SteeringInstance::demo();
    SteeringInstance inst{a.k, a.alpha, a.beta, {}, a.eta1, a.eta2};
    for (const auto& l : a.law) inst.laws.push_back(parseLaw(l));
    return inst;
}

void validateSteering(const SteeringArgs& a) {
    require(a.samples > 0, "samples must be positive");
    require(a.random >= 0, "random must be non-negative");
    if (a.random > 0) return;
    require(a.demo || !a.law.empty(), "give --demo, --random N, or one --law per X_i");
    steeringInstance(a).validate();
}

int runSteering(Run& run, const SteeringArgs& a) {
    if (a.random > 0) {
        StreamRng rng(subStream(run.rng(), "steering-random"));
        int satisfied = 0;
        double worst = 1.0;
        for (int trial = 0; trial < a.random; ++trial) {
            const SteeringInstance inst = randomSteeringInstance(rng);
            const double exact = steeringOracle(inst);
            satisfied += exact >= inst.bound();
            worst = std::min(worst, exact - inst.bound());
        }
        run.addValue(a.random, 0.0, "bound-holds", static_cast<double>(satisfied) / a.random, a.random);
        run.addValue(a.random, 0.0, "min-margin", worst, a.random);
        std::cout << satisfied << " of " << a.random << " random instances satisfy P >= (eta1 ^ eta2)^k"
                  << "; smallest margin " << worst << "\n";
        return 0;
    }
    const SteeringInstance inst = steeringInstance(a);
    const double exact = steeringOracle(inst);
    const Estimate sim = steeringSimulate(inst, a.samples, subStream(run.rng(), "steering"), run.options("simulate", true));
    run.addValue(inst.k, 0.0, "exact", exact);
    run.addValue(inst.k, 0.0, "bound", inst.bound());
    run.add(inst.k, 0.0, "simulated", sim);
    std::cout << "exact P(sum in (alpha, beta)) = " << dyadicFraction(exact) << "\n"
              << "bound (eta1 ^ eta2)^k = " << dyadicFraction(inst.bound()) << "\n"
              << "simulated: " << show(sim) << "\n";
    return 0;
}

// ---------------------------------------------------------------- event-o

struct EventOArgs {
    int m = 3;
    int s = 9;
    int t = 3;
    int inverseX = 0;
    double eps = 0.0;
    int n = 0;
    double p = 0.5;
    std::uint64_t samples = 10000;
    std::string witness;
    std::uint64_t niceness = 0;
};

PartitionSpec eventSpec(const EventOArgs& a) {
    if (a.inverseX == 0 && a.eps == 0.0) return {a.m, a.s, a.t};
    require(a.inverseX >= 3 && a.inverseX % 2 == 1, "inverse-x must be an odd integer >= 3");
    require(a.eps > 0.0 && a.eps < 1.0 / 12.0, "eps must lie in (0, 1/12) for the construction");
    require(a.n >= 1, "n is required with inverse-x and eps");
    ParameterChoice choice;
    choice.inverseX = a.inverseX;
    choice.epsilon = a.eps;
    return choice.partitionFor(a.n);
}

void validateEventO(const EventOArgs& a) {
    const PartitionSpec spec = eventSpec(a);
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    require(a.n == 0 || a.n >= spec.m * spec.s, "n must be at least m*s");
    requireP({a.p});
    require(a.samples > 0, "samples must be positive");
}

int runEventO(Run& run, const EventOArgs& a) {
    const PartitionSpec spec = eventSpec(a);
    const int n = a.n == 0 ? spec.m * spec.s : a.n;
    const Region window = Region::box(n);
    const Region W = Region::box(spec.m * spec.s);
    std::cout << "O^{" << spec.m << "," << spec.s << "," << spec.t << "} on " << W.describe() << ", clusters in "
              << window.describe() << "\n";
    const RngSpec rng = subStream(run.rng(), "event-o", n);
    const auto est = runSamplesMulti(
        a.samples, rng, {true, true},
        [&](const RngSpec& s, std::span<std::uint64_t> out) {
            const Configuration c = sampleConfiguration(window, a.p, s);
            out[0] = eventO(c, spec, W).holds;
            out[1] = out[0] && !crossingClusterCheck(c, spec, n);
        },
        run.options("O"));
    run.add(n, a.p, "O", est[0]);
    run.add(n, a.p, "implication-violations", est[1]);
    std::cout << "P(O) = " << show(est[0]) << "\ncrossing-cluster violations: " << est[1].sum << "\n";

    if (!a.witness.empty()) {
        const std::uint64_t scan = std::min<std::uint64_t>(a.samples, 1000);
        EventReport report = eventO(sampleConfiguration(window, a.p, rng), spec, W);
        for (std::uint64_t k = 1; k < scan && !report.holds; ++k)
            report = eventO(sampleConfiguration(window, a.p, rng.offset(k)), spec, W);
        writeFileAtomically(a.witness, toJson(report, true) + "\n");
        std::cout << "witness written to " << a.witness << (report.holds ? "" : " (O fails; report shows why)") << "\n";
    }

    if (a.niceness > 0) {
        const CellRegions cell = cellRegions(spec, 0, 0);
        const Circuit gamma = eventO(Configuration(cell.box, EdgeState::Open), spec, cell.box).circuits.at(0).circuit;
        const PartialSampler sampler{Configuration(cell.box), {}, a.p};
        const ConditionalEstimate nice =
            nicenessExpectation(gamma, spec, 0, 0, sampler, a.niceness, subStream(run.rng(), "niceness"), run.common.threads);
        run.add(n, a.p, "niceness", nice.estimate);
        std::cout << "E[C~(A') | O_00, gamma = outer rim] = " << show(nice.estimate) << " from " << nice.attempts
                  << " attempts\n";
        if (nice.insufficientSupport())
            run.insufficient = "niceness: " + std::to_string(nice.estimate.samples) + " accepted samples, need " +
                               std::to_string(ConditionalEstimate::kMinimumSupport);
    }
    return 0;
}

// ---------------------------------------------------------------- choose-params

struct ChooseArgs {
    double a = 0.1;
    double b = 10.0;
    std::string piModel = "power:0.5";
    double c10 = 1.0, c15 = 1.0, c17 = 1.0, c18 = 1.0;
    int nFirst = 1;
    int nLast = 100000;
};

void validateChoose(const ChooseArgs& a) {
    require(a.a > 0.0 && a.a < a.b, "need 0 < a < b");
    require(a.nFirst >= 1 && a.nFirst <= a.nLast, "need 1 <= n-first <= n-last");
    try {
        ConstantsConfig{a.c10, a.c15, a.c17, a.c18}.validate();
        const PiModel model = PiModel::parse(a.piModel);
        require(model.exponent() < 1.0, "pi model exponent must be < 1");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

int runChoose(Run& run, const ChooseArgs& a) {
    const ParameterSearch r = chooseParameters(a.a, a.b, {a.c10, a.c15, a.c17, a.c18}, PiModel::parse(a.piModel),
                                               {a.nFirst, a.nLast});
    std::cout << r.report << "\n";
    if (r.choice) {
        run.addValue(r.choice->N, 0.0, "x", r.choice->x());
        run.addValue(r.choice->N, 0.0, "epsilon", r.choice->epsilon);
        run.addValue(r.choice->N, 0.0, "N", r.choice->N);
        std::cout << "x = 1/" << r.choice->inverseX << ", eps = " << r.choice->epsilon << ", N = " << r.choice->N << "\n";
    } else {
        run.addValue(0, 0.0, "infeasible", 1.0);
    }
    return 0;
}

// ---------------------------------------------------------------- enumerate

struct EnumerateArgs {
    std::string observable = "pi";
    int n = 1;
    int k = 1;
    int l = 1;
    double p = 0.5;
    std::string variant = "strict";
    double a = 1.5;
    double b = 4.5;
    double piHat = 1.0;
};

Region enumerationWindow(const EnumerateArgs& a) {
    return a.observable == "hc" ? Region::rectangle(0, a.k, 0, a.l) : Region::box(a.n);
}

void validateEnumerate(const EnumerateArgs& a) {
    requireP({a.p});
    require(a.n >= 1 && a.k >= 1 && a.l >= 1, "n, k, l must be >= 1");
    require(a.observable != "event-d" || (a.a < a.b && a.piHat > 0.0), "event-d needs a < b and pihat > 0");
    requireFewEdges(enumerationWindow(a));
}

int runEnumerate(Run& run, const EnumerateArgs& a) {
    const Region window = enumerationWindow(a);
    const auto task = EnumerationTask::allEdges(window, a.p);
    const int n = a.n;
    auto report = [&](const std::string& label, std::int64_t rowN, const ExactValue& v) {
        std::cout << label << " = " << v.toString() << "\n";
        run.addValue(rowN, a.p, a.observable, v.toDouble(), configurations(window));
    };
    if (a.observable == "pi") {
        report("pi(" + std::to_string(n) + ")", n,
               enumerateProbability(task, [n](const Configuration& c) { return originReachesBoundary(c, n); }));
    } else if (a.observable == "hc") {
        const CrossingVariant variant = parseVariant(a.variant);
        report("HC(" + std::to_string(a.k) + "," + std::to_string(a.l) + ") " + a.variant, a.k,
               enumerateProbability(task, [&](const Configuration& c) { return hasHorizontalCrossing(c, window, variant); }));
    } else if (a.observable == "maxcluster") {
        for (const auto& [value, prob] : enumerateDistribution(task, [&](const Configuration& c) {
                 return static_cast<std::int64_t>(maxClusterSize(ClusterLabeling(c, window)));
             })) {
            std::cout << "P(M_" << n << " = " << value << ") = " << prob.toString() << "\n";
            run.rows.push_back({run.experiment, value, a.p, "maxcluster", configurations(window), prob.toDouble(), 0.0,
                                run.common.seed, run.common.stream});
        }
    } else if (a.observable == "ctilde") {
        report("E[C~(Lambda_" + std::to_string(n) + ")]", n, enumerateExpectation(task, [&](const Configuration& c) {
                   return static_cast<std::int64_t>(boundaryTouchCount(c, window));
               }));
    } else {
        report("P(D_" + std::to_string(n) + ")", n, enumerateProbability(task, [&](const Configuration& c) {
                   return eventD(ClusterLabeling(c, window), n, a.a, a.b, a.piHat);
               }));
    }
    return 0;
}

// ---------------------------------------------------------------- driver

void addCommon(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "Base seed")->capture_default_str();
    sub->add_option("--stream", c.stream, "First stream of the run")->capture_default_str();
    sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
    sub->add_option("--chunk", c.chunk, "Samples per checkpoint")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "Output directory (default $CRITPERC_OUTPUT_DIR or ./results)");
    sub->add_option("--name", c.name, "Basename of the CSV and manifest (default: the subcommand)");
    sub->add_option("--config", c.config, "Flat key = value file or a manifest to replay");
    sub->add_option("--checkpoint", c.checkpoint, "Resume and persist accumulators in this file");
    sub->add_option("--raw", c.raw, "Dump per-sample values, one integer per line");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo and exact experiments for critical bond percolation on Z^2"};
    app.require_subcommand(1);
    app.set_version_flag("--version", CRITPERC_VERSION);
    app.option_defaults()->always_capture_default();

    Common common;
    std::map<std::string, std::pair<std::function<void()>, std::function<int(Run&)>>> commands;
    auto command = [&](const std::string& name, const std::string& help, auto& args, auto validate, auto run) {
        CLI::App* sub = app.add_subcommand(name, help);
        addCommon(sub, common);
        commands[name] = {[&args, validate] { validate(args); }, [&args, run](Run& r) { return run(r, args); }};
        return sub;
    };

    PiArgs pi;
    auto* piCmd = command("pi", "One-arm probability pi(n)", pi, validatePi, runPi);
    piCmd->add_option("--n", pi.n, "Box half-widths")->delimiter(',');
    piCmd->add_option("--p", pi.p, "Edge probabilities")->delimiter(',');
    piCmd->add_option("--samples", pi.samples, "Samples (sweeps for --method sweep)");
    piCmd->add_flag("--exact", pi.exact, "Exact enumeration (n <= 1)");
    piCmd->add_option("--method", pi.method, "direct or sweep")->check(CLI::IsMember({"direct", "sweep"}));

    HcArgs hc;
    auto* hcCmd = command("hc", "Horizontal crossing probability of [0,k] x [0,l]", hc, validateHc, runHc);
    hcCmd->add_option("--k", hc.k, "Width");
    hcCmd->add_option("--l", hc.l, "Height");
    hcCmd->add_option("--p", hc.p, "Edge probabilities")->delimiter(',');
    hcCmd->add_option("--variant", hc.variant, "standard or strict")->check(CLI::IsMember({"standard", "strict"}));
    hcCmd->add_option("--samples", hc.samples, "Samples (sweeps for --method sweep)");
    hcCmd->add_flag("--exact", hc.exact, "Exact enumeration (at most 24 edges)");
    hcCmd->add_option("--method", hc.method, "direct or sweep")->check(CLI::IsMember({"direct", "sweep"}));

    LengthArgs length;
    auto* lengthCmd = command("length", "Characteristic length L(p)", length, validateLength, runLength);
    lengthCmd->add_option("--p", length.p, "Edge probabilities")->delimiter(',');
    lengthCmd->add_option("--eps", length.eps, "Crossing threshold, 0 < eps < 1/2");
    lengthCmd->add_option("--nmax", length.nMax, "Largest box tried");
    lengthCmd->add_option("--samples", length.samples, "Samples per box size");

    MclusterArgs mcluster;
    auto* mclusterCmd = command("mcluster", "Largest cluster M_n in Lambda_n", mcluster, validateMcluster, runMcluster);
    mclusterCmd->add_option("--n", mcluster.n, "Box half-widths")->delimiter(',');
    mclusterCmd->add_option("--p", mcluster.p, "Edge probability");
    mclusterCmd->add_option("--samples", mcluster.samples, "Samples per n");
    mclusterCmd->add_flag("--exact", mcluster.exact, "Exact distribution (n <= 1)");

    TheoremOneArgs t1;
    auto* t1Cmd = command("theorem1", "P(M_n in (a n^2 pi(n), b n^2 pi(n)))", t1, validateTheoremOne, runTheoremOne);
    t1Cmd->add_option("--a", t1.a, "Lower factor");
    t1Cmd->add_option("--b", t1.b, "Upper factor");
    t1Cmd->add_option("--n", t1.n, "Box half-widths")->delimiter(',');
    t1Cmd->add_option("--p", t1.p, "Edge probability");
    t1Cmd->add_option("--samples", t1.samples, "Samples per n and purpose");

    PiBoundsArgs pib;
    auto* pibCmd = command("pibounds", "Fitted checks of the pi(n) bounds", pib, validatePiBounds, runPiBounds);
    pibCmd->add_option("--n", pib.n, "Increasing box half-widths")->delimiter(',');
    pibCmd->add_option("--p", pib.p, "Edge probability");
    pibCmd->add_option("--samples", pib.samples, "Samples");
    pibCmd->add_option("--max-box", pib.maxBox, "Largest n for the C~ bound");
    pibCmd->add_option("--ratio-band", pib.ratioBand, "Band factor for pi_p/pi");

    YMomentArgs ym;
    auto* ymCmd = command("ymoment", "Tail and moments of Y(m)", ym, validateYMoment, runYMoment);
    ymCmd->add_option("--m", ym.m, "Increasing m values")->delimiter(',');
    ymCmd->add_option("--p", ym.p, "Edge probability");
    ymCmd->add_option("--samples", ym.samples, "Samples per m");
    ymCmd->add_option("--floor", ym.floor, "Required tail level");

    SmallMaxArgs sm;
    auto* smCmd = command("smallmax", "P(M_n < K n^2 pi(n))", sm, validateSmallMax, runSmallMax);
    smCmd->add_option("--K", sm.K, "Factor K");
    smCmd->add_option("--n", sm.n, "Box half-widths")->delimiter(',');
    smCmd->add_option("--p", sm.p, "Edge probability");
    smCmd->add_option("--samples", sm.samples, "Samples per n");
    smCmd->add_option("--floor", sm.floor, "Required level");

    SteeringArgs st;
    auto* stCmd = command("steering", "Sum of independent variables landing in (alpha, beta)", st, validateSteering, runSteering);
    stCmd->add_flag("--demo", st.demo, "k=2, alpha=1, beta=3, X_i uniform on {0.4, 0.7}");
    stCmd->add_option("--random", st.random, "Check N random hypothesis-satisfying instances");
    stCmd->add_option("--k", st.k, "Number of variables");
    stCmd->add_option("--alpha", st.alpha, "Interval start");
    stCmd->add_option("--beta", st.beta, "Interval end");
    stCmd->add_option("--eta1", st.eta1, "Mass in (alpha/k, (beta-alpha)/2)");
    stCmd->add_option("--eta2", st.eta2, "Mass at or below (beta-alpha)/(2k)");
    stCmd->add_option("--law", st.law, "One per X_i: value:prob;value:prob");
    stCmd->add_option("--samples", st.samples, "Simulation samples");

    EventOArgs eo;
    auto* eoCmd = command("event-o", "Probability of the construction event O^{m,s,t}", eo, validateEventO, runEventO);
    eoCmd->add_option("--m", eo.m, "Odd grid size");
    eoCmd->add_option("--s", eo.s, "Cell half-width");
    eoCmd->add_option("--t", eo.t, "Annulus width, t <= s/3");
    eoCmd->add_option("--inverse-x", eo.inverseX, "Derive (m, s, t) from 1/x, eps and n instead");
    eoCmd->add_option("--eps", eo.eps, "Construction eps < 1/12 (with --inverse-x)");
    eoCmd->add_option("--n", eo.n, "Cluster window Lambda_n (default m*s)");
    eoCmd->add_option("--p", eo.p, "Edge probability");
    eoCmd->add_option("--samples", eo.samples, "Samples");
    eoCmd->add_option("--witness", eo.witness, "Write the JSON report of one sample");
    eoCmd->add_option("--niceness", eo.niceness, "Rejection attempts for E[C~(A') | O_00, gamma]");

    ChooseArgs ch;
    auto* chCmd = command("choose-params", "Search (x, eps, N) satisfying the construction's size inequalities", ch,
                          validateChoose, runChoose);
    chCmd->add_option("--a", ch.a, "Lower factor");
    chCmd->add_option("--b", ch.b, "Upper factor");
    chCmd->add_option("--pi-model", ch.piModel, "power:<exponent>[:<amplitude>] or table:n=v,n=v,...");
    chCmd->add_option("--c10", ch.c10, "Constant C10");
    chCmd->add_option("--c15", ch.c15, "Constant C15");
    chCmd->add_option("--c17", ch.c17, "Constant C17");
    chCmd->add_option("--c18", ch.c18, "Constant C18");
    chCmd->add_option("--n-first", ch.nFirst, "Smallest n searched");
    chCmd->add_option("--n-last", ch.nLast, "Largest n searched");

    EnumerateArgs en;
    auto* enCmd = command("enumerate", "Exact values by enumerating every configuration", en, validateEnumerate, runEnumerate);
    enCmd->add_option("--observable", en.observable, "pi, hc, maxcluster, ctilde or event-d")
        ->check(CLI::IsMember({"pi", "hc", "maxcluster", "ctilde", "event-d"}));
    enCmd->add_option("--n", en.n, "Box half-width");
    enCmd->add_option("--k", en.k, "Width (hc)");
    enCmd->add_option("--l", en.l, "Height (hc)");
    enCmd->add_option("--p", en.p, "Edge probability");
    enCmd->add_option("--variant", en.variant, "standard or strict (hc)")->check(CLI::IsMember({"standard", "strict"}));
    enCmd->add_option("--a", en.a, "Lower factor (event-d)");
    enCmd->add_option("--b", en.b, "Upper factor (event-d)");
    enCmd->add_option("--pihat", en.piHat, "pi estimate (event-d)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    Run run;
    run.experiment = sub->get_name();
    try {
        if (!common.config.empty()) applyConfigFile(*sub, common.config);
        if (common.threads == 0) common.threads = std::max(1u, std::thread::hardware_concurrency());
        if (common.out.empty()) {
            const char* env = std::getenv("CRITPERC_OUTPUT_DIR");
            common.out = env && *env ? env : "results";
        }
        if (common.name.empty()) common.name = run.experiment;
        run.common = common;
        try {
            commands.at(run.experiment).first();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }

        Manifest manifest;
        manifest.experiment = run.experiment;
        manifest.config = resolvedConfig(*sub, kNonResultOptions);
        manifest.configHash = configHash(run.experiment, manifest.config);
        manifest.seed = common.seed;
        manifest.started = utcNow();
        if (!common.checkpoint.empty()) run.sink = std::make_unique<FileCheckpoint>(common.checkpoint, manifest.configHash);

        commands.at(run.experiment).second(run);

        const std::filesystem::path dir(common.out);
        std::string csv = csvHeader();
        for (const auto& row : run.rows) csv += formatCsv(row);
        writeFileAtomically((dir / (common.name + ".csv")).string(), csv);
        if (!common.raw.empty()) {
            std::string text;
            for (auto v : run.raw) text += std::to_string(v) + "\n";
            writeFileAtomically(common.raw, text);
        }
        manifest.finished = utcNow();
        manifest.rowsWritten = run.rows.size();
        writeManifest((dir / (common.name + ".manifest.json")).string(), manifest);
        std::cout << "wrote " << run.rows.size() << " rows to " << (dir / (common.name + ".csv")).string() << "\n";
        if (!run.insufficient.empty()) {
            std::cerr << "insufficient support: " << run.insufficient << "\n";
            return 3;
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
