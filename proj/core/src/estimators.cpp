#include "critperc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "critperc/clusters.hpp"

namespace critperc {
namespace {

void requireProbability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
}

void requireSizes(const std::vector<int>& ns, int minimum, const char* what) {
    if (ns.empty()) throw std::invalid_argument(std::string(what) + " list is empty");
    for (int n : ns)
        if (n < minimum) throw std::invalid_argument(std::string(what) + " values must be >= " + std::to_string(minimum));
}

RunOptions withoutCheckpoint(RunOptions options) {
    options.checkpoint = nullptr;
    return options;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

std::uint32_t originRadius(int nMax, double p, const RngSpec& rng) {
    if (nMax < 0) throw std::invalid_argument("n must be non-negative");
    if (nMax == 0) return 0;
    const EdgeSampler sampler(p, rng);
    const auto side = static_cast<std::size_t>(2 * nMax + 1);
    thread_local std::vector<std::uint32_t> stamp;
    thread_local std::uint32_t generation = 0;
    thread_local std::vector<SiteCoord> queue;
    if (stamp.size() < side * side) {
        stamp.assign(side * side, 0);
        generation = 0;
    }
    if (++generation == 0) {
        std::fill(stamp.begin(), stamp.end(), 0);
        generation = 1;
    }
    auto index = [&](SiteCoord v) {
        return static_cast<std::size_t>(v.y + nMax) * side + static_cast<std::size_t>(v.x + nMax);
    };

    queue.clear();
    queue.push_back({0, 0});
    stamp[index({0, 0})] = generation;
    int radius = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const SiteCoord v = queue[head];
        const std::pair<SiteCoord, EdgeId> steps[4] = {
            {{v.x + 1, v.y}, EdgeId{v, Orientation::Horizontal}},
            {{v.x - 1, v.y}, EdgeId{{v.x - 1, v.y}, Orientation::Horizontal}},
            {{v.x, v.y + 1}, EdgeId{v, Orientation::Vertical}},
            {{v.x, v.y - 1}, EdgeId{{v.x, v.y - 1}, Orientation::Vertical}},
        };
        for (const auto& [w, e] : steps) {
            const int r = normInf(w);
            if (r > nMax || stamp[index(w)] == generation || !sampler.open(e)) continue;
            stamp[index(w)] = generation;
            if (r > radius) {
                radius = r;
                if (radius == nMax) return static_cast<std::uint32_t>(radius);
            }
            queue.push_back(w);
        }
    }
    return static_cast<std::uint32_t>(radius);
}

Estimate estimatePi(int n, double p, std::uint64_t budget, const RngSpec& rng, const RunOptions& options) {
    if (n < 0) throw std::invalid_argument("n must be non-negative");
    requireProbability(p);
    return runSamples(
        budget, rng, true,
        [&](const RngSpec& s) -> std::uint64_t { return originRadius(n, p, s) >= static_cast<std::uint32_t>(n); },
        options);
}

std::vector<Estimate> estimatePiProfile(const std::vector<int>& ns, double p, std::uint64_t budget,
                                        const RngSpec& rng, const RunOptions& options) {
    requireSizes(ns, 0, "n");
    requireProbability(p);
    const int nMax = *std::max_element(ns.begin(), ns.end());
    return runSamplesMulti(
        budget, rng, std::vector<bool>(ns.size(), true),
        [&](const RngSpec& s, std::span<std::uint64_t> out) {
            const std::uint32_t radius = originRadius(nMax, p, s);
            for (std::size_t k = 0; k < ns.size(); ++k) out[k] = radius >= static_cast<std::uint32_t>(ns[k]);
        },
        options);
}

Estimate estimateHC(int k, int l, double p, CrossingVariant variant, std::uint64_t budget, const RngSpec& rng,
                    const RunOptions& options) {
    if (k < 1 || l < 1) throw std::invalid_argument("HC(k, l) needs k, l >= 1");
    requireProbability(p);
    const Region box = Region::rectangle(0, k, 0, l);
    return runSamples(
        budget, rng, true,
        [&](const RngSpec& s) -> std::uint64_t {
            return hasHorizontalCrossing(sampleConfiguration(box, p, s), box, variant);
        },
        options);
}

std::string LengthResult::toString() const {
    return length ? std::to_string(*length) : ">= " + std::to_string(nMax);
}

LengthResult estimateCharacteristicLength(double p, double eps, int nMax, std::uint64_t budget, const RngSpec& rng,
                                          const RunOptions& options) {
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2)");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0, 1)");
    if (nMax < 1) throw std::invalid_argument("nMax must be >= 1");
    LengthResult result;
    result.nMax = nMax;
    const bool subcritical = p <= 0.5;
    for (int n = 1; n <= nMax; ++n) {
        const Region box = Region::rectangle(0, n, 0, n);
        const Estimate e = runSamples(
            budget, subStream(rng, "length", n), true,
            [&](const RngSpec& s) -> std::uint64_t {
                const Configuration config = sampleConfiguration(box, p, s);
                return subcritical ? hasHorizontalCrossing(config, box, CrossingVariant::Strict)
                                   : hasDualCrossing(config, box, Direction::Horizontal);
            },
            options);
        result.trace.push_back(e);
        const double margin = 3.0 * e.standardError();
        if (std::fabs(e.mean() - eps) < margin) result.unresolved = true;
        if (e.mean() <= eps - margin) {
            result.length = n;
            break;
        }
    }
    return result;
}

std::vector<TheoremOneRow> theoremOneExperiment(double a, double b, const std::vector<int>& ns, double p,
                                                std::uint64_t budget, const RngSpec& rng,
                                                const RunOptions& options) {
    if (!(a > 0.0) || !(b > a)) throw std::invalid_argument("need 0 < a < b");
    requireSizes(ns, 1, "n");
    requireProbability(p);
    std::vector<TheoremOneRow> rows;
    for (int n : ns) {
        TheoremOneRow row;
        row.n = n;
        RunOptions piOptions = options;
        piOptions.checkpointKey += "/pi" + std::to_string(n);
        row.pi = estimatePi(n, p, budget, subStream(rng, "theorem1-pi", n), piOptions);
        const double scale = static_cast<double>(n) * n;
        const double piHat = row.pi.mean();
        const double se = row.pi.standardError();
        const double piValues[3] = {piHat, std::max(0.0, piHat - 2.0 * se), piHat + 2.0 * se};
        const Region box = Region::box(n);
        RunOptions mOptions = options;
        mOptions.checkpointKey += "/M" + std::to_string(n);
        const auto estimates = runSamplesMulti(
            budget, subStream(rng, "theorem1-M", n), {true, true, true},
            [&](const RngSpec& s, std::span<std::uint64_t> out) {
                const double m = static_cast<double>(maxClusterSize(ClusterLabeling(sampleConfiguration(box, p, s), box)));
                for (int k = 0; k < 3; ++k) out[k] = m > a * scale * piValues[k] && m < b * scale * piValues[k];
            },
            mOptions);
        row.inside = estimates[0];
        row.lower = estimates[1];
        row.upper = estimates[2];
        rows.push_back(row);
    }
    return rows;
}

bool PiBoundsReport::allHold() const {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.holds; });
}

PiBoundsReport piBoundsCheck(const std::vector<int>& ns, double p, std::uint64_t budget, const RngSpec& rng,
                             const PiBoundsOptions& bounds, const RunOptions& options) {
    requireSizes(ns, 1, "n");
    requireProbability(p);
    if (!std::is_sorted(ns.begin(), ns.end()) || std::adjacent_find(ns.begin(), ns.end()) != ns.end() || ns.size() < 2)
        throw std::invalid_argument("n list must be strictly increasing with at least two entries");
    const std::size_t count = ns.size();
    const int nMax = ns.back();
    const double N = static_cast<double>(budget);

    // π(n) and S(n) = sum_{k<=n} π(k) = E[min(D, n) + 1] at p = 1/2.
    std::vector<bool> kinds(2 * count, true);
    std::fill(kinds.begin() + static_cast<std::ptrdiff_t>(count), kinds.end(), false);
    RunOptions profileOptions = options;
    profileOptions.checkpointKey += "/profile";
    const auto profile = runSamplesMulti(
        budget, subStream(rng, "pibounds-profile"), kinds,
        [&](const RngSpec& s, std::span<std::uint64_t> out) {
            const std::uint32_t radius = originRadius(nMax, 0.5, s);
            for (std::size_t k = 0; k < count; ++k) {
                out[k] = radius >= static_cast<std::uint32_t>(ns[k]);
                out[count + k] = std::min<std::uint32_t>(radius, static_cast<std::uint32_t>(ns[k])) + 1;
            }
        },
        profileOptions);

    PiBoundsReport report;
    report.ns = ns;
    report.pi.assign(profile.begin(), profile.begin() + static_cast<std::ptrdiff_t>(count));
    const auto pi = [&](std::size_t k) { return report.pi[k].mean(); };

    // Least-squares slope of log π̂ against log n.
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, used = 0;
        for (std::size_t k = 0; k < count; ++k) {
            if (!(pi(k) > 0.0)) continue;
            const double x = std::log(static_cast<double>(ns[k])), y = std::log(pi(k));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            used += 1;
        }
        if (used >= 2) report.exponent = -(used * sxy - sx * sy) / (used * sxx - sx * sx);
    }

    if (!(pi(0) > 0.0) || !(pi(1) > 0.0)) {
        report.checks.push_back({"(i)", false, "π̂ vanishes at the fitting pair; increase the budget"});
        return report;
    }

    // (i): ratio R = π(m)/π(n). With shared samples, 1[D>=n] <= 1[D>=m] and
    // Var(R̂) ~ R^2/N ((1-π_n)/π_n - (1-π_m)/π_m).
    {
        const double r0 = pi(0) / pi(1);
        const double growth0 = static_cast<double>(ns[1]) / ns[0];
        const double c2 = r0 / std::sqrt(growth0);
        const double alpha = report.exponent / 2.0;
        const double c1 = r0 / std::pow(growth0, alpha);
        BoundCheck upper{"(i) upper", true, "C2=" + fmt(c2) + " fitted at (" + std::to_string(ns[0]) + "," +
                                                std::to_string(ns[1]) + ")"};
        BoundCheck lower{"(i) lower", true, "alpha=" + fmt(alpha) + " C1=" + fmt(c1)};
        for (std::size_t a = 0; a < count; ++a) {
            for (std::size_t b = a + 1; b < count; ++b) {
                if (a == 0 && b == 1) continue;
                const std::string pair = "(" + std::to_string(ns[a]) + "," + std::to_string(ns[b]) + ")";
                if (!(pi(b) > 0.0)) {
                    upper.holds = lower.holds = false;
                    upper.detail += "; π̂ vanishes at " + std::to_string(ns[b]);
                    continue;
                }
                const double r = pi(a) / pi(b);
                const double var = r * r / N * std::max(0.0, (1 - pi(b)) / pi(b) - (1 - pi(a)) / pi(a));
                const double se = std::sqrt(var);
                const double growth = static_cast<double>(ns[b]) / ns[a];
                if (r > c2 * std::sqrt(growth) + 4 * se) {
                    upper.holds = false;
                    upper.detail += "; fails at " + pair;
                }
                if (r < c1 * std::pow(growth, alpha) - 4 * se) {
                    lower.holds = false;
                    lower.detail += "; fails at " + pair;
                }
            }
        }
        report.checks.push_back(upper);
        report.checks.push_back(lower);
    }

    // (ii)
    {
        const auto& S = profile;
        const double c3 = S[count].mean() / (ns[0] * pi(0));
        BoundCheck check{"(ii)", true, "C3=" + fmt(c3)};
        for (std::size_t k = 1; k < count; ++k) {
            const double rhs = c3 * ns[k] * pi(k);
            const double se = std::hypot(S[count + k].standardError(), c3 * ns[k] * report.pi[k].standardError());
            if (S[count + k].mean() > rhs + 4 * se) {
                check.holds = false;
                check.detail += "; fails at " + std::to_string(ns[k]);
            }
        }
        report.checks.push_back(check);
    }

    // (iii)
    if (p != 0.5) {
        RunOptions o = options;
        o.checkpointKey += "/profile-p";
        const auto atP = estimatePiProfile(ns, p, budget, subStream(rng, "pibounds-profile-p"), o);
        BoundCheck check{"(iii)", true, "band x" + fmt(bounds.ratioBand)};
        const double r0 = atP[0].mean() / pi(0);
        for (std::size_t k = 1; k < count; ++k) {
            if (!(pi(k) > 0.0)) continue;
            const double r = atP[k].mean() / pi(k);
            const double se = r * std::hypot(atP[k].mean() > 0 ? atP[k].standardError() / atP[k].mean() : 0.0,
                                             report.pi[k].standardError() / pi(k));
            if (r > r0 * bounds.ratioBand + 4 * se || r < r0 / bounds.ratioBand - 4 * se) {
                check.holds = false;
                check.detail += "; ratio " + fmt(r) + " at " + std::to_string(ns[k]);
            }
        }
        report.checks.push_back(check);
    }

    // (iv) with k = n.
    {
        BoundCheck check{"(iv)", true, ""};
        double c6 = 0.0;
        bool fitted = false;
        for (std::size_t k = 0; k < count && ns[k] <= bounds.maxBoxForSizeBound; ++k) {
            const Region box = Region::box(ns[k]);
            RunOptions o = options;
            o.checkpointKey += "/ctilde" + std::to_string(ns[k]);
            const Estimate e = runSamples(
                budget, subStream(rng, "pibounds-ctilde", ns[k]), false,
                [&](const RngSpec& s) -> std::uint64_t { return boundaryTouchCount(sampleConfiguration(box, p, s), box); },
                o);
            const double scale = static_cast<double>(ns[k]) * ns[k];
            if (!fitted) {
                c6 = e.mean() / (scale * pi(k));
                fitted = true;
                check.detail = "C6=" + fmt(c6) + " fitted at " + std::to_string(ns[k]);
                continue;
            }
            const double se = std::hypot(e.standardError(), c6 * scale * report.pi[k].standardError());
            if (e.mean() > c6 * scale * pi(k) + 4 * se) {
                check.holds = false;
                check.detail += "; fails at " + std::to_string(ns[k]);
            }
        }
        if (fitted) report.checks.push_back(check);
    }
    return report;
}

YMomentReport yMomentCheck(const std::vector<int>& ms, double p, std::uint64_t budget, const RngSpec& rng,
                           double floor, const RunOptions& options) {
    requireSizes(ms, 1, "m");
    requireProbability(p);
    YMomentReport report;
    report.floor = floor;
    const RunOptions plain = withoutCheckpoint(options);

    std::vector<std::vector<std::uint64_t>> values(ms.size());
    for (std::size_t k = 0; k < ms.size(); ++k) {
        const int m = ms[k];
        YMomentRow row;
        row.m = m;
        row.pi = estimatePi(m, p, budget, subStream(rng, "ymoment-pi", m), plain);
        const Region window = Region::box(2 * m);
        RunOptions o = plain;
        o.raw = &values[k];
        row.y = runSamples(
            budget, subStream(rng, "ymoment-y", m), false,
            [&](const RngSpec& s) -> std::uint64_t { return annulusReachCount(sampleConfiguration(window, p, s), m); },
            o);
        report.rows.push_back(row);
    }

    const double scale0 = static_cast<double>(ms[0]) * ms[0] * report.rows[0].pi.mean();
    {
        auto sorted = values[0];
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        const std::size_t half = (sorted.size() + 1) / 2;  // P̂(Y >= y*) >= 1/2
        const double threshold = static_cast<double>(sorted[half - 1]);
        report.c = scale0 > 0.0 ? threshold / scale0 : 0.0;
    }

    for (std::size_t k = 0; k < ms.size(); ++k) {
        auto& row = report.rows[k];
        const double threshold = report.c * ms[k] * ms[k] * row.pi.mean();
        const double half = row.y.mean() / 2.0;
        row.tail = Estimate{};
        row.tail.indicator = true;
        row.tail.seed = row.y.seed;
        row.halfMean = row.tail;
        for (const auto v : values[k]) {
            row.tail.add(static_cast<double>(v) >= threshold);
            row.halfMean.add(static_cast<double>(v) >= half);
        }
        const double second = row.y.secondMoment();
        row.chebyshev = second > 0.0 ? row.y.mean() * row.y.mean() / (4.0 * second) : 0.0;
        if (k > 0 && row.tail.mean() < floor) report.tailHolds = false;
        if (row.halfMean.mean() < row.chebyshev - 4.0 * row.halfMean.standardError()) report.chebyshevHolds = false;
    }
    return report;
}

SmallMaxReport smallMaxClusterCheck(double K, const std::vector<int>& ns, double p, std::uint64_t budget,
                                    const RngSpec& rng, double floor, const RunOptions& options) {
    if (!(K > 0.0)) throw std::invalid_argument("K must be positive");
    requireSizes(ns, 1, "n");
    requireProbability(p);
    SmallMaxReport report;
    report.K = K;
    report.floor = floor;
    for (int n : ns) {
        SmallMaxRow row;
        row.n = n;
        RunOptions o = options;
        o.checkpointKey += "/pi" + std::to_string(n);
        row.pi = estimatePi(n, p, budget, subStream(rng, "smallmax-pi", n), o);
        const double threshold = K * n * n * row.pi.mean();
        const Region box = Region::box(n);
        o.checkpointKey = options.checkpointKey + "/M" + std::to_string(n);
        row.below = runSamples(
            budget, subStream(rng, "smallmax-M", n), true,
            [&](const RngSpec& s) -> std::uint64_t {
                return static_cast<double>(maxClusterSize(ClusterLabeling(sampleConfiguration(box, p, s), box))) <
                       threshold;
            },
            o);
        if (row.below.mean() < floor) report.holds = false;
        report.rows.push_back(row);
    }
    return report;
}

void SteeringInstance::validate() const {
    auto fail = [](const std::string& clause) { throw std::invalid_argument("steering hypothesis violated: " + clause); };
    if (k < 1) fail("k >= 1");
    if (!(alpha > 0.0)) fail("0 < alpha");
    if (!(alpha < beta)) fail("alpha < beta");
    if (!(alpha / k < (beta - alpha) / 2.0)) fail("alpha/k < (beta-alpha)/2");
    if (!(eta1 > 0.0 && eta1 <= 1.0)) fail("0 < eta1 <= 1");
    if (!(eta2 > 0.0 && eta2 <= 1.0)) fail("0 < eta2 <= 1");
    if (laws.size() != static_cast<std::size_t>(k)) fail("one distribution per X_i");
    const double lo = alpha / k, hi = (beta - alpha) / 2.0, small = (beta - alpha) / (2.0 * k);
    for (std::size_t i = 0; i < laws.size(); ++i) {
        const std::string which = "X_" + std::to_string(i + 1);
        if (laws[i].empty()) fail(which + " has empty support");
        double mass = 0, inWindow = 0, below = 0;
        for (const auto& [value, prob] : laws[i]) {
            if (!(prob >= 0.0)) fail(which + " has a negative probability");
            if (!(value >= 0.0)) fail(which + " takes a negative value");
            mass += prob;
            if (value > lo && value < hi) inWindow += prob;
            if (value <= small) below += prob;
        }
        if (std::fabs(mass - 1.0) > 1e-9) fail(which + " probabilities sum to 1");
        if (inWindow < eta1 - 1e-12) fail("P(" + which + " in (alpha/k, (beta-alpha)/2)) >= eta1");
        if (below < eta2 - 1e-12) fail("P(" + which + " <= (beta-alpha)/(2k)) >= eta2");
    }
}

double SteeringInstance::bound() const { return std::pow(std::min(eta1, eta2), k); }

SteeringInstance SteeringInstance::demo() {
    const DiscreteLaw law{{0.4, 0.5}, {0.7, 0.5}};
    return {2, 1.0, 3.0, {law, law}, 0.5, 0.5};
}

SteeringInstance randomSteeringInstance(StreamRng& rng) {
    SteeringInstance inst;
    inst.k = 1 + static_cast<int>(rng.below(4));
    inst.alpha = 0.5 + 1.5 * rng.uniform();
    inst.beta = inst.alpha * (1.0 + 2.0 / inst.k) * (1.1 + rng.uniform());
    inst.eta1 = 0.05 + 0.45 * rng.uniform();
    inst.eta2 = 0.05 + 0.45 * rng.uniform();
    const double lo = inst.alpha / inst.k, hi = (inst.beta - inst.alpha) / 2.0;
    const double small = (inst.beta - inst.alpha) / (2.0 * inst.k);
    for (int i = 0; i < inst.k; ++i) {
        const std::size_t support = 2 + rng.below(4);
        std::vector<double> weights(support);
        for (auto& w : weights) w = rng.uniform() + 1e-3;
        const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        const double slack = 1.0 - inst.eta1 - inst.eta2;
        DiscreteLaw law;
        for (std::size_t s = 0; s < support; ++s) {
            double value;
            if (s == 0)
                value = lo + (hi - lo) * (0.01 + 0.98 * rng.uniform());
            else if (s == 1)
                value = small * 0.99 * rng.uniform();
            else
                value = 1.2 * inst.beta * rng.uniform();
            const double base = s == 0 ? inst.eta1 : s == 1 ? inst.eta2 : 0.0;
            law.emplace_back(value, base + slack * weights[s] / total);
        }
        inst.laws.push_back(std::move(law));
    }
    inst.validate();
    return inst;
}

double steeringOracle(const SteeringInstance& instance) {
    instance.validate();
    double product = 1.0;
    for (const auto& law : instance.laws) product *= static_cast<double>(law.size());
    if (product > 1e6) throw std::invalid_argument("product support exceeds 10^6 outcomes");
    std::vector<std::size_t> digit(instance.laws.size(), 0);
    double hit = 0.0;
    while (true) {
        double sum = 0.0, prob = 1.0;
        for (std::size_t i = 0; i < digit.size(); ++i) {
            sum += instance.laws[i][digit[i]].first;
            prob *= instance.laws[i][digit[i]].second;
        }
        if (sum > instance.alpha && sum < instance.beta) hit += prob;
        std::size_t i = 0;
        while (i < digit.size() && ++digit[i] == instance.laws[i].size()) digit[i++] = 0;
        if (i == digit.size()) break;
    }
    return hit;
}

Estimate steeringSimulate(const SteeringInstance& instance, std::uint64_t budget, const RngSpec& rng,
                          const RunOptions& options) {
    instance.validate();
    return runSamples(
        budget, rng, true,
        [&](const RngSpec& s) -> std::uint64_t {
            StreamRng r(s);
            double sum = 0.0;
            for (const auto& law : instance.laws) {
                double u = r.uniform();
                std::size_t pick = law.size() - 1;
                for (std::size_t j = 0; j + 1 < law.size(); ++j) {
                    if (u < law[j].second) {
                        pick = j;
                        break;
                    }
                    u -= law[j].second;
                }
                sum += law[pick].first;
            }
            return sum > instance.alpha && sum < instance.beta;
        },
        options);
}

SweepCurve newmanZiffSweep(SweepObservable observable, int k, int l, const std::vector<double>& ps,
                           std::uint64_t sweeps, const RngSpec& rng) {
    if (sweeps == 0) throw std::invalid_argument("sweep count must be positive");
    for (double p : ps) requireProbability(p);
    Region region;
    if (observable == SweepObservable::OneArm) {
        if (k < 0) throw std::invalid_argument("n must be non-negative");
        region = Region::box(k);
    } else {
        if (k < 1 || l < 1) throw std::invalid_argument("HC(k, l) needs k, l >= 1");
        region = Region::rectangle(0, k, 0, l);
    }
    const Rect frame = region.bounds();
    const auto edges = region.edges();
    const std::size_t M = edges.size();
    auto index = [&](SiteCoord v) {
        return static_cast<std::uint32_t>((v.y - frame.y0) * frame.width() + (v.x - frame.x0));
    };
    const auto sites = static_cast<std::size_t>(frame.area());
    std::vector<std::uint8_t> initial(sites, 0);
    for (int y = frame.y0; y <= frame.y1; ++y) {
        for (int x = frame.x0; x <= frame.x1; ++x) {
            std::uint8_t f = 0;
            if (observable == SweepObservable::OneArm) {
                if (x == 0 && y == 0) f |= 1;
                if (std::max(std::abs(x), std::abs(y)) == k) f |= 2;
            } else {
                if (x == frame.x0) f |= 1;
                if (x == frame.x1) f |= 2;
            }
            initial[index({x, y})] = f;
        }
    }

    // tails[q][j] = P(Binomial(M, p_q) >= j), j = 0..M+1.
    std::vector<std::vector<double>> tails;
    for (double p : ps) {
        std::vector<long double> pmf(M + 1, 0.0L);
        if (p == 0.0) {
            pmf[0] = 1;
        } else if (p == 1.0) {
            pmf[M] = 1;
        } else {
            const long double lp = std::log(static_cast<long double>(p)), lq = std::log1p(-static_cast<long double>(p));
            for (std::size_t j = 0; j <= M; ++j)
                pmf[j] = std::exp(std::lgamma(M + 1.0L) - std::lgamma(j + 1.0L) - std::lgamma(M - j + 1.0L) + j * lp +
                                  (M - j) * lq);
        }
        std::vector<double> tail(M + 2, 0.0);
        long double acc = 0.0L;
        for (std::size_t j = M + 1; j-- > 0;) {
            acc += pmf[j];
            tail[j] = static_cast<double>(std::min(1.0L, acc));
        }
        tails.push_back(std::move(tail));
    }

    std::vector<double> sum(ps.size(), 0.0), sumSquares(ps.size(), 0.0);
    std::vector<std::uint32_t> order(M);
    std::vector<std::uint8_t> flags;
    UnionFind uf;
    for (std::uint64_t sweep = 0; sweep < sweeps; ++sweep) {
        StreamRng r(rng.offset(sweep));
        std::iota(order.begin(), order.end(), 0U);
        for (std::size_t i = M; i > 1; --i) std::swap(order[i - 1], order[r.below(i)]);
        uf.reset(sites);
        flags = initial;
        std::size_t first = M + 1;
        if (std::find(flags.begin(), flags.end(), 3) != flags.end()) first = 0;
        for (std::size_t step = 0; step < M && first > M; ++step) {
            const auto [a, b] = edges[order[step]].endpoints();
            const std::uint32_t ra = uf.find(index(a)), rb = uf.find(index(b));
            if (ra == rb) continue;
            const std::uint8_t merged = flags[ra] | flags[rb];
            flags[uf.unite(ra, rb)] = merged;
            if (merged == 3) first = step + 1;
        }
        for (std::size_t q = 0; q < ps.size(); ++q) {
            const double v = tails[q][first];
            sum[q] += v;
            sumSquares[q] += v * v;
        }
    }

    SweepCurve curve;
    curve.p = ps;
    curve.sweeps = sweeps;
    const double N = static_cast<double>(sweeps);
    for (std::size_t q = 0; q < ps.size(); ++q) {
        const double mean = sum[q] / N;
        const double var = sweeps > 1 ? std::max(0.0, (sumSquares[q] - N * mean * mean) / (N - 1)) : 0.0;
        curve.mean.push_back(mean);
        curve.standardError.push_back(std::sqrt(var / N));
    }
    return curve;
}

}  // namespace critperc
