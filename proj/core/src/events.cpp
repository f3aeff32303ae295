#include "critperc/events.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace critperc {
namespace {

struct IndexRange {
    int i0, i1, j0, j1;
};

IndexRange indexRangeOf(const PartitionSpec& spec, const Region& W) {
    const auto rect = W.rectShape();
    if (rect && W.size() == rect->area()) {
        const int h = spec.halfRange();
        const int ms = spec.m * spec.s;
        if (*rect == Rect{-ms, -ms, ms, ms}) return {-h, h, -h, h};
        for (int j = -h; j <= h; ++j)
            for (int i = -h; i <= h; ++i)
                if (*rect == Rect{2 * i * spec.s - spec.s, 2 * j * spec.s - spec.s, 2 * i * spec.s + spec.s,
                                  2 * j * spec.s + spec.s})
                    return {i, i, j, j};
    }
    throw std::invalid_argument("event O is defined for W = Λ_ms or W = B_ij only, got " + W.describe());
}

std::string cellName(const char* what, int i, int j) {
    return std::string(what) + "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

std::vector<SiteCoord> sitesIn(const Circuit& circuit, const Region& region) {
    std::vector<SiteCoord> out;
    for (const auto& v : circuit.sites())
        if (region.contains(v)) out.push_back(v);
    return out;
}

nlohmann::json sitesJson(const std::vector<SiteCoord>& sites) {
    auto out = nlohmann::json::array();
    for (const auto& v : sites) out.push_back({v.x, v.y});
    return out;
}

}  // namespace

std::string toJson(const EventReport& report, bool withWitnesses) {
    nlohmann::json out;
    out["holds"] = report.holds;
    out["failure"] = report.failure;
    auto circuits = nlohmann::json::array();
    for (const auto& w : report.circuits) {
        nlohmann::json c{{"i", w.i}, {"j", w.j}, {"length", w.circuit.length()}};
        if (withWitnesses) c["sites"] = sitesJson(w.circuit.sites());
        circuits.push_back(std::move(c));
    }
    auto connections = nlohmann::json::array();
    for (const auto& w : report.connections) {
        nlohmann::json c{{"i", w.i},
                         {"j", w.j},
                         {"corridor", w.direction == Direction::Horizontal ? "H" : "V"},
                         {"length", w.path.size()}};
        if (withWitnesses) c["path"] = sitesJson(w.path);
        connections.push_back(std::move(c));
    }
    out["circuits"] = std::move(circuits);
    out["connections"] = std::move(connections);
    return out.dump();
}

EventReport eventO(const Configuration& config, const PartitionSpec& spec, const Region& W) {
    spec.validate();
    const IndexRange r = indexRangeOf(spec, W);
    const int s = spec.s;
    const Rect extended{2 * (r.i0 - 1) * s - s, 2 * (r.j0 - 1) * s - s, 2 * (r.i1 + 1) * s + s,
                        2 * (r.j1 + 1) * s + s};
    const Configuration completed = restrictAndExtend(config, W, Region::rectangle(extended), EdgeState::Open);

    EventReport report;
    std::map<std::pair<int, int>, std::optional<Circuit>> cache;
    auto circuitAt = [&](int i, int j) -> const std::optional<Circuit>& {
        auto it = cache.find({i, j});
        if (it == cache.end())
            it = cache.emplace(std::pair{i, j}, outermostOpenCircuit(completed, cellRegions(spec, i, j).middle)).first;
        return it->second;
    };

    for (int j = r.j0; j <= r.j1; ++j) {
        for (int i = r.i0; i <= r.i1; ++i) {
            const auto& gamma = circuitAt(i, j);
            if (!gamma) {
                report.failure = "no open circuit in annulus " + cellName("A2", i, j);
                return report;
            }
            report.circuits.push_back({i, j, *gamma});
        }
    }

    auto connect = [&](int i, int j, Direction direction) -> bool {
        const CellRegions cell = cellRegions(spec, i, j);
        const Region& corridor = direction == Direction::Horizontal ? cell.corridorH : cell.corridorV;
        const auto& a = circuitAt(i, j);
        const auto& b = direction == Direction::Horizontal ? circuitAt(i + 1, j) : circuitAt(i, j + 1);
        const char* name = direction == Direction::Horizontal ? "H" : "V";
        if (!a || !b) {
            report.failure = std::string("missing circuit next to corridor ") + cellName(name, i, j);
            return false;
        }
        const auto from = sitesIn(*a, corridor);
        const auto to = sitesIn(*b, corridor);
        auto path = findOpenPath(completed, corridor, from, Region::fromSites(to));
        if (!path) {
            report.failure = std::string("no open connection in corridor ") + cellName(name, i, j);
            return false;
        }
        report.connections.push_back({i, j, direction, std::move(*path)});
        return true;
    };

    for (int j = r.j0; j <= r.j1; ++j)
        for (int i = r.i0 - 1; i <= r.i1; ++i)
            if (!connect(i, j, Direction::Horizontal)) return report;
    for (int j = r.j0 - 1; j <= r.j1; ++j)
        for (int i = r.i0; i <= r.i1; ++i)
            if (!connect(i, j, Direction::Vertical)) return report;

    report.holds = true;
    return report;
}

bool eventG(const Configuration& config, const PartitionSpec& spec, int i, int j) {
    return innermostClosedDualCircuit(config, cellRegions(spec, i, j).inner).has_value();
}

bool eventD(const ClusterLabeling& labeling, int n, double a, double b, double piHat) {
    if (!(piHat > 0.0)) throw std::invalid_argument("piHat must be positive");
    const double scale = static_cast<double>(n) * n * piHat;
    const double lo = a * scale, hi = b * scale;
    const auto sizes = labeling.sizes();
    return std::any_of(sizes.begin(), sizes.end(), [&](std::uint32_t c) {
        const double v = static_cast<double>(c);
        return v > lo && v < hi;
    });
}

Region crossingBox(const PartitionSpec& spec) {
    spec.validate();
    return Region::box(spec.m * spec.s - 2 * spec.t + 1);
}

bool crossingClusterCheck(const Configuration& config, const PartitionSpec& spec, int n) {
    spec.validate();
    if (spec.m * spec.s > n) throw std::invalid_argument("partition does not fit: m*s > n");
    const Region box = crossingBox(spec);
    const Rect rect = *box.rectShape();
    const ClusterLabeling inBox(config, box);

    enum : unsigned { Left = 1, Right = 2, Bottom = 4, Top = 8 };
    std::vector<unsigned> sides(inBox.clusterCount(), 0);
    for (int k = rect.x0; k <= rect.x1; ++k) {
        sides[static_cast<std::size_t>(inBox.label({k, rect.y0}))] |= Bottom;
        sides[static_cast<std::size_t>(inBox.label({k, rect.y1}))] |= Top;
    }
    for (int k = rect.y0; k <= rect.y1; ++k) {
        sides[static_cast<std::size_t>(inBox.label({rect.x0, k}))] |= Left;
        sides[static_cast<std::size_t>(inBox.label({rect.x1, k}))] |= Right;
    }
    const auto crossing = std::find(sides.begin(), sides.end(), Left | Right | Bottom | Top);
    if (crossing == sides.end()) return false;
    const auto crossingId = static_cast<std::int32_t>(crossing - sides.begin());

    const Region whole = Region::box(spec.m * spec.s);
    const EventReport o = eventO(config, spec, whole);
    if (!o.holds) return true;

    const ClusterLabeling inLambda(config, Region::box(n));
    SiteCoord anchor{};
    for (const auto& v : box.sites()) {
        if (inBox.label(v) == crossingId) {
            anchor = v;
            break;
        }
    }
    const std::int32_t cluster = inLambda.label(anchor);
    for (const auto& w : o.circuits)
        for (const auto& v : w.circuit.sites())
            if (inLambda.label(v) != cluster) return false;
    return true;
}

Configuration PartialSampler::draw(const RngSpec& rng) const {
    if (variableEdges.empty()) return sampleConfiguration(background.window(), p, rng);
    Configuration out = background;
    const EdgeSampler sampler(p, rng);
    for (const auto& e : variableEdges) out.set(e, sampler.open(e));
    return out;
}

namespace {

/// Value of C~(A') when the niceness condition holds, nothing otherwise.
std::optional<std::uint64_t> nicenessSample(const Configuration& config, const Circuit& gamma,
                                            const PartitionSpec& spec, const CellRegions& cell) {
    const EventReport o = eventO(config, spec, cell.box);
    if (!o.holds || o.circuits.size() != 1 || !(o.circuits.front().circuit == gamma)) return std::nullopt;
    return boundaryTouchCount(config, cell.shell);
}

void requireCandidate(const Circuit& gamma, const CellRegions& cell) {
    if (gamma.lattice() != Lattice::Primal) throw std::invalid_argument("gamma must be a primal circuit");
    for (const auto& v : gamma.sites())
        if (!cell.middle.contains(v)) throw std::invalid_argument("gamma must lie in the annulus A2 of the cell");
}

}  // namespace

ConditionalEstimate nicenessExpectation(const Circuit& gamma, const PartitionSpec& spec, int i, int j,
                                        const PartialSampler& sampler, std::uint64_t budget, const RngSpec& rng,
                                        unsigned threads) {
    spec.validate();
    if (budget == 0) throw std::invalid_argument("sample budget must be positive");
    const CellRegions cell = cellRegions(spec, i, j);
    requireCandidate(gamma, cell);
    if (!sampler.background.window().contains(cell.box))
        throw std::invalid_argument("sampler window must contain the cell box");

    threads = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, budget)));
    std::vector<Estimate> partial(threads);
    auto work = [&](unsigned w) {
        const std::uint64_t lo = budget * w / threads, hi = budget * (w + 1) / threads;
        for (std::uint64_t k = lo; k < hi; ++k) {
            if (const auto v = nicenessSample(sampler.draw(rng.offset(k)), gamma, spec, cell)) partial[w].add(*v);
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    }
    ConditionalEstimate out;
    out.estimate.seed = rng;
    for (const auto& e : partial) out.estimate = merge(out.estimate, e);
    out.estimate.seed = rng;
    out.attempts = budget;
    return out;
}

ExactValue nicenessExpectationExact(const Circuit& gamma, const PartitionSpec& spec, int i, int j,
                                    const EnumerationTask& task) {
    spec.validate();
    const CellRegions cell = cellRegions(spec, i, j);
    requireCandidate(gamma, cell);
    return enumerateConditionalExpectation(
        task,
        [&](const Configuration& c) { return static_cast<std::int64_t>(boundaryTouchCount(c, cell.shell)); },
        [&](const Configuration& c) { return nicenessSample(c, gamma, spec, cell).has_value(); });
}

}  // namespace critperc
