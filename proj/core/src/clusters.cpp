#include "critperc/clusters.hpp"

#include <algorithm>
#include <stdexcept>

#include "critperc/topology.hpp"

namespace critperc {

ClusterLabeling::ClusterLabeling(const Configuration& config, const Region& region) : region_(region) {
    if (!config.window().contains(region)) throw std::invalid_argument("region is not inside the configuration window");
    const Rect& f = region_.bounds();
    labels_.assign(f.area(), kOutside);
    if (region_.empty()) return;

    UnionFind uf(f.area());
    for (int y = f.y0; y <= f.y1; ++y) {
        for (int x = f.x0; x <= f.x1; ++x) {
            const SiteCoord v{x, y};
            if (!region_.contains(v)) continue;
            const EdgeId right{v, Orientation::Horizontal};
            const EdgeId up{v, Orientation::Vertical};
            if (region_.contains(right.other()) && config.isOpen(right))
                uf.unite(static_cast<std::uint32_t>(slot(v)), static_cast<std::uint32_t>(slot(right.other())));
            if (region_.contains(up.other()) && config.isOpen(up))
                uf.unite(static_cast<std::uint32_t>(slot(v)), static_cast<std::uint32_t>(slot(up.other())));
        }
    }
    std::vector<std::int32_t> rootLabel(f.area(), kOutside);
    for (int y = f.y0; y <= f.y1; ++y) {
        for (int x = f.x0; x <= f.x1; ++x) {
            const SiteCoord v{x, y};
            if (!region_.contains(v)) continue;
            const auto root = uf.find(static_cast<std::uint32_t>(slot(v)));
            if (rootLabel[root] == kOutside) {
                rootLabel[root] = static_cast<std::int32_t>(sizes_.size());
                sizes_.push_back(0);
            }
            labels_[slot(v)] = rootLabel[root];
            ++sizes_[static_cast<std::size_t>(rootLabel[root])];
        }
    }
}

ClusterLabeling labelClusters(const Configuration& config, const Region& region) {
    return ClusterLabeling(config, region);
}

std::size_t clusterSizeAt(const ClusterLabeling& labeling, SiteCoord v) {
    const auto id = labeling.label(v);
    if (id == ClusterLabeling::kOutside) throw std::invalid_argument("site is outside the labeled region");
    return labeling.size(id);
}

std::size_t maxClusterSize(const ClusterLabeling& labeling) {
    if (labeling.region().empty()) throw std::invalid_argument("empty region has no clusters");
    const auto sizes = labeling.sizes();
    return *std::max_element(sizes.begin(), sizes.end());
}

namespace {

/// Number of sites of `count` whose cluster (in `labeling`) holds a site of `seeds`.
std::size_t countJoined(const ClusterLabeling& labeling, const std::vector<SiteCoord>& seeds, const Region& count) {
    std::vector<std::uint8_t> marked(labeling.clusterCount(), 0);
    for (const auto& v : seeds) {
        const auto id = labeling.label(v);
        if (id != ClusterLabeling::kOutside) marked[static_cast<std::size_t>(id)] = 1;
    }
    std::size_t total = 0;
    for (const auto& v : count.sites()) {
        const auto id = labeling.label(v);
        if (id != ClusterLabeling::kOutside && marked[static_cast<std::size_t>(id)]) ++total;
    }
    return total;
}

}  // namespace

std::size_t boundaryTouchCount(const Configuration& config, const Region& W) {
    const ClusterLabeling labeling(config, W);
    return countJoined(labeling, W.boundary().sites(), W);
}

std::size_t annulusReachCount(const Configuration& config, int m) {
    if (m < 0) throw std::invalid_argument("m must be non-negative");
    const Region outer = Region::box(2 * m);
    if (!config.window().contains(outer)) throw std::invalid_argument("window does not contain the box of half-width 2m");
    const ClusterLabeling labeling(config, outer);
    return countJoined(labeling, outer.boundary().sites(), Region::box(m));
}

std::size_t circuitClusterSize(const Configuration& config, const Circuit& circuit) {
    if (circuit.lattice() != Lattice::Primal) throw std::invalid_argument("circuitClusterSize needs a primal circuit");
    const Region onCircuit = circuit.siteRegion();
    const Region closure = circuit.interior().unite(onCircuit);
    if (!config.window().contains(closure)) throw std::invalid_argument("circuit interior escapes the window");
    const ClusterLabeling labeling(config, closure);
    return countJoined(labeling, circuit.sites(), circuit.interior());
}

std::size_t circuitReach(const Configuration& config, const std::optional<Circuit>& circuit, const Region& W) {
    if (!config.window().contains(W)) throw std::invalid_argument("W is not inside the configuration window");
    if (!circuit) return 0;
    const ClusterLabeling labeling(config, config.window());
    return countJoined(labeling, circuit->sites(), W);
}

InOutCounts cInOut(const Configuration& config, std::span<const Circuit> circuits) {
    InOutCounts counts;
    std::vector<Region> closures;
    std::vector<SiteCoord> onCircuits;
    for (const auto& c : circuits) {
        if (c.lattice() != Lattice::Primal) throw std::invalid_argument("cInOut needs primal circuits");
        closures.push_back(c.interior().unite(c.siteRegion()));
        onCircuits.insert(onCircuits.end(), c.sites().begin(), c.sites().end());
    }
    for (std::size_t i = 0; i < closures.size(); ++i)
        for (std::size_t j = i + 1; j < closures.size(); ++j)
            if (closures[i].unite(closures[j]).size() != closures[i].size() + closures[j].size())
                throw std::invalid_argument("circuits overlap or are nested");

    for (const auto& c : circuits) counts.inside += circuitClusterSize(config, c);

    const ClusterLabeling labeling(config, config.window());
    Region outside = config.window();
    for (const auto& closure : closures) outside = outside.minus(closure);
    counts.outside = countJoined(labeling, onCircuits, outside) + onCircuits.size();
    return counts;
}

}  // namespace critperc
