#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "critperc/lattice.hpp"

namespace critperc {

class Circuit;

/// Weighted quick-union with path halving.
class UnionFind {
public:
    explicit UnionFind(std::size_t n = 0) { reset(n); }

    void reset(std::size_t n) {
        parent_.resize(n);
        size_.assign(n, 1);
        for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
    }

    std::uint32_t find(std::uint32_t i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }

    /// Returns the root of the merged set.
    std::uint32_t unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return a;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return a;
    }

    bool connected(std::uint32_t a, std::uint32_t b) { return find(a) == find(b); }
    std::uint32_t sizeOf(std::uint32_t i) { return size_[find(i)]; }
    std::size_t elements() const { return parent_.size(); }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
};

/// Open clusters of a configuration restricted to a region: two sites share
/// a label iff an open path inside the region joins them. Cluster ids are
/// assigned in row-major order of each cluster's first site.
class ClusterLabeling {
public:
    static constexpr std::int32_t kOutside = -1;

    ClusterLabeling(const Configuration& config, const Region& region);

    const Region& region() const { return region_; }
    std::size_t clusterCount() const { return sizes_.size(); }
    /// Cluster id of v, or kOutside.
    std::int32_t label(SiteCoord v) const {
        return region_.bounds().contains(v) ? labels_[slot(v)] : kOutside;
    }
    std::size_t size(std::int32_t cluster) const { return sizes_.at(static_cast<std::size_t>(cluster)); }
    std::span<const std::uint32_t> sizes() const { return sizes_; }

private:
    std::size_t slot(SiteCoord v) const {
        const Rect& f = region_.bounds();
        return static_cast<std::size_t>(v.y - f.y0) * static_cast<std::size_t>(f.width()) +
               static_cast<std::size_t>(v.x - f.x0);
    }

    Region region_;
    std::vector<std::int32_t> labels_;
    std::vector<std::uint32_t> sizes_;
};

ClusterLabeling labelClusters(const Configuration& config, const Region& region);

/// C(v): size of v's open cluster inside the labeled region.
std::size_t clusterSizeAt(const ClusterLabeling& labeling, SiteCoord v);

/// M: largest cluster size in the labeled region.
std::size_t maxClusterSize(const ClusterLabeling& labeling);

/// Number of sites of W joined inside W to the boundary of W.
std::size_t boundaryTouchCount(const Configuration& config, const Region& W);

/// Number of sites of the box of half-width m joined to the boundary of the
/// box of half-width 2m by an open path inside the larger box.
std::size_t annulusReachCount(const Configuration& config, int m);

/// Interior sites of the circuit joined to it by open paths inside Int ∪ circuit.
std::size_t circuitClusterSize(const Configuration& config, const Circuit& circuit);

/// Sites of W joined (inside the window) to the circuit; 0 for an absent circuit.
std::size_t circuitReach(const Configuration& config, const std::optional<Circuit>& circuit, const Region& W);

struct InOutCounts {
    std::size_t inside = 0;
    std::size_t outside = 0;
};

/// inside: sum of circuitClusterSize over the circuits. outside: sites lying
/// outside every circuit and its interior that are joined (through the
/// window) to some circuit, plus the sites on the circuits.
InOutCounts cInOut(const Configuration& config, std::span<const Circuit> circuits);

}  // namespace critperc
