#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "critperc/lattice.hpp"
#include "critperc/rng.hpp"

namespace testing_support {

using critperc::Configuration;
using critperc::EdgeId;
using critperc::Orientation;
using critperc::Region;
using critperc::SiteCoord;

inline std::vector<SiteCoord> neighbours(SiteCoord v) {
    return {{v.x + 1, v.y}, {v.x - 1, v.y}, {v.x, v.y + 1}, {v.x, v.y - 1}};
}

inline EdgeId edgeBetween(SiteCoord a, SiteCoord b) {
    if (b < a) std::swap(a, b);
    return {a, a.y == b.y ? Orientation::Horizontal : Orientation::Vertical};
}

/// Sites reachable from `start` by open edges with both ends in `region`.
inline std::set<SiteCoord> reach(const Configuration& c, const Region& region, const std::vector<SiteCoord>& start) {
    std::set<SiteCoord> seen;
    std::queue<SiteCoord> q;
    for (auto v : start)
        if (region.contains(v) && seen.insert(v).second) q.push(v);
    while (!q.empty()) {
        const auto v = q.front();
        q.pop();
        for (auto w : neighbours(v))
            if (region.contains(w) && c.isOpen(edgeBetween(v, w)) && seen.insert(w).second) q.push(w);
    }
    return seen;
}

/// Open clusters of `region`, each as a sorted site set.
inline std::vector<std::set<SiteCoord>> clusters(const Configuration& c, const Region& region) {
    std::vector<std::set<SiteCoord>> out;
    std::set<SiteCoord> done;
    for (auto v : region.sites()) {
        if (done.count(v)) continue;
        auto cl = reach(c, region, {v});
        done.insert(cl.begin(), cl.end());
        out.push_back(std::move(cl));
    }
    return out;
}

inline std::size_t maxCluster(const Configuration& c, const Region& region) {
    std::size_t best = 0;
    for (const auto& cl : clusters(c, region)) best = std::max(best, cl.size());
    return best;
}

/// Sites of W joined inside W to a site of W with a neighbour outside W.
inline std::size_t touchCount(const Configuration& c, const Region& W) {
    std::vector<SiteCoord> boundary;
    for (auto v : W.sites())
        for (auto w : neighbours(v))
            if (!W.contains(w)) {
                boundary.push_back(v);
                break;
            }
    return reach(c, W, boundary).size();
}

/// Sets each listed edge from bit k of `mask`.
inline void applyMask(Configuration& c, const std::vector<EdgeId>& edges, std::uint64_t mask) {
    for (std::size_t k = 0; k < edges.size(); ++k) c.set(edges[k], (mask >> k) & 1U);
}

/// Calls f on every configuration of the window (at most 2^20).
inline void forAllConfigurations(const Region& window, const std::function<void(const Configuration&)>& f) {
    Configuration c(window);
    const auto edges = window.edges();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << edges.size()); ++mask) {
        applyMask(c, edges, mask);
        f(c);
    }
}

/// Every simple cycle (length >= 4) of a graph given by vertex list and an
/// adjacency predicate; each cycle reported once as a vertex set.
template <typename Adjacent>
std::vector<std::vector<SiteCoord>> simpleCycles(const std::vector<SiteCoord>& vertices, Adjacent adjacent) {
    std::vector<std::vector<SiteCoord>> out;
    std::set<std::vector<SiteCoord>> seen;
    std::vector<SiteCoord> path;
    std::set<SiteCoord> onPath;
    std::function<void(SiteCoord)> dfs = [&](SiteCoord v) {
        for (auto w : neighbours(v)) {
            if (!adjacent(v, w)) continue;
            if (w == path.front() && path.size() >= 4) {
                auto key = path;
                std::sort(key.begin(), key.end());
                if (seen.insert(key).second) out.push_back(path);
                continue;
            }
            // Only extend through vertices larger than the start, so each cycle starts at its minimum.
            if (onPath.count(w) || !(path.front() < w)) continue;
            path.push_back(w);
            onPath.insert(w);
            dfs(w);
            onPath.erase(w);
            path.pop_back();
        }
    };
    for (auto s : vertices) {
        path = {s};
        onPath = {s};
        dfs(s);
    }
    return out;
}

/// Point-in-polygon by flood fill: sites of `frame` not reachable from
/// outside `frame` without crossing the polygon drawn through the cycle's
/// vertices (scaled by 2 so that midpoints of segments are lattice points).
/// `offset` is 0 for primal cycles and 1 for dual cycles (vertex at (x+1/2, y+1/2)).
inline std::set<SiteCoord> enclosed(const std::vector<SiteCoord>& cycle, int offset, const critperc::Rect& frame) {
    std::set<SiteCoord> wall;
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        const auto a = cycle[k], b = cycle[(k + 1) % cycle.size()];
        const SiteCoord pa{2 * a.x + offset, 2 * a.y + offset}, pb{2 * b.x + offset, 2 * b.y + offset};
        wall.insert(pa);
        wall.insert({(pa.x + pb.x) / 2, (pa.y + pb.y) / 2});
    }
    const int x0 = 2 * frame.x0 - 3, x1 = 2 * frame.x1 + 3, y0 = 2 * frame.y0 - 3, y1 = 2 * frame.y1 + 3;
    std::set<SiteCoord> outside;
    std::queue<SiteCoord> q;
    q.push({x0, y0});
    outside.insert({x0, y0});
    while (!q.empty()) {
        auto v = q.front();
        q.pop();
        for (auto w : neighbours(v)) {
            if (w.x < x0 || w.x > x1 || w.y < y0 || w.y > y1) continue;
            if (wall.count(w) || outside.count(w)) continue;
            outside.insert(w);
            q.push(w);
        }
    }
    std::set<SiteCoord> inside;
    for (int y = frame.y0; y <= frame.y1; ++y)
        for (int x = frame.x0; x <= frame.x1; ++x) {
            const SiteCoord scaled{2 * x, 2 * y};
            if (!wall.count(scaled) && !outside.count(scaled)) inside.insert({x, y});
        }
    return inside;
}

inline Configuration randomConfiguration(const Region& window, double p, std::uint64_t seed) {
    return critperc::sampleConfiguration(window, p, {seed, 0x5eed});
}

}  // namespace testing_support
