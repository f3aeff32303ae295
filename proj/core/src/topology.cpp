#include "critperc/topology.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace critperc {
namespace {

/// Dense flag grid over a rectangle.
class Grid {
public:
    explicit Grid(const Rect& frame) : frame_(frame), flags_(frame.area(), 0) {}

    const Rect& frame() const { return frame_; }
    bool inside(SiteCoord v) const { return frame_.contains(v); }
    std::uint8_t& at(SiteCoord v) { return flags_[index(v)]; }
    std::uint8_t at(SiteCoord v) const { return flags_[index(v)]; }

private:
    std::size_t index(SiteCoord v) const {
        return static_cast<std::size_t>(v.y - frame_.y0) * static_cast<std::size_t>(frame_.width()) +
               static_cast<std::size_t>(v.x - frame_.x0);
    }

    Rect frame_;
    std::vector<std::uint8_t> flags_;
};

constexpr SiteCoord kSteps[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

/// Primal edge crossed by the dual edge between face f and face f + step.
EdgeId crossedEdge(SiteCoord f, SiteCoord step) {
    if (step.x == 1) return {{f.x + 1, f.y}, Orientation::Vertical};
    if (step.x == -1) return {{f.x, f.y}, Orientation::Vertical};
    if (step.y == 1) return {{f.x, f.y + 1}, Orientation::Horizontal};
    return {{f.x, f.y}, Orientation::Horizontal};
}

/// The two faces adjacent to a primal edge.
std::pair<SiteCoord, SiteCoord> adjacentFaces(const EdgeId& e) {
    if (e.orientation == Orientation::Horizontal) return {{e.site.x, e.site.y - 1}, {e.site.x, e.site.y}};
    return {{e.site.x - 1, e.site.y}, {e.site.x, e.site.y}};
}

/// Configuration seen through a transposition (x, y) -> (y, x), so that
/// vertical statements reuse the horizontal code.
class View {
public:
    View(const Configuration& config, bool transposed) : config_(config), transposed_(transposed) {}

    bool open(SiteCoord a, SiteCoord b) const { return config_.isOpen(edge(a, b)); }
    bool dualOpen(const EdgeId& viewEdge) const { return config_.dualOpen(real(viewEdge)); }
    Rect rect(const Rect& r) const { return transposed_ ? Rect{r.y0, r.x0, r.y1, r.x1} : r; }

private:
    SiteCoord real(SiteCoord v) const { return transposed_ ? SiteCoord{v.y, v.x} : v; }
    EdgeId real(const EdgeId& e) const {
        if (!transposed_) return e;
        return {real(e.site), e.orientation == Orientation::Horizontal ? Orientation::Vertical : Orientation::Horizontal};
    }
    EdgeId edge(SiteCoord a, SiteCoord b) const { return EdgeId::between(real(a), real(b)); }

    const Configuration& config_;
    bool transposed_;
};

Rect requireRect(const Configuration& config, const Region& box) {
    const auto rect = box.rectShape();
    if (!rect || (box.kind() != RegionKind::Box && box.kind() != RegionKind::Rectangle &&
                  box.kind() != RegionKind::Translate))
        throw std::invalid_argument("crossing needs a rectangular region");
    if (!config.window().contains(box)) throw std::invalid_argument("box is not inside the configuration window");
    return *rect;
}

bool horizontalCrossing(const View& view, const Rect& r, CrossingVariant variant) {
    if (r.width() < 2) throw std::invalid_argument("crossing box needs at least two columns");
    Grid seen(r);
    std::deque<SiteCoord> queue;

    if (variant == CrossingVariant::Standard) {
        for (int y = r.y0; y <= r.y1; ++y) {
            seen.at({r.x0, y}) = 1;
            queue.push_back({r.x0, y});
        }
        while (!queue.empty()) {
            const SiteCoord v = queue.front();
            queue.pop_front();
            if (v.x == r.x1) return true;
            for (const auto& d : kSteps) {
                const SiteCoord w = v + d;
                if (!r.contains(w) || seen.at(w) || !view.open(v, w)) continue;
                seen.at(w) = 1;
                queue.push_back(w);
            }
        }
        return false;
    }

    // Strict: endpoints on the left/right sides, everything else strictly inside.
    const Rect inner{r.x0 + 1, r.y0 + 1, r.x1 - 1, r.y1 - 1};
    for (int y = r.y0; y <= r.y1; ++y) {
        const SiteCoord v{r.x0, y};
        for (const auto& d : kSteps) {
            const SiteCoord w = v + d;
            if (!r.contains(w) || !view.open(v, w)) continue;
            if (w.x == r.x1) return true;
            if (inner.contains(w) && !seen.at(w)) {
                seen.at(w) = 1;
                queue.push_back(w);
            }
        }
    }
    while (!queue.empty()) {
        const SiteCoord v = queue.front();
        queue.pop_front();
        for (const auto& d : kSteps) {
            const SiteCoord w = v + d;
            if (!r.contains(w) || !view.open(v, w)) continue;
            if (w.x == r.x1) return true;
            if (inner.contains(w) && !seen.at(w)) {
                seen.at(w) = 1;
                queue.push_back(w);
            }
        }
    }
    return false;
}

// Closed-dual path from the row of faces below the box to the row above it.
// Faces are named by their lower-left corner.
bool dualVerticalCrossing(const View& view, const Rect& r) {
    if (r.width() < 2) throw std::invalid_argument("dual crossing box needs at least two columns");
    const Rect faces{r.x0, r.y0 - 1, r.x1 - 1, r.y1};
    Grid seen(faces);
    std::deque<SiteCoord> queue;
    for (int fx = faces.x0; fx <= faces.x1; ++fx) {
        seen.at({fx, faces.y0}) = 1;
        queue.push_back({fx, faces.y0});
    }
    while (!queue.empty()) {
        const SiteCoord f = queue.front();
        queue.pop_front();
        if (f.y == faces.y1) return true;
        for (const auto& d : kSteps) {
            const SiteCoord g = f + d;
            if (!faces.contains(g) || seen.at(g)) continue;
            const EdgeId e = crossedEdge(f, d);
            // Only primal edges of the box may be crossed.
            if (!r.contains(e.site) || !r.contains(e.other())) continue;
            if (!view.dualOpen(e)) continue;
            seen.at(g) = 1;
            queue.push_back(g);
        }
    }
    return false;
}

/// Faces reachable from outside the annulus through dual edges that do not
/// cross an open edge of E(annulus).
Grid exploreFromOutside(const Configuration& config, const Region& annulus, const Rect& outer) {
    const Rect faces{outer.x0 - 1, outer.y0 - 1, outer.x1, outer.y1};
    Grid reached(faces);
    std::deque<SiteCoord> queue;
    for (int fy = faces.y0; fy <= faces.y1; ++fy) {
        for (int fx = faces.x0; fx <= faces.x1; ++fx) {
            if (fx != faces.x0 && fx != faces.x1 && fy != faces.y0 && fy != faces.y1) continue;
            reached.at({fx, fy}) = 1;
            queue.push_back({fx, fy});
        }
    }
    while (!queue.empty()) {
        const SiteCoord f = queue.front();
        queue.pop_front();
        for (const auto& d : kSteps) {
            const SiteCoord g = f + d;
            if (!faces.contains(g) || reached.at(g)) continue;
            const EdgeId e = crossedEdge(f, d);
            if (annulus.containsEdge(e) && config.isOpen(e)) continue;
            reached.at(g) = 1;
            queue.push_back(g);
        }
    }
    return reached;
}

AnnulusShape requireAnnulus(const Configuration& config, const Region& annulus) {
    const auto shape = annulus.annulusShape();
    if (!shape) throw std::invalid_argument("region is not an annulus");
    if (!config.window().contains(annulus)) throw std::invalid_argument("annulus is not inside the configuration window");
    return *shape;
}

/// Walks a set of undirected unit segments in which every vertex has degree 2,
/// starting at the row-major smallest vertex and leaving it along +x.
std::vector<SiteCoord> walkCycle(const std::vector<std::pair<SiteCoord, SiteCoord>>& segments) {
    std::map<SiteCoord, std::vector<SiteCoord>> adjacency;
    for (const auto& [a, b] : segments) {
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    }
    for (const auto& [v, nbrs] : adjacency)
        if (nbrs.size() != 2) throw std::logic_error("contour is not a simple cycle");
    const SiteCoord start = adjacency.begin()->first;
    const auto& first = adjacency.begin()->second;
    SiteCoord next = first[0].x > start.x ? first[0] : first[1];
    std::vector<SiteCoord> cycle{start};
    SiteCoord prev = start;
    while (next != start) {
        cycle.push_back(next);
        const auto& nbrs = adjacency[next];
        const SiteCoord after = nbrs[0] == prev ? nbrs[1] : nbrs[0];
        prev = next;
        next = after;
    }
    if (cycle.size() != adjacency.size()) throw std::logic_error("contour has more than one component");
    return cycle;
}

bool adjacent(SiteCoord a, SiteCoord b) {
    const int dx = a.x - b.x, dy = a.y - b.y;
    return (dx == 0 && (dy == 1 || dy == -1)) || (dy == 0 && (dx == 1 || dx == -1));
}

}  // namespace

Circuit::Circuit(Lattice lattice, std::vector<SiteCoord> cyclic) : lattice_(lattice), sites_(std::move(cyclic)) {
    if (sites_.size() < 4) throw std::invalid_argument("a circuit needs at least 4 sites");
    {
        auto sorted = sites_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("circuit repeats a site");
    }
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        const SiteCoord a = sites_[i];
        const SiteCoord b = sites_[(i + 1) % sites_.size()];
        if (!adjacent(a, b)) throw std::invalid_argument("consecutive circuit sites are not adjacent");
        const EdgeId segment = EdgeId::between(a, b);
        if (lattice_ == Lattice::Primal) {
            edges_.push_back(segment);
        } else {
            // The dual segment from face a to face b crosses one primal edge.
            const SiteCoord lo = segment.site;
            edges_.push_back(crossedEdge(lo, segment.orientation == Orientation::Horizontal ? SiteCoord{1, 0}
                                                                                           : SiteCoord{0, 1}));
        }
    }
    std::sort(edges_.begin(), edges_.end());

    // Ray casting to the right along each row. A vertical primal segment
    // (x, y)-(x, y+1) meets row y only (half-open rule); a vertical dual
    // segment between faces (x, y-1) and (x, y) sits at x + 1/2 on row y.
    Rect hull{};
    for (const auto& v : sites_) hull = hull.hull(Rect{v.x, v.y, v.x, v.y});
    std::map<int, std::vector<int>> crossings;  // row -> crossing abscissae (exclusive bound)
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        const SiteCoord a = sites_[i];
        const SiteCoord b = sites_[(i + 1) % sites_.size()];
        if (a.x != b.x) continue;
        const int lowY = std::min(a.y, b.y);
        if (lattice_ == Lattice::Primal) {
            crossings[lowY].push_back(a.x);      // site px is left of it iff px < a.x
        } else {
            crossings[lowY + 1].push_back(a.x + 1);  // x + 1/2 > px iff px < x + 1
        }
    }
    std::vector<SiteCoord> inside;
    const Region onCircuit = lattice_ == Lattice::Primal ? Region::fromSites(sites_) : Region{};
    for (auto& [row, xs] : crossings) {
        std::sort(xs.begin(), xs.end());
        for (int px = hull.x0; px <= hull.x1 + 1; ++px) {
            const SiteCoord v{px, row};
            if (onCircuit.contains(v)) continue;
            const auto right = xs.end() - std::upper_bound(xs.begin(), xs.end(), px);
            if (right % 2 == 1) inside.push_back(v);
        }
    }
    interior_ = Region::fromSites(inside);
}

Region Circuit::siteRegion() const {
    if (lattice_ != Lattice::Primal) throw std::logic_error("dual circuits have no primal sites");
    return Region::fromSites(sites_);
}

void Circuit::write(std::ostream& out) const {
    for (const auto& v : sites_) out << v.x << ' ' << v.y << '\n';
}

Circuit Circuit::read(std::istream& in, Lattice lattice) {
    std::vector<SiteCoord> sites;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        SiteCoord v;
        if (!(ls >> v.x >> v.y)) throw std::invalid_argument("malformed circuit line: " + line);
        sites.push_back(v);
    }
    return Circuit(lattice, std::move(sites));
}

bool hasHorizontalCrossing(const Configuration& config, const Region& box, CrossingVariant variant) {
    const Rect r = requireRect(config, box);
    return horizontalCrossing(View(config, false), r, variant);
}

bool hasVerticalCrossing(const Configuration& config, const Region& box, CrossingVariant variant) {
    const Rect r = requireRect(config, box);
    const View view(config, true);
    return horizontalCrossing(view, view.rect(r), variant);
}

bool hasDualCrossing(const Configuration& config, const Region& box, Direction direction) {
    const Rect r = requireRect(config, box);
    const View view(config, direction == Direction::Horizontal);
    return dualVerticalCrossing(view, view.rect(r));
}

bool hasOpenCircuitInAnnulus(const Configuration& config, const Region& annulus) {
    const AnnulusShape shape = requireAnnulus(config, annulus);
    const Grid outside = exploreFromOutside(config, annulus, shape.outer);
    return outside.at({shape.inner.x0, shape.inner.y0}) == 0;
}

std::optional<Circuit> outermostOpenCircuit(const Configuration& config, const Region& annulus) {
    const AnnulusShape shape = requireAnnulus(config, annulus);
    const Grid outside = exploreFromOutside(config, annulus, shape.outer);
    const SiteCoord hole{shape.inner.x0, shape.inner.y0};
    if (outside.at(hole)) return std::nullopt;

    // Faces enclosed together with the hole face.
    Grid enclosed(outside.frame());
    std::deque<SiteCoord> queue{hole};
    enclosed.at(hole) = 1;
    while (!queue.empty()) {
        const SiteCoord f = queue.front();
        queue.pop_front();
        for (const auto& d : kSteps) {
            const SiteCoord g = f + d;
            if (!enclosed.inside(g) || enclosed.at(g) || outside.at(g)) continue;
            enclosed.at(g) = 1;
            queue.push_back(g);
        }
    }
    std::vector<std::pair<SiteCoord, SiteCoord>> contour;
    const Rect& frame = enclosed.frame();
    for (int fy = frame.y0; fy <= frame.y1; ++fy) {
        for (int fx = frame.x0; fx <= frame.x1; ++fx) {
            const SiteCoord f{fx, fy};
            if (!enclosed.at(f)) continue;
            for (const auto& d : kSteps) {
                const SiteCoord g = f + d;
                if (enclosed.inside(g) && enclosed.at(g)) continue;
                contour.push_back(crossedEdge(f, d).endpoints());
            }
        }
    }
    return Circuit(Lattice::Primal, walkCycle(contour));
}

std::optional<Circuit> innermostClosedDualCircuit(const Configuration& config, const Region& annulus) {
    const AnnulusShape shape = requireAnnulus(config, annulus);
    const Rect& outer = shape.outer;
    const Rect& hole = shape.inner;
    auto faceInAnnulus = [&](SiteCoord f) {
        const Rect corners{f.x, f.y, f.x + 1, f.y + 1};
        return outer.contains(corners) && !hole.contains(corners);
    };
    auto passable = [&](const EdgeId& e) {
        if (config.isOpen(e)) return true;
        const auto [f1, f2] = adjacentFaces(e);
        return !(faceInAnnulus(f1) && faceInAnnulus(f2));
    };

    // Primal sites reachable from the hole without crossing a closed dual edge of the annulus.
    const Rect frame = outer.expanded(1);
    Grid reached(frame);
    std::deque<SiteCoord> queue;
    for (int y = hole.y0; y <= hole.y1; ++y)
        for (int x = hole.x0; x <= hole.x1; ++x) {
            reached.at({x, y}) = 1;
            queue.push_back({x, y});
        }
    while (!queue.empty()) {
        const SiteCoord v = queue.front();
        queue.pop_front();
        if (!outer.contains(v)) return std::nullopt;
        for (const auto& d : kSteps) {
            const SiteCoord w = v + d;
            if (!frame.contains(w) || reached.at(w)) continue;
            if (!passable(EdgeId::between(v, w))) continue;
            reached.at(w) = 1;
            queue.push_back(w);
        }
    }

    // Fill: everything not connected to the frame border through unreached sites.
    Grid far(frame);
    for (int y = frame.y0; y <= frame.y1; ++y)
        for (int x = frame.x0; x <= frame.x1; ++x)
            if ((x == frame.x0 || x == frame.x1 || y == frame.y0 || y == frame.y1)) {
                far.at({x, y}) = 1;
                queue.push_back({x, y});
            }
    while (!queue.empty()) {
        const SiteCoord v = queue.front();
        queue.pop_front();
        for (const auto& d : kSteps) {
            const SiteCoord w = v + d;
            if (!frame.contains(w) || far.at(w) || reached.at(w)) continue;
            far.at(w) = 1;
            queue.push_back(w);
        }
    }
    std::vector<std::pair<SiteCoord, SiteCoord>> contour;
    for (int y = frame.y0; y <= frame.y1; ++y) {
        for (int x = frame.x0; x <= frame.x1; ++x) {
            const SiteCoord v{x, y};
            if (far.at(v)) continue;
            for (const auto& d : kSteps) {
                const SiteCoord w = v + d;
                if (!far.at(w)) continue;
                contour.push_back(adjacentFaces(EdgeId::between(v, w)));
            }
        }
    }
    return Circuit(Lattice::Dual, walkCycle(contour));
}

std::optional<std::vector<SiteCoord>> findOpenPath(const Configuration& config, const Region& region,
                                                   std::span<const SiteCoord> from, const Region& to) {
    if (region.empty()) return std::nullopt;
    const Rect& frame = region.bounds();
    Grid seen(frame);
    std::map<SiteCoord, SiteCoord> parent;
    std::deque<SiteCoord> queue;
    for (const auto& v : from) {
        if (!region.contains(v) || seen.at(v)) continue;
        seen.at(v) = 1;
        queue.push_back(v);
    }
    while (!queue.empty()) {
        const SiteCoord v = queue.front();
        queue.pop_front();
        if (to.contains(v)) {
            std::vector<SiteCoord> path{v};
            for (auto it = parent.find(v); it != parent.end(); it = parent.find(it->second)) path.push_back(it->second);
            std::reverse(path.begin(), path.end());
            return path;
        }
        for (const auto& d : kSteps) {
            const SiteCoord w = v + d;
            if (!region.contains(w) || seen.at(w)) continue;
            if (!config.isOpen(EdgeId::between(v, w))) continue;
            seen.at(w) = 1;
            parent.emplace(w, v);
            queue.push_back(w);
        }
    }
    return std::nullopt;
}

SiteCoord transformed(SiteCoord v, int symmetry) {
    if (symmetry < 0 || symmetry > 7) throw std::invalid_argument("symmetry index must lie in [0, 7]");
    if (symmetry >= 4) v.x = -v.x;
    for (int k = 0; k < symmetry % 4; ++k) v = {-v.y, v.x};
    return v;
}

namespace {
Rect transformedRect(const Rect& r, int symmetry) {
    const SiteCoord a = transformed({r.x0, r.y0}, symmetry);
    const SiteCoord b = transformed({r.x1, r.y1}, symmetry);
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x), std::max(a.y, b.y)};
}
}  // namespace

Region transformed(const Region& region, int symmetry) {
    if (const auto shape = region.annulusShape())
        return Region::annulus(transformedRect(shape->outer, symmetry), transformedRect(shape->inner, symmetry));
    if (const auto rect = region.rectShape()) return Region::rectangle(transformedRect(*rect, symmetry));
    std::vector<SiteCoord> sites;
    for (const auto& v : region.sites()) sites.push_back(transformed(v, symmetry));
    return Region::fromSites(sites);
}

Configuration transformed(const Configuration& config, int symmetry) {
    Configuration out(transformed(config.window(), symmetry));
    for (const auto& e : config.edges()) {
        if (!config.isOpen(e)) continue;
        out.set(EdgeId::between(transformed(e.site, symmetry), transformed(e.other(), symmetry)), true);
    }
    return out;
}

}  // namespace critperc
