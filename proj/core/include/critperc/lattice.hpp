#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "critperc/rng.hpp"

namespace critperc {

struct SiteCoord {
    int x = 0;
    int y = 0;

    friend bool operator==(const SiteCoord&, const SiteCoord&) = default;
    // Row-major order: (y, x).
    friend std::strong_ordering operator<=>(const SiteCoord& a, const SiteCoord& b) {
        if (auto c = a.y <=> b.y; c != 0) return c;
        return a.x <=> b.x;
    }

    SiteCoord operator+(const SiteCoord& o) const { return {x + o.x, y + o.y}; }
};

/// Max-norm distance from the origin.
inline int normInf(const SiteCoord& v) {
    const int ax = v.x < 0 ? -v.x : v.x;
    const int ay = v.y < 0 ? -v.y : v.y;
    return ax > ay ? ax : ay;
}

enum class Orientation : std::uint8_t { Horizontal = 0, Vertical = 1 };

/// An edge of Z^2 named by its lower-left endpoint. A horizontal edge joins
/// site and site+(1,0); a vertical one joins site and site+(0,1).
struct EdgeId {
    SiteCoord site;
    Orientation orientation = Orientation::Horizontal;

    SiteCoord other() const {
        return orientation == Orientation::Horizontal ? SiteCoord{site.x + 1, site.y}
                                                      : SiteCoord{site.x, site.y + 1};
    }
    std::pair<SiteCoord, SiteCoord> endpoints() const { return {site, other()}; }

    /// Inverse of endpoints(); throws if a and b are not nearest neighbours.
    static EdgeId between(SiteCoord a, SiteCoord b);

    /// 64-bit key used to draw the edge's state; depends on global
    /// coordinates only, so nested windows see the same edge states.
    std::uint64_t key() const {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(site.x)) << 33) ^
               (static_cast<std::uint64_t>(static_cast<std::uint32_t>(site.y)) << 1) ^
               static_cast<std::uint64_t>(orientation);
    }

    friend bool operator==(const EdgeId&, const EdgeId&) = default;
    friend std::strong_ordering operator<=>(const EdgeId& a, const EdgeId& b) {
        if (auto c = a.site <=> b.site; c != 0) return c;
        return a.orientation <=> b.orientation;
    }
};

/// Closed integer rectangle [x0, x1] x [y0, y1]; empty when x1 < x0 or y1 < y0.
struct Rect {
    int x0 = 0;
    int y0 = 0;
    int x1 = -1;
    int y1 = -1;

    static Rect box(int n, SiteCoord center = {}) {
        return {center.x - n, center.y - n, center.x + n, center.y + n};
    }

    bool empty() const { return x1 < x0 || y1 < y0; }
    int width() const { return empty() ? 0 : x1 - x0 + 1; }
    int height() const { return empty() ? 0 : y1 - y0 + 1; }
    std::size_t area() const { return static_cast<std::size_t>(width()) * static_cast<std::size_t>(height()); }
    bool contains(SiteCoord v) const { return v.x >= x0 && v.x <= x1 && v.y >= y0 && v.y <= y1; }
    bool contains(const Rect& r) const {
        return r.empty() || (!empty() && r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1);
    }
    Rect translated(int dx, int dy) const { return {x0 + dx, y0 + dy, x1 + dx, y1 + dy}; }
    Rect expanded(int k) const { return {x0 - k, y0 - k, x1 + k, y1 + k}; }
    Rect hull(const Rect& o) const;
    Rect intersect(const Rect& o) const;

    friend bool operator==(const Rect&, const Rect&) = default;
};

enum class RegionKind { Empty, Box, Rectangle, Annulus, Translate, Union, Difference, Sites };

/// Outer rectangle minus inner rectangle, inner strictly inside outer.
struct AnnulusShape {
    Rect outer;
    Rect inner;
};

/// A finite set of sites of Z^2 with the boundary/interior/edge-set queries
/// used throughout. Immutable after construction.
class Region {
public:
    Region() = default;

    static Region box(int n, SiteCoord center = {});
    static Region rectangle(int x0, int x1, int y0, int y1);
    static Region rectangle(const Rect& r) { return rectangle(r.x0, r.x1, r.y0, r.y1); }
    /// Box of half-width outerN minus box of half-width innerN, same center.
    static Region annulus(int outerN, int innerN, SiteCoord center = {});
    static Region annulus(const Rect& outer, const Rect& inner);
    static Region fromSites(const std::vector<SiteCoord>& sites);

    Region translated(int dx, int dy) const;
    Region unite(const Region& other) const;
    Region minus(const Region& other) const;

    RegionKind kind() const { return kind_; }
    const std::vector<int>& parameters() const { return params_; }
    std::string describe() const;

    const Rect& bounds() const { return bounds_; }
    bool empty() const { return count_ == 0; }
    std::size_t size() const { return count_; }
    bool contains(SiteCoord v) const {
        return bounds_.contains(v) && mask_[slot(v)] != 0;
    }
    bool contains(const Region& other) const;
    bool containsEdge(const EdgeId& e) const { return contains(e.site) && contains(e.other()); }

    /// Sites in row-major (y, x) order.
    std::vector<SiteCoord> sites() const;
    /// E(R): edges with both endpoints in R, sorted by (y, x, orientation).
    std::vector<EdgeId> edges() const;
    Region boundary() const;
    Region interior() const;
    bool onBoundary(SiteCoord v) const;

    /// Set when the region is an axis-aligned rectangle (box, rectangle, or a translate of one).
    std::optional<Rect> rectShape() const { return rect_; }
    /// Set when the region is an annulus (or a translate of one).
    std::optional<AnnulusShape> annulusShape() const { return annulus_; }

    friend bool operator==(const Region& a, const Region& b);

private:
    std::size_t slot(SiteCoord v) const {
        return static_cast<std::size_t>(v.y - bounds_.y0) * static_cast<std::size_t>(bounds_.width()) +
               static_cast<std::size_t>(v.x - bounds_.x0);
    }
    static Region fromMask(RegionKind kind, std::vector<int> params, const Rect& frame,
                           std::vector<std::uint8_t> mask);

    RegionKind kind_ = RegionKind::Empty;
    std::vector<int> params_;
    Rect bounds_;
    std::vector<std::uint8_t> mask_;
    std::size_t count_ = 0;
    std::optional<Rect> rect_;
    std::optional<AnnulusShape> annulus_;
};

enum class EdgeState : std::uint8_t { Closed = 0, Open = 1 };

/// Open/closed state for every edge of E(window). A dual edge is usable
/// exactly when the primal edge it crosses is closed.
class Configuration {
public:
    explicit Configuration(Region window, EdgeState fill = EdgeState::Closed);

    const Region& window() const { return window_; }

    bool contains(const EdgeId& e) const { return window_.containsEdge(e); }
    /// False for edges outside E(window).
    bool isOpen(const EdgeId& e) const {
        return contains(e) && states_[slot(e)] != 0;
    }
    /// Dual edge crossing e is usable iff e is a window edge in the closed state.
    bool dualOpen(const EdgeId& e) const { return contains(e) && states_[slot(e)] == 0; }
    void set(const EdgeId& e, bool open);
    void flip(const EdgeId& e) { set(e, !isOpen(e)); }

    std::size_t edgeCount() const { return edgeCount_; }
    std::size_t openCount() const;
    std::vector<EdgeId> edges() const { return window_.edges(); }

    /// Snapshot: one line per edge `x y o|v state`, sorted by (y, x, orientation).
    void writeSnapshot(std::ostream& out) const;
    static Configuration readSnapshot(std::istream& in, const Region& window);

    friend bool operator==(const Configuration& a, const Configuration& b);

private:
    std::size_t slot(const EdgeId& e) const {
        const Rect& f = window_.bounds();
        return (static_cast<std::size_t>(e.site.y - f.y0) * static_cast<std::size_t>(f.width()) +
                static_cast<std::size_t>(e.site.x - f.x0)) * 2 +
               static_cast<std::size_t>(e.orientation);
    }

    Region window_;
    std::vector<std::uint8_t> states_;
    std::size_t edgeCount_ = 0;
};

/// Edge state drawn from the counter-based stream; the state of an edge is
/// the same whichever window it is sampled in.
class EdgeSampler {
public:
    EdgeSampler(double p, const RngSpec& rng) : threshold_(p), key_(streamKey(rng)) {}
    bool open(const EdgeId& e) const { return threshold_.accept(counterWord(key_, e.key())); }

private:
    BernoulliThreshold threshold_;
    std::uint64_t key_;
};

Configuration sampleConfiguration(const Region& window, double p, const RngSpec& rng);

/// Keeps the states of E(inner) and sets every other edge of the window to `state`.
Configuration completeOutside(const Configuration& config, const Region& inner, EdgeState state);

/// Configuration on `target` carrying the states of E(inner) from `config`
/// and `state` on every other edge of E(target). inner must lie in both windows.
Configuration restrictAndExtend(const Configuration& config, const Region& inner, const Region& target,
                                EdgeState state);

}  // namespace critperc
