#include "critperc/lattice.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace critperc {

EdgeId EdgeId::between(SiteCoord a, SiteCoord b) {
    if (b < a) std::swap(a, b);
    if (a.y == b.y && b.x == a.x + 1) return {a, Orientation::Horizontal};
    if (a.x == b.x && b.y == a.y + 1) return {a, Orientation::Vertical};
    throw std::invalid_argument("sites are not nearest neighbours");
}

Rect Rect::hull(const Rect& o) const {
    if (empty()) return o;
    if (o.empty()) return *this;
    return {std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1), std::max(y1, o.y1)};
}

Rect Rect::intersect(const Rect& o) const {
    return {std::max(x0, o.x0), std::max(y0, o.y0), std::min(x1, o.x1), std::min(y1, o.y1)};
}

Region Region::fromMask(RegionKind kind, std::vector<int> params, const Rect& frame,
                        std::vector<std::uint8_t> mask) {
    // Shrink the frame to the occupied bounding box.
    Rect tight{};
    std::size_t count = 0;
    for (int y = frame.y0; y <= frame.y1; ++y) {
        for (int x = frame.x0; x <= frame.x1; ++x) {
            const std::size_t i = static_cast<std::size_t>(y - frame.y0) * static_cast<std::size_t>(frame.width()) +
                                  static_cast<std::size_t>(x - frame.x0);
            if (mask[i] == 0) continue;
            ++count;
            tight = tight.hull(Rect{x, y, x, y});
        }
    }
    Region r;
    r.kind_ = count == 0 ? RegionKind::Empty : kind;
    r.params_ = std::move(params);
    r.count_ = count;
    r.bounds_ = tight;
    if (count == 0) return r;
    if (tight == frame) {
        r.mask_ = std::move(mask);
    } else {
        r.mask_.assign(tight.area(), 0);
        for (int y = tight.y0; y <= tight.y1; ++y)
            for (int x = tight.x0; x <= tight.x1; ++x)
                r.mask_[r.slot({x, y})] =
                    mask[static_cast<std::size_t>(y - frame.y0) * static_cast<std::size_t>(frame.width()) +
                         static_cast<std::size_t>(x - frame.x0)];
    }
    if (count == tight.area()) r.rect_ = tight;
    return r;
}

Region Region::box(int n, SiteCoord center) {
    if (n < 0) throw std::invalid_argument("box size must be non-negative");
    Region r = rectangle(Rect::box(n, center));
    r.kind_ = RegionKind::Box;
    r.params_ = {n, center.x, center.y};
    return r;
}

Region Region::rectangle(int x0, int x1, int y0, int y1) {
    if (x1 < x0 || y1 < y0) throw std::invalid_argument("rectangle has negative extent");
    Region r;
    r.kind_ = RegionKind::Rectangle;
    r.params_ = {x0, x1, y0, y1};
    r.bounds_ = {x0, y0, x1, y1};
    r.count_ = r.bounds_.area();
    r.mask_.assign(r.count_, 1);
    r.rect_ = r.bounds_;
    return r;
}

Region Region::annulus(int outerN, int innerN, SiteCoord center) {
    if (innerN < 0 || outerN <= innerN)
        throw std::invalid_argument("annulus needs 0 <= inner < outer");
    Region r = annulus(Rect::box(outerN, center), Rect::box(innerN, center));
    r.params_ = {outerN, innerN, center.x, center.y};
    return r;
}

Region Region::annulus(const Rect& outer, const Rect& inner) {
    if (outer.empty() || inner.empty()) throw std::invalid_argument("annulus rectangles must be nonempty");
    if (!(inner.x0 > outer.x0 && inner.x1 < outer.x1 && inner.y0 > outer.y0 && inner.y1 < outer.y1))
        throw std::invalid_argument("annulus inner box must lie strictly inside the outer box");
    std::vector<std::uint8_t> mask(outer.area(), 1);
    for (int y = inner.y0; y <= inner.y1; ++y)
        for (int x = inner.x0; x <= inner.x1; ++x)
            mask[static_cast<std::size_t>(y - outer.y0) * static_cast<std::size_t>(outer.width()) +
                 static_cast<std::size_t>(x - outer.x0)] = 0;
    Region r = fromMask(RegionKind::Annulus, {outer.x0, outer.x1, outer.y0, outer.y1, inner.x0, inner.x1, inner.y0, inner.y1},
                        outer, std::move(mask));
    r.annulus_ = AnnulusShape{outer, inner};
    return r;
}

Region Region::fromSites(const std::vector<SiteCoord>& sites) {
    Rect frame{};
    for (const auto& v : sites) frame = frame.hull(Rect{v.x, v.y, v.x, v.y});
    std::vector<std::uint8_t> mask(frame.area(), 0);
    for (const auto& v : sites)
        mask[static_cast<std::size_t>(v.y - frame.y0) * static_cast<std::size_t>(frame.width()) +
             static_cast<std::size_t>(v.x - frame.x0)] = 1;
    return fromMask(RegionKind::Sites, {}, frame, std::move(mask));
}

Region Region::translated(int dx, int dy) const {
    Region r = *this;
    r.kind_ = empty() ? RegionKind::Empty : RegionKind::Translate;
    r.params_ = {dx, dy};
    r.bounds_ = bounds_.translated(dx, dy);
    if (rect_) r.rect_ = rect_->translated(dx, dy);
    if (annulus_) r.annulus_ = AnnulusShape{annulus_->outer.translated(dx, dy), annulus_->inner.translated(dx, dy)};
    return r;
}

Region Region::unite(const Region& other) const {
    const Rect frame = bounds_.hull(other.bounds_);
    std::vector<std::uint8_t> mask(frame.area(), 0);
    for (int y = frame.y0; y <= frame.y1; ++y)
        for (int x = frame.x0; x <= frame.x1; ++x)
            if (contains({x, y}) || other.contains({x, y}))
                mask[static_cast<std::size_t>(y - frame.y0) * static_cast<std::size_t>(frame.width()) +
                     static_cast<std::size_t>(x - frame.x0)] = 1;
    return fromMask(RegionKind::Union, {}, frame, std::move(mask));
}

Region Region::minus(const Region& other) const {
    if (empty()) return *this;
    std::vector<std::uint8_t> mask(bounds_.area(), 0);
    for (int y = bounds_.y0; y <= bounds_.y1; ++y)
        for (int x = bounds_.x0; x <= bounds_.x1; ++x)
            if (contains({x, y}) && !other.contains({x, y})) mask[slot({x, y})] = 1;
    return fromMask(RegionKind::Difference, {}, bounds_, std::move(mask));
}

bool Region::contains(const Region& other) const {
    if (other.empty()) return true;
    if (!bounds_.contains(other.bounds_)) return false;
    if (rect_) return true;
    for (int y = other.bounds_.y0; y <= other.bounds_.y1; ++y)
        for (int x = other.bounds_.x0; x <= other.bounds_.x1; ++x)
            if (other.contains({x, y}) && !contains({x, y})) return false;
    return true;
}

std::string Region::describe() const {
    static constexpr const char* names[] = {"empty", "box", "rectangle", "annulus", "translate", "union", "difference", "sites"};
    std::ostringstream os;
    os << names[static_cast<int>(kind_)] << '(';
    for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? "," : "") << params_[i];
    os << ")[" << count_ << " sites]";
    return os.str();
}

std::vector<SiteCoord> Region::sites() const {
    std::vector<SiteCoord> out;
    out.reserve(count_);
    for (int y = bounds_.y0; y <= bounds_.y1; ++y)
        for (int x = bounds_.x0; x <= bounds_.x1; ++x)
            if (mask_[slot({x, y})]) out.push_back({x, y});
    return out;
}

std::vector<EdgeId> Region::edges() const {
    std::vector<EdgeId> out;
    for (int y = bounds_.y0; y <= bounds_.y1; ++y) {
        for (int x = bounds_.x0; x <= bounds_.x1; ++x) {
            if (!mask_[slot({x, y})]) continue;
            if (contains({x + 1, y})) out.push_back({{x, y}, Orientation::Horizontal});
            if (contains({x, y + 1})) out.push_back({{x, y}, Orientation::Vertical});
        }
    }
    return out;
}

bool Region::onBoundary(SiteCoord v) const {
    if (!contains(v)) return false;
    return !contains({v.x + 1, v.y}) || !contains({v.x - 1, v.y}) || !contains({v.x, v.y + 1}) ||
           !contains({v.x, v.y - 1});
}

Region Region::boundary() const {
    if (empty()) return *this;
    std::vector<std::uint8_t> mask(bounds_.area(), 0);
    for (int y = bounds_.y0; y <= bounds_.y1; ++y)
        for (int x = bounds_.x0; x <= bounds_.x1; ++x)
            if (onBoundary({x, y})) mask[slot({x, y})] = 1;
    return fromMask(RegionKind::Difference, {}, bounds_, std::move(mask));
}

Region Region::interior() const {
    if (empty()) return *this;
    std::vector<std::uint8_t> mask(bounds_.area(), 0);
    for (int y = bounds_.y0; y <= bounds_.y1; ++y)
        for (int x = bounds_.x0; x <= bounds_.x1; ++x)
            if (contains({x, y}) && !onBoundary({x, y})) mask[slot({x, y})] = 1;
    return fromMask(RegionKind::Difference, {}, bounds_, std::move(mask));
}

bool operator==(const Region& a, const Region& b) {
    if (a.count_ != b.count_) return false;
    if (a.count_ == 0) return true;
    return a.bounds_ == b.bounds_ && a.mask_ == b.mask_;
}

Configuration::Configuration(Region window, EdgeState fill) : window_(std::move(window)) {
    states_.assign(window_.bounds().area() * 2, 0);
    const auto edges = window_.edges();
    edgeCount_ = edges.size();
    if (fill == EdgeState::Open)
        for (const auto& e : edges) states_[slot(e)] = 1;
}

void Configuration::set(const EdgeId& e, bool open) {
    if (!contains(e)) throw std::out_of_range("edge outside the configuration window");
    states_[slot(e)] = open ? 1 : 0;
}

std::size_t Configuration::openCount() const {
    // Slots of non-window edges stay 0.
    return static_cast<std::size_t>(std::count(states_.begin(), states_.end(), std::uint8_t{1}));
}

void Configuration::writeSnapshot(std::ostream& out) const {
    for (const auto& e : edges())
        out << e.site.x << ' ' << e.site.y << ' ' << (e.orientation == Orientation::Horizontal ? 'o' : 'v') << ' '
            << (isOpen(e) ? 1 : 0) << '\n';
}

Configuration Configuration::readSnapshot(std::istream& in, const Region& window) {
    Configuration c(window);
    std::size_t seen = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        int x = 0, y = 0, state = 0;
        char o = 0;
        if (!(ls >> x >> y >> o >> state) || (o != 'o' && o != 'v') || (state != 0 && state != 1))
            throw std::invalid_argument("malformed snapshot line: " + line);
        const EdgeId e{{x, y}, o == 'o' ? Orientation::Horizontal : Orientation::Vertical};
        if (!c.contains(e)) throw std::invalid_argument("snapshot edge outside window: " + line);
        c.set(e, state == 1);
        ++seen;
    }
    if (seen != c.edgeCount()) throw std::invalid_argument("snapshot does not cover every window edge");
    return c;
}

bool operator==(const Configuration& a, const Configuration& b) {
    return a.window_ == b.window_ && a.states_ == b.states_;
}

Configuration sampleConfiguration(const Region& window, double p, const RngSpec& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
    Configuration c(window);
    const EdgeSampler sampler(p, rng);
    for (const auto& e : window.edges())
        if (sampler.open(e)) c.set(e, true);
    return c;
}

Configuration restrictAndExtend(const Configuration& config, const Region& inner, const Region& target,
                                EdgeState state) {
    if (!config.window().contains(inner)) throw std::invalid_argument("inner region is not inside the window");
    if (!target.contains(inner)) throw std::invalid_argument("inner region is not inside the target window");
    Configuration out(target, state);
    for (const auto& e : inner.edges()) out.set(e, config.isOpen(e));
    return out;
}

Configuration completeOutside(const Configuration& config, const Region& inner, EdgeState state) {
    return restrictAndExtend(config, inner, config.window(), state);
}

}  // namespace critperc
