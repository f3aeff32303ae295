#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "critperc/lattice.hpp"

namespace critperc {

/// Primal circuits live on Z^2. Dual circuits live on Z^2 + (1/2, 1/2); a
/// dual vertex is stored as the lower-left corner of its face, so the
/// SiteCoord (x, y) stands for the point (x + 1/2, y + 1/2).
enum class Lattice { Primal, Dual };

/// A simple cycle surrounding a bounded set of primal sites.
class Circuit {
public:
    /// Validates adjacency and simplicity; derives interior and edge set.
    Circuit(Lattice lattice, std::vector<SiteCoord> cyclic);

    Lattice lattice() const { return lattice_; }
    const std::vector<SiteCoord>& sites() const { return sites_; }
    std::size_t length() const { return sites_.size(); }
    /// Primal sites in the bounded component of the complement.
    const Region& interior() const { return interior_; }
    /// Primal edges of the circuit, or the primal edges crossed by a dual circuit.
    const std::vector<EdgeId>& edges() const { return edges_; }
    /// Region of the circuit's own sites (primal circuits only).
    Region siteRegion() const;
    bool surrounds(SiteCoord v) const { return interior_.contains(v); }

    /// Dump format: one `x y` pair per line, in cyclic order.
    void write(std::ostream& out) const;
    static Circuit read(std::istream& in, Lattice lattice = Lattice::Primal);

    friend bool operator==(const Circuit& a, const Circuit& b) {
        return a.lattice_ == b.lattice_ && a.sites_ == b.sites_;
    }

private:
    Lattice lattice_;
    std::vector<SiteCoord> sites_;
    Region interior_;
    std::vector<EdgeId> edges_;
};

enum class CrossingVariant {
    /// Every vertex except the two endpoints lies in the interior of the box.
    Strict,
    /// Any open left-to-right path inside the box.
    Standard,
};

enum class Direction { Horizontal, Vertical };

/// Open left-to-right crossing of a rectangular region with at least two columns.
bool hasHorizontalCrossing(const Configuration& config, const Region& box, CrossingVariant variant);
/// Open bottom-to-top crossing of a rectangular region with at least two rows.
bool hasVerticalCrossing(const Configuration& config, const Region& box, CrossingVariant variant);

/// Closed-dual crossing of the dual rectangle matched to `box`. Vertical: from
/// below to above [x0+1/2, x1-1/2] x [y0-1/2, y1+1/2], blocking every standard
/// horizontal open crossing. Horizontal: the transposed statement.
bool hasDualCrossing(const Configuration& config, const Region& box, Direction direction);

/// Open circuit in the annulus (edges of E(annulus)) surrounding its hole.
bool hasOpenCircuitInAnnulus(const Configuration& config, const Region& annulus);

/// The hole-surrounding open circuit whose interior contains that of every
/// other one. Found as the inner contour of the closed-dual region explored
/// from outside the annulus.
std::optional<Circuit> outermostOpenCircuit(const Configuration& config, const Region& annulus);

/// The hole-surrounding closed-dual circuit whose interior is contained in
/// that of every other one. Dual vertices of the annulus are faces with all
/// corners in the outer box and not all corners in the hole.
std::optional<Circuit> innermostClosedDualCircuit(const Configuration& config, const Region& annulus);

/// Shortest open path inside `region` from any site of `from` to any site of
/// `to`, both intersected with the region. Empty optional if none.
std::optional<std::vector<SiteCoord>> findOpenPath(const Configuration& config, const Region& region,
                                                   std::span<const SiteCoord> from, const Region& to);

/// The 8 symmetries of the square fixing the origin: element k applies the
/// reflection x -> -x when k >= 4, then k % 4 quarter turns v -> (-y, x).
SiteCoord transformed(SiteCoord v, int symmetry);
Region transformed(const Region& region, int symmetry);
Configuration transformed(const Configuration& config, int symmetry);

}  // namespace critperc
