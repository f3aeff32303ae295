#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "critperc/lattice.hpp"

namespace critperc {

/// (m, s, t): an m x m grid of boxes of half-width s, with annuli and
/// corridors of width t. Requires m odd and 3t <= s.
struct PartitionSpec {
    int m = 1;
    int s = 3;
    int t = 1;

    void validate() const;
    /// Largest index magnitude (m - 1) / 2.
    int halfRange() const { return (m - 1) / 2; }
    bool validIndex(int i, int j) const {
        return i >= -halfRange() && i <= halfRange() && j >= -halfRange() && j <= halfRange();
    }
    friend bool operator==(const PartitionSpec&, const PartitionSpec&) = default;
};

/// Regions attached to cell (i, j); every one is the (0, 0) region shifted by (2is, 2js).
struct CellRegions {
    int i = 0;
    int j = 0;
    Region box;       ///< B = Λ_s
    Region outer;     ///< A^I = Λ_s \ Λ_{s-t}
    Region middle;    ///< A^II = Λ_{s-t} \ Λ_{s-2t}, home of the widest open circuit
    Region inner;     ///< A^III = Λ_{s-2t} \ Λ_{s-3t}
    Region shell;     ///< A' = Λ_s \ Λ_{s-3t}
    Region corridorH; ///< H = [0,4t]x[0,t] + (s-2t, 0), toward cell (i+1, j)
    Region corridorV; ///< V = [0,t]x[0,4t] + (0, s-2t), toward cell (i, j+1)

    SiteCoord center(int s) const { return {2 * i * s, 2 * j * s}; }
};

/// Cell regions for any (i, j), including cells outside the m x m grid.
CellRegions cellRegions(const PartitionSpec& spec, int i, int j);

struct PartitionRegions {
    PartitionSpec spec;
    int n = 0;
    std::vector<CellRegions> cells;  ///< row-major over (j, i)
    Region whole;                    ///< Λ_{ms}
    Region q;                        ///< (Λ_n \ Λ_{ms}) ∪ union of the shells

    const CellRegions& cell(int i, int j) const;
};

PartitionRegions buildPartition(const PartitionSpec& spec, int n);

/// Constants that the construction's inequalities reference but whose values
/// are only known to exist; supplied by configuration or fitted.
struct ConstantsConfig {
    double c10 = 1.0;
    double c15 = 1.0;
    double c17 = 1.0;
    double c18 = 1.0;

    void validate() const;
};

/// A one-arm probability profile n -> π(n).
class PiModel {
public:
    /// π(n) = amplitude * n^(-exponent) for n >= 1, π(0) = 1.
    static PiModel power(double exponent, double amplitude = 1.0);
    /// Log-log interpolation of a table, power-law extrapolation beyond it
    /// using the slope of the last two entries.
    static PiModel table(std::map<int, double> values);
    /// Parses `power:<exponent>[:<amplitude>]`.
    static PiModel parse(const std::string& text);

    double operator()(int n) const;
    /// Decay exponent for power models, or the tail slope for tables.
    double exponent() const;
    std::string describe() const;

private:
    enum class Kind { Power, Table };
    Kind kind_ = Kind::Power;
    double exponent_ = 0.5;
    double amplitude_ = 1.0;
    std::map<int, double> table_;
};

struct ParameterChoice {
    int inverseX = 3;  ///< 1/x, an odd integer
    double epsilon = 1.0 / 16.0;
    int N = 1;

    double x() const { return 1.0 / inverseX; }
    /// Partition used at size n: m = 1/x, s = floor(xn), t = floor(eps*floor(xn)).
    PartitionSpec partitionFor(int n) const;
};

struct NRange {
    int first = 1;
    int last = 1;
};

/// Index (1-3) of the first violated size inequality at n, 4 when
/// n - (1/x) floor(xn) > floor(eps floor(xn)), 5 when floor(eps floor(xn)) < 1,
/// or 0 when everything holds.
int firstViolation(const ParameterChoice& choice, double a, double b, const ConstantsConfig& constants,
                   const PiModel& pi, int n);

struct ParameterSearch {
    std::optional<ParameterChoice> choice;
    /// Human-readable summary; for infeasible searches it names the first
    /// violated inequality of the last candidate examined.
    std::string report;
};

/// Grid search over odd 1/x in {3, ..., 31} and eps = 2^-k (eps < 1/12) for
/// the smallest N such that every n in [N, range.last] satisfies all
/// inequalities, accepting the first candidate with 4N <= range.last.
ParameterSearch chooseParameters(double a, double b, const ConstantsConfig& constants, const PiModel& pi,
                                 const NRange& range);

}  // namespace critperc
