#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "critperc/estimate.hpp"
#include "critperc/lattice.hpp"
#include "critperc/topology.hpp"

namespace critperc {

/// Largest max-norm radius reached by the open cluster of the origin inside
/// Λ_nMax, capped at nMax. Explores lazily, drawing only the edges it visits.
std::uint32_t originRadius(int nMax, double p, const RngSpec& rng);

/// P(O <-> ∂Λ_n inside Λ_n).
Estimate estimatePi(int n, double p, std::uint64_t budget, const RngSpec& rng, const RunOptions& options = {});

/// π(n) for every n in `ns` from one set of samples of originRadius(max ns):
/// O reaches ∂Λ_n inside Λ_n iff its cluster in Λ_nMax reaches radius n.
std::vector<Estimate> estimatePiProfile(const std::vector<int>& ns, double p, std::uint64_t budget,
                                        const RngSpec& rng, const RunOptions& options = {});

/// P(HC(k, l)): open left-right crossing of [0, k] x [0, l].
Estimate estimateHC(int k, int l, double p, CrossingVariant variant, std::uint64_t budget, const RngSpec& rng,
                    const RunOptions& options = {});

struct LengthResult {
    std::optional<int> length;  ///< empty means ">= nMax"
    int nMax = 0;
    /// Crossing estimates for n = 1, 2, ... up to the answer.
    std::vector<Estimate> trace;
    /// Some n had its estimate within 3 standard errors of the threshold.
    bool unresolved = false;

    std::string toString() const;
};

/// L_eps(p): for p < 1/2 the smallest n with P(HC(n,n)) <= eps (strict
/// crossings), for p > 1/2 the smallest n with P(closed dual crossing) <= eps.
/// An n counts only if the estimate is past eps by at least 3 standard errors.
LengthResult estimateCharacteristicLength(double p, double eps, int nMax, std::uint64_t budget, const RngSpec& rng,
                                          const RunOptions& options = {});

struct TheoremOneRow {
    int n = 0;
    Estimate pi;       ///< π(n), from its own stream block
    Estimate inside;   ///< P(M_n in (a n^2 piHat, b n^2 piHat))
    Estimate lower;    ///< same samples, piHat - 2 stderr
    Estimate upper;    ///< same samples, piHat + 2 stderr
};

/// For each n, π̂(n) first, then the interval event for the largest cluster
/// in Λ_n from independent samples.
std::vector<TheoremOneRow> theoremOneExperiment(double a, double b, const std::vector<int>& ns, double p,
                                                std::uint64_t budget, const RngSpec& rng,
                                                const RunOptions& options = {});

struct BoundCheck {
    std::string name;
    bool holds = true;
    std::string detail;
};

struct PiBoundsReport {
    std::vector<int> ns;
    std::vector<Estimate> pi;
    /// Decay exponent: minus the least-squares slope of log π̂(n) against log n.
    double exponent = 0.0;
    std::vector<BoundCheck> checks;

    bool allHold() const;
};

struct PiBoundsOptions {
    /// Largest n for the (iv) check, which labels all of Λ_n per sample.
    int maxBoxForSizeBound = 32;
    /// Half-width of the band allowed for π_p(n)/π(n) in (iii), as a factor
    /// around its value at the smallest n.
    double ratioBand = 2.0;
};

/// Constants of (i), (ii), (iv) are fitted on the smallest n (or pair) and
/// checked on every larger one within 4 standard errors. (iii) runs when
/// p != 1/2 and compares π_p against π at p = 1/2.
PiBoundsReport piBoundsCheck(const std::vector<int>& ns, double p, std::uint64_t budget, const RngSpec& rng,
                             const PiBoundsOptions& bounds = {}, const RunOptions& options = {});

struct YMomentRow {
    int m = 0;
    Estimate pi;
    Estimate y;           ///< Y(m); secondMoment() gives E[Y^2]
    Estimate tail;        ///< P(Y >= c m^2 π̂(m))
    Estimate halfMean;    ///< P(Y >= E[Y]/2)
    double chebyshev = 0; ///< E[Y]^2 / (4 E[Y^2])
};

struct YMomentReport {
    double c = 0.0;
    double floor = 0.2;
    std::vector<YMomentRow> rows;
    bool tailHolds = true;
    bool chebyshevHolds = true;
};

/// c is fitted so that P̂(Y(m0) >= c m0^2 π̂(m0)) is as close to 1/2 from
/// above as the samples allow, m0 the smallest entry of ms.
YMomentReport yMomentCheck(const std::vector<int>& ms, double p, std::uint64_t budget, const RngSpec& rng,
                           double floor = 0.2, const RunOptions& options = {});

struct SmallMaxRow {
    int n = 0;
    Estimate pi;
    Estimate below;  ///< P(M_n < K n^2 π̂(n))
};

struct SmallMaxReport {
    double K = 0.0;
    double floor = 0.1;
    std::vector<SmallMaxRow> rows;
    bool holds = true;
};

SmallMaxReport smallMaxClusterCheck(double K, const std::vector<int>& ns, double p, std::uint64_t budget,
                                    const RngSpec& rng, double floor = 0.1, const RunOptions& options = {});

/// Finite discrete law: (value, probability) pairs.
using DiscreteLaw = std::vector<std::pair<double, double>>;

struct SteeringInstance {
    int k = 1;
    double alpha = 0.0;
    double beta = 1.0;
    std::vector<DiscreteLaw> laws;  ///< one per X_i
    double eta1 = 0.0;
    double eta2 = 0.0;

    /// Throws std::invalid_argument naming the violated hypothesis.
    void validate() const;
    double bound() const;  ///< (eta1 ∧ eta2)^k
    /// k = 2, (alpha, beta) = (1, 3), X_i uniform on {0.4, 0.7}.
    static SteeringInstance demo();
};

/// Random instance satisfying every hypothesis, with product support <= 10^6.
SteeringInstance randomSteeringInstance(StreamRng& rng);

/// Exact P(sum X_i in (alpha, beta)) over the product space.
double steeringOracle(const SteeringInstance& instance);
Estimate steeringSimulate(const SteeringInstance& instance, std::uint64_t budget, const RngSpec& rng,
                          const RunOptions& options = {});

enum class SweepObservable {
    OneArm,              ///< O <-> ∂Λ_n, region Λ_n
    HorizontalCrossing,  ///< standard crossing of [0, k] x [0, l]
};

struct SweepCurve {
    std::vector<double> p;
    std::vector<double> mean;
    std::vector<double> standardError;
    std::uint64_t sweeps = 0;
};

/// Newman-Ziff: each sweep adds the edges in a random order and records the
/// number of open edges at which the (increasing) event first holds; the
/// curve at p is the average binomial tail probability at that count.
/// For OneArm, k is n and l is ignored.
SweepCurve newmanZiffSweep(SweepObservable observable, int k, int l, const std::vector<double>& ps,
                           std::uint64_t sweeps, const RngSpec& rng);

}  // namespace critperc
