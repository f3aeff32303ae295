#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "critperc/clusters.hpp"
#include "critperc/estimate.hpp"
#include "critperc/exact.hpp"
#include "critperc/geometry.hpp"
#include "critperc/topology.hpp"

namespace critperc {

struct CircuitWitness {
    int i = 0;
    int j = 0;
    Circuit circuit;
};

/// Open path inside H_{i,j} (Horizontal) or V_{i,j} (Vertical) joining the
/// widest circuits of the two neighbouring annuli.
struct ConnectionWitness {
    int i = 0;
    int j = 0;
    Direction direction = Direction::Horizontal;
    std::vector<SiteCoord> path;
};

struct EventReport {
    bool holds = false;
    std::vector<CircuitWitness> circuits;
    std::vector<ConnectionWitness> connections;
    /// First unsatisfied condition; empty iff holds.
    std::string failure;
};

/// JSON object {holds, failure, circuits, connections}; circuit and path
/// site lists are included only when `withWitnesses` is set.
std::string toJson(const EventReport& report, bool withWitnesses);

/// Evaluates the restricted event O on W = Λ_{ms} or W = B_{i,j}. Edges
/// outside E(W) are completed to open; every condition whose annulus or
/// corridor meets W is checked on the completed configuration, all others
/// hold automatically. Annulus conditions are checked before corridors, and
/// evaluation stops at the first failure.
EventReport eventO(const Configuration& config, const PartitionSpec& spec, const Region& W);

/// A closed dual circuit exists in A^III_{i,j}.
bool eventG(const Configuration& config, const PartitionSpec& spec, int i, int j);

/// Some cluster of the labeling has size strictly inside (a n^2 piHat, b n^2 piHat).
bool eventD(const ClusterLabeling& labeling, int n, double a, double b, double piHat);

/// Box that the chain of widest circuits and corridor paths always crosses
/// when O^{m,s,t} holds: Λ_{ms-2t+1}.
Region crossingBox(const PartitionSpec& spec);

/// True iff a single open cluster crosses crossingBox(spec) horizontally and
/// vertically (such a cluster is unique). When O^{m,s,t} holds, the cluster
/// must also contain every widest circuit γ_{i,j}; if it does not, the
/// result is false. Clusters are taken inside Λ_n, which must lie in the window.
bool crossingClusterCheck(const Configuration& config, const PartitionSpec& spec, int n);

/// Configuration source for conditional estimates: the edges listed in
/// `variableEdges` are redrawn per sample, all others keep the background
/// state. An empty list redraws every edge of the background window.
struct PartialSampler {
    Configuration background;
    std::vector<EdgeId> variableEdges;
    double p = 0.5;

    Configuration draw(const RngSpec& rng) const;
};

struct ConditionalEstimate {
    static constexpr std::uint64_t kMinimumSupport = 200;

    Estimate estimate;  ///< over accepted samples only
    std::uint64_t attempts = 0;

    bool insufficientSupport() const { return estimate.samples < kMinimumSupport; }
};

/// E[C~(A'_{i,j}) | O_{i,j}, γ_{i,j} = gamma] by rejection sampling with
/// `budget` attempts.
ConditionalEstimate nicenessExpectation(const Circuit& gamma, const PartitionSpec& spec, int i, int j,
                                        const PartialSampler& sampler, std::uint64_t budget, const RngSpec& rng,
                                        unsigned threads = 1);

/// The same conditional expectation by exhaustive enumeration of the task's
/// variable edges. Throws std::domain_error when the condition is impossible.
ExactValue nicenessExpectationExact(const Circuit& gamma, const PartitionSpec& spec, int i, int j,
                                    const EnumerationTask& task);

}  // namespace critperc
