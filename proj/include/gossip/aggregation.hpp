#pragma once

#include <span>
#include <vector>

#include "gossip/graph.hpp"
#include "gossip/model_vector.hpp"

namespace gossip {

enum class AggregatorKind { PlainAverage, GTS, CS, CWTM };

// Difference of a received model against the local one, tagged with its
// mixing weight. norm caches the Euclidean norm of z.
struct NeighborDifference {
    NodeId source = 0;
    ModelVector z;
    double norm = 0;
    double weight = 0;
};

struct ReceivedModel {
    NodeId source;
    const ModelVector* model;
    double weight;
};

// z_j = model_j - local for every received model, sorted by norm
// descending; equal norms order by smaller source id. Throws
// DimensionMismatchError on dimension disagreement.
std::vector<NeighborDifference> sort_differences(
    const ModelVector& local, std::span<const ReceivedModel> received);

// Geometric trimmed sum. Removes weight mass b starting from the
// largest-norm difference; the boundary difference keeps the residual
// weight. With unit weights and integer b this drops the b largest-norm
// differences. b >= total weight returns the local model (all trimmed).
ModelVector gts_aggregate(const ModelVector& local,
                          std::span<const NeighborDifference> sorted_diffs,
                          double b);

// Clipped sum. Clips every difference at the largest norm tau such that
// at least 2b weight mass lies at or above tau (with unit weights: the
// ceil(2b)-th largest norm). b == 0 applies no clipping; 2b >= total
// weight returns the local model.
ModelVector cs_aggregate(const ModelVector& local,
                         std::span<const NeighborDifference> sorted_diffs,
                         double b);

// Coordinate-wise trimmed mean over {local} ∪ received: per coordinate,
// drop the b largest and b smallest values, average the rest. Throws
// ThresholdExceedsMassError when 2b >= number of values.
ModelVector cwtm_aggregate(const ModelVector& local,
                           std::span<const ModelVector* const> received,
                           int b);

// Plain weighted gossip average: local + sum of w * z.
ModelVector plain_average(const ModelVector& local,
                          std::span<const NeighborDifference> diffs);

// Post-aggregation gradient step: aggregated - eta * grad.
ModelVector gossip_step(const ModelVector& aggregated,
                        const ModelVector& grad, double eta);

}  // namespace gossip
