#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gossip/graph.hpp"

namespace gossip {

// One CSV row of the run output.
struct RoundMetrics {
    int round = 0;
    double f_in_out = 0;   // Byzantine slot fraction over honest out-views
    double f_in_in = 0;    // Byzantine share of honest in-edges
    double byz_bound = 0;  // analytic B(t)
    double threshold = 0;  // effective filtering threshold used
    double hssr = 0;
    double f1_mean = 0;
    double f1_std = 0;
    long long messages_sent = 0;
};

// Mean over honest nodes of (Byzantine slots) / v; duplicate slots count
// per slot.
double byz_fraction_out(const RoundGraph& graph,
                        std::span<const Role> roles);

// Per honest node: Byzantine share of edges pointing at it (per-slot);
// nodes with no in-edges contribute 0.
double byz_fraction_in(const RoundGraph& graph, std::span<const Role> roles);

// Size of the largest strongly connected component (iterative Tarjan).
std::size_t largest_scc(const std::vector<std::vector<int>>& adj);

// |largest SCC of the honest-induced out-link subgraph| / |honest|.
double hssr(const RoundGraph& graph, std::span<const Role> roles);

// Arithmetic mean and population standard deviation.
std::pair<double, double> mean_std(std::span<const double> values);

}  // namespace gossip
