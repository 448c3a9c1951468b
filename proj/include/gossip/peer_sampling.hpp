#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gossip/graph.hpp"
#include "gossip/learning.hpp"
#include "gossip/model_vector.hpp"
#include "gossip/rng.hpp"

namespace gossip {

// Which view-maintenance rule honest nodes run.
enum class SamplerKind {
    HistoryAware,     // slot argmin over the full identifier history
    StreamBaseline,   // slot argmin over current stream + occupants only
};

struct PushMessage {
    NodeId sender = 0;
    std::vector<NodeId> ids;
};

struct PullResponse {
    NodeId responder = 0;
    std::vector<NodeId> ids;
};

struct SeedRefreshPolicy {
    int interval = 1;          // rounds between refresh events (pi)
    int seeds_per_refresh = 10;
};

// One participant: identity, sampling state, and learning state.
struct NodeState {
    NodeId id = 0;
    Role role = Role::Honest;
    History history;
    std::vector<RankingSeed> seeds;
    View view;
    ModelVector model;
    TrainerState trainer;
    std::uint32_t rotate_cursor = 0;  // baseline round-robin position
};

// Union the incoming identifiers into the node's history (self excluded).
void accumulate_history(NodeState& node, std::span<const NodeId> incoming);

// History-aware round: absorb incoming ids, then recompute every slot as
// the rank-argmin over the whole history. Seed refresh is applied by the
// caller beforehand (per round ordering).
void history_round(NodeState& node, std::span<const NodeId> incoming);

// If t is a refresh round (t mod interval == 0), re-seed
// `seeds_per_refresh` uniformly chosen distinct slots.
void refresh_seeds(NodeState& node, int t, const SeedRefreshPolicy& policy,
                   Rng& rng);

// Baseline round: candidate pool is only this round's incoming ids plus
// the current occupants (no history). Every `interval` rounds,
// `seeds_per_refresh` slots are re-seeded round-robin.
void baseline_round(NodeState& node, std::span<const NodeId> incoming, int t,
                    const SeedRefreshPolicy& policy, Rng& rng);

}  // namespace gossip
