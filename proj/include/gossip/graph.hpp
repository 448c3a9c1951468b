#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gossip/rng.hpp"

namespace gossip {

// Node identities are dense integer indices in [0, n).
using NodeId = std::uint32_t;

enum class Role : std::uint8_t { Honest, Byzantine };

// Fixed-length out-view; one slot per ranking seed. A node never appears
// in its own view. Duplicate slots only arise under candidate scarcity
// or when independent slot rankings collide.
using View = std::vector<NodeId>;

// Per-slot ranking seed. Seeds change only on refresh events.
struct RankingSeed {
    std::uint64_t value = 0;
    std::uint32_t slot = 0;
};

// Monotonically growing set of identifiers a node has seen, with
// insertion order retained as the ranking tie-break.
class History {
public:
    History() = default;
    explicit History(std::uint32_t universe) : present_(universe, 0) {}

    // Returns true if the id was new.
    bool insert(NodeId id) {
        if (present_[id]) return false;
        present_[id] = 1;
        order_.push_back(id);
        return true;
    }

    bool contains(NodeId id) const { return present_[id] != 0; }
    std::size_t size() const { return order_.size(); }
    std::uint32_t universe() const {
        return static_cast<std::uint32_t>(present_.size());
    }

    // Ids in first-seen order.
    const std::vector<NodeId>& ordered() const { return order_; }

private:
    std::vector<NodeId> order_;
    std::vector<std::uint8_t> present_;
};

// Directed out-link graph induced by all views at a round.
struct RoundGraph {
    int round = 0;
    std::vector<View> out_views;  // indexed by NodeId
};

// Keyed ranking score for min-wise slot selection. Pure function of
// (seed, slot, candidate); stable across platforms.
inline std::uint64_t rank(const RankingSeed& seed, NodeId candidate) {
    std::uint64_t h = mix64(seed.value +
                            0x9e3779b97f4a7c15ULL * (seed.slot + 1ULL));
    return mix64(h ^ (static_cast<std::uint64_t>(candidate) +
                      0x517cc1b727220a95ULL));
}

// Per-slot argmin of rank() over history \ {self}. Ties resolve to the
// earliest-inserted id. Throws EmptyHistoryError when no candidate exists.
View select_view(const History& history, std::span<const RankingSeed> seeds,
                 NodeId self);

// Same argmin rule over an explicit candidate list (first minimum wins);
// used by the history-less baseline sampler. Candidates must not contain
// self and must be non-empty.
View select_view_from_pool(std::span<const NodeId> pool,
                           std::span<const RankingSeed> seeds);

}  // namespace gossip
