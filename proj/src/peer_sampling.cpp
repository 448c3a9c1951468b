#include "gossip/peer_sampling.hpp"

#include <algorithm>

namespace gossip {

void accumulate_history(NodeState& node, std::span<const NodeId> incoming) {
    for (NodeId id : incoming) {
        if (id == node.id) continue;
        node.history.insert(id);
    }
}

void history_round(NodeState& node, std::span<const NodeId> incoming) {
    accumulate_history(node, incoming);
    node.view = select_view(node.history, node.seeds, node.id);
}

void refresh_seeds(NodeState& node, int t, const SeedRefreshPolicy& policy,
                   Rng& rng) {
    if (policy.seeds_per_refresh <= 0) return;
    if (policy.interval <= 0 || t % policy.interval != 0) return;

    const std::size_t v = node.seeds.size();
    const std::size_t count =
        std::min<std::size_t>(policy.seeds_per_refresh, v);

    // Partial Fisher-Yates over slot indices.
    std::vector<std::uint32_t> slots(v);
    for (std::size_t i = 0; i < v; ++i)
        slots[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rng.below(v - i);
        std::swap(slots[i], slots[j]);
        node.seeds[slots[i]].value = rng.next_u64();
    }
}

void baseline_round(NodeState& node, std::span<const NodeId> incoming, int t,
                    const SeedRefreshPolicy& policy, Rng& rng) {
    if (policy.seeds_per_refresh > 0 && policy.interval > 0 &&
        t % policy.interval == 0) {
        const std::size_t v = node.seeds.size();
        const std::size_t count =
            std::min<std::size_t>(policy.seeds_per_refresh, v);
        for (std::size_t i = 0; i < count; ++i) {
            node.seeds[node.rotate_cursor].value = rng.next_u64();
            node.rotate_cursor =
                static_cast<std::uint32_t>((node.rotate_cursor + 1) % v);
        }
    }

    // Candidate pool: occupants first, then incoming in arrival order.
    // Dedup via a membership mask so argmin ties keep the occupant.
    std::vector<NodeId> pool;
    pool.reserve(node.view.size() + incoming.size());
    std::vector<std::uint8_t> seen(node.history.universe(), 0);
    for (NodeId id : node.view) {
        if (id == node.id || seen[id]) continue;
        seen[id] = 1;
        pool.push_back(id);
    }
    for (NodeId id : incoming) {
        if (id == node.id || seen[id]) continue;
        seen[id] = 1;
        pool.push_back(id);
    }
    if (!pool.empty())
        node.view = select_view_from_pool(pool, node.seeds);
}

}  // namespace gossip
