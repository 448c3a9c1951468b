#include "gossip/graph.hpp"

#include <limits>

#include "gossip/errors.hpp"

namespace gossip {

View select_view(const History& history, std::span<const RankingSeed> seeds,
                 NodeId self) {
    const auto& candidates = history.ordered();
    bool any = false;
    for (NodeId id : candidates) {
        if (id != self) {
            any = true;
            break;
        }
    }
    if (!any) {
        throw EmptyHistoryError(
            "history holds no candidate besides the node itself (node " +
            std::to_string(self) + ")");
    }

    View view(seeds.size());
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
        NodeId winner = self;
        for (NodeId id : candidates) {
            if (id == self) continue;
            const std::uint64_t score = rank(seeds[k], id);
            if (score < best) {  // strict: earliest insertion wins ties
                best = score;
                winner = id;
            }
        }
        view[k] = winner;
    }
    return view;
}

View select_view_from_pool(std::span<const NodeId> pool,
                           std::span<const RankingSeed> seeds) {
    View view(seeds.size());
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
        NodeId winner = pool.front();
        for (NodeId id : pool) {
            const std::uint64_t score = rank(seeds[k], id);
            if (score < best) {
                best = score;
                winner = id;
            }
        }
        view[k] = winner;
    }
    return view;
}

}  // namespace gossip
