#include "gossip/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace gossip {

CollusionOracle build_oracle(std::span<const ModelVector* const> honest) {
    CollusionOracle oracle;
    oracle.honest_mean = mean_of(honest);
    oracle.honest_std = stddev_of(honest);
    oracle.honest_models.assign(honest.begin(), honest.end());
    return oracle;
}

std::vector<FloodMessage> flood_round(NodeId byz,
                                      std::span<const NodeId> honest_neighbors,
                                      FloodForce force,
                                      std::span<const NodeId> byz_ids,
                                      std::size_t view_size, Rng& rng) {
    const std::size_t n_targets = static_cast<std::size_t>(
        std::min<FloodForce>(force, honest_neighbors.size()));

    // Partial Fisher-Yates to pick distinct targets.
    std::vector<NodeId> targets(honest_neighbors.begin(),
                                honest_neighbors.end());
    for (std::size_t i = 0; i < n_targets; ++i) {
        const std::size_t j = i + rng.below(targets.size() - i);
        std::swap(targets[i], targets[j]);
    }

    std::vector<FloodMessage> messages;
    messages.reserve(n_targets);
    for (std::size_t i = 0; i < n_targets; ++i) {
        FloodMessage msg;
        msg.target = targets[i];
        msg.push.sender = byz;
        msg.push.ids.resize(view_size);
        for (std::size_t k = 0; k < view_size; ++k)
            msg.push.ids[k] = byz_ids[rng.below(byz_ids.size())];
        messages.push_back(std::move(msg));
    }
    return messages;
}

double victim_clip_radius(const CollusionOracle& oracle,
                          const ModelVector& victim, double b) {
    if (b <= 0.0) return std::numeric_limits<double>::infinity();
    std::vector<double> norms;
    norms.reserve(oracle.honest_models.size());
    for (const ModelVector* m : oracle.honest_models)
        norms.push_back(m->distance_to(victim));
    std::sort(norms.begin(), norms.end(), std::greater<>());
    const std::size_t k = static_cast<std::size_t>(std::ceil(b));
    if (k == 0 || norms.empty())
        return std::numeric_limits<double>::infinity();
    return norms[std::min(k, norms.size()) - 1];
}

double pick_zeta(std::span<const double> zeta_grid, double direction_norm,
                 double radius) {
    double best = -1.0;
    double smallest = std::numeric_limits<double>::infinity();
    for (double z : zeta_grid) {
        smallest = std::min(smallest, z);
        if (z * direction_norm <= radius) best = std::max(best, z);
    }
    return best >= 0.0 ? best : smallest;
}

ModelVector foe_poison(const CollusionOracle& oracle,
                       std::span<const double> zeta_grid,
                       const ModelVector& victim, double radius) {
    const double zeta =
        pick_zeta(zeta_grid, oracle.honest_mean.norm(), radius);
    ModelVector crafted = victim;
    crafted.axpy(-zeta, oracle.honest_mean);
    return crafted;
}

ModelVector alie_poison(const CollusionOracle& oracle,
                        std::span<const double> zeta_grid,
                        const ModelVector& victim, double radius) {
    const double zeta = pick_zeta(zeta_grid, oracle.honest_std.norm(), radius);
    ModelVector crafted = victim;
    crafted.axpy(zeta, oracle.honest_std);
    return crafted;
}

}  // namespace gossip
