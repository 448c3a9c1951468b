#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "gossip/model_vector.hpp"
#include "gossip/peer_sampling.hpp"
#include "gossip/rng.hpp"

namespace gossip {

// Number of honest neighbors a Byzantine node pushes identifier lists to
// per round. kUnlimited floods every honest neighbor.
using FloodForce = std::uint64_t;
inline constexpr FloodForce kUnlimitedForce =
    std::numeric_limits<FloodForce>::max();

enum class AttackKind { None, FallOfEmpires, LittleIsEnough };

// Omniscient collusion snapshot: per-round statistics over the true
// honest model population.
struct CollusionOracle {
    ModelVector honest_mean;
    ModelVector honest_std;  // coordinate-wise population std
    std::vector<const ModelVector*> honest_models;
};

CollusionOracle build_oracle(std::span<const ModelVector* const> honest);

struct FloodMessage {
    NodeId target = 0;
    PushMessage push;
};

// Identifier flooding: one push of view_size Byzantine ids (drawn
// uniformly with replacement) to each of min(force, honest_neighbors)
// distinct honest targets.
std::vector<FloodMessage> flood_round(NodeId byz,
                                      std::span<const NodeId> honest_neighbors,
                                      FloodForce force,
                                      std::span<const NodeId> byz_ids,
                                      std::size_t view_size, Rng& rng);

// The adversary's estimate of the victim's filtering radius: the
// ceil(b)-th largest norm among differences of honest models to the
// victim. Infinity when b <= 0 (no filtering to evade).
double victim_clip_radius(const CollusionOracle& oracle,
                          const ModelVector& victim, double b);

// Largest zeta in the grid with ||zeta * direction|| <= radius; smallest
// grid value when none qualifies.
double pick_zeta(std::span<const double> zeta_grid, double direction_norm,
                 double radius);

// victim + zeta * (-honest_mean); zeta maximized under the radius bound.
ModelVector foe_poison(const CollusionOracle& oracle,
                       std::span<const double> zeta_grid,
                       const ModelVector& victim, double radius);

// victim + zeta * honest_std; zeta maximized under the radius bound.
ModelVector alie_poison(const CollusionOracle& oracle,
                        std::span<const double> zeta_grid,
                        const ModelVector& victim, double radius);

}  // namespace gossip
