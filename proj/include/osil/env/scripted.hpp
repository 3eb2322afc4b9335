#pragma once

#include "osil/env/trajectory.hpp"

namespace osil {

// Data-collection policies spanning the cost spectrum. "Safe" is the
// cost-averse shortest path (huge hazard penalty in the Lagrangian DP),
// "risky" is reward-greedy and cuts straight through hazards; mixing them
// per-state with kappa in [0,1] produces behaviors with varying degrees of
// constraint violation.
TabularPolicy scripted_safe_policy(const GridWorld& world);
TabularPolicy scripted_risky_policy(const GridWorld& world);

// (1 - kappa) * safe + kappa * risky, per state.
TabularPolicy mixed_policy(const TabularPolicy& safe, const TabularPolicy& risky, double kappa);

// (1 - eps) * pi + eps * uniform; exploration noise for dataset coverage.
TabularPolicy blend_with_uniform(const TabularCmdp& cmdp, TabularPolicy pi, double eps);

struct PoolConfig {
    int pool_size = 600;
    double eps_explore = 0.1;   // uniform-action mixture during collection
    double pure_fraction = 0.7; // share of episodes pinned to kappa 0 or 1
    std::uint64_t seed = 0;
};

// Rollout pool for dataset construction: each episode draws its own blend
// kappa ~ U[0,1], so total hidden cost varies continuously across the pool.
std::vector<Trajectory> generate_pool(const GridWorld& world, const PoolConfig& cfg);

}  // namespace osil
