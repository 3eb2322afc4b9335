#pragma once

#include <span>
#include <vector>

#include "osil/core/rng.hpp"
#include "osil/env/grid.hpp"
#include "osil/env/trajectory.hpp"
#include "osil/policy/policy.hpp"

namespace osil {

// Per-episode undiscounted totals from seeded evaluation rollouts.
struct RolloutStats {
    std::vector<double> returns;
    std::vector<double> costs;

    double mean_return() const;
    double mean_cost() const;
};

// Wraps a learned policy as a rollout action sampler.
ActionSampler policy_action_sampler(const StochasticPolicy& policy);

// Runs n_eval episodes (default 50), one child RNG stream per episode.
RolloutStats evaluate_policy(const GridWorld& world, const StochasticPolicy& policy, int n_eval,
                             const Rng& rng);
RolloutStats evaluate_sampler(const GridWorld& world, const ActionSampler& sampler, int n_eval,
                              const Rng& rng);

// Softmax action probabilities of the policy at every tabular state.
TabularPolicy tabular_policy_of(const GridWorld& world, const StochasticPolicy& policy);

// Normalization anchors. Return endpoints: random policy -> 0, constrained
// reference -> 1. Cost endpoints: constrained reference -> 0, worst
// realizable episodic cost (horizon * max step cost) -> 1.
struct References {
    double r_random = 0.0;
    double r_ref = 0.0;
    double c_ref = 0.0;
    double c_max = 0.0;
};

References compute_references(const GridWorld& world, int n_eval, const Rng& rng);

struct NormalizedMetrics {
    double normalized_return = 0.0;
    double normalized_cost = 0.0;
    double normalized_cvar20_cost = 0.0;
};

NormalizedMetrics normalize_metrics(double mean_return, double mean_cost, double cvar20_cost,
                                    const References& refs);

// Mean of the worst ceil(0.2 * n) episodic costs.
double cvar20(std::span<const double> costs);

struct Interval {
    double low = 0.0;
    double high = 0.0;
    bool degenerate = false;  // fewer than two values
};

// Percentile bootstrap over per-seed values. Consumes exactly
// n_boot * values.size() uniform_int draws in row-major order, which the
// test oracle reproduces independently.
Interval bootstrap_ci(std::span<const double> values, int n_boot, double confidence, Rng& rng);

// Spearman rank correlation with average ranks for ties.
double spearman_rho(std::span<const double> a, std::span<const double> b);

}  // namespace osil
