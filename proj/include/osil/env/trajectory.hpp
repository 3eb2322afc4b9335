#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "osil/core/rng.hpp"
#include "osil/env/grid.hpp"

namespace osil {

// One episode. Observations/actions/terminals are learner-visible; the
// reward and cost channels are evaluation-only and stripped by DatasetView
// before anything reaches a learner. state_ids are kept for exact-DP
// oracles and the privileged ground-truth-cost ablation path.
struct Trajectory {
    std::vector<int> state_ids;                     // length T+1
    std::vector<std::vector<double>> observations;  // length T+1
    std::vector<int> actions;                       // length T
    std::vector<std::uint8_t> terminals;            // length T; next state is absorbing
    std::vector<double> hidden_rewards;             // length T
    std::vector<double> hidden_costs;               // length T

    int length() const { return static_cast<int>(actions.size()); }
    double total_hidden_reward() const;
    double total_hidden_cost() const;
    void check_consistent() const;
};

// Action selection given the current state; learned policies adapt to this
// through a closure over their network, tabular ones via the helper below.
using ActionSampler =
    std::function<int(int state, const std::vector<double>& obs, Rng& rng)>;

ActionSampler tabular_action_sampler(const TabularCmdp& cmdp, TabularPolicy pi);

// Runs one episode of exactly `horizon` steps (cmdp default when < 0).
// Absorbing goals keep self-looping with zero reward/cost, so every
// trajectory has the same length and partial-segment sampling never needs
// per-trajectory length bookkeeping. Hidden channels record the r/c table
// entries of each visited state-action pair.
Trajectory rollout(const TabularCmdp& cmdp, const std::vector<std::vector<double>>& features,
                   const ActionSampler& sample_action, Rng& rng, int horizon = -1);

Trajectory rollout(const GridWorld& world, const ActionSampler& sample_action, Rng& rng,
                   int horizon = -1);

// One-hot observations for CMDPs without a native feature map.
std::vector<std::vector<double>> one_hot_features(int n_states);

}  // namespace osil
