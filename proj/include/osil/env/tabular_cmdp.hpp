#pragma once

#include <cstdint>
#include <vector>

#include "osil/core/errors.hpp"

namespace osil {

// Finite constrained MDP: transition tensor, reward and cost tables, start
// distribution, discount, horizon, and a cost budget. All tensors row-major.
struct TabularCmdp {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> transition;    // [s][a][s']
    std::vector<double> reward;        // [s][a]
    std::vector<double> cost;          // [s][a], nonnegative
    std::vector<double> initial_dist;  // [s]
    std::vector<std::uint8_t> absorbing;  // [s]; absorbing states self-loop with r = c = 0
    double gamma = 0.99;
    int horizon = 30;
    double cost_budget = 0.0;

    std::size_t sa(int s, int a) const {
        return static_cast<std::size_t>(s) * n_actions + a;
    }
    std::size_t sas(int s, int a, int s2) const {
        return (static_cast<std::size_t>(s) * n_actions + a) * n_states + s2;
    }

    void validate() const;
};

// A stationary stochastic policy as a row-stochastic [s][a] table.
using TabularPolicy = std::vector<double>;

void validate_tabular_policy(const TabularCmdp& cmdp, const TabularPolicy& pi);

// Uniform policy over actions, the R_random reference behavior.
TabularPolicy uniform_tabular_policy(const TabularCmdp& cmdp);

}  // namespace osil
