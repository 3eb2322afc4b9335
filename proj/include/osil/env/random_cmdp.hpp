#pragma once

#include "osil/core/rng.hpp"
#include "osil/env/tabular_cmdp.hpp"

namespace osil {

// Dense random CMDP: Dirichlet(1) transition rows and initial distribution,
// rewards in [-1, 1], costs in [0, 1]. Used by DP self-checks and the
// randomized performance-bound property tests.
TabularCmdp make_random_cmdp(int n_states, int n_actions, Rng& rng, double gamma = 0.9,
                             int horizon = 10);

// Dirichlet(1) policy rows: strictly positive everywhere, so KL terms
// between two such policies are always finite.
TabularPolicy make_random_policy(const TabularCmdp& cmdp, Rng& rng);

}  // namespace osil
