#include "osil/env/tabular_cmdp.hpp"

#include <cmath>
#include <string>

namespace osil {

void TabularCmdp::validate() const {
    if (n_states <= 0 || n_actions <= 0) throw ConfigError("TabularCmdp: empty state/action space");
    const std::size_t S = n_states, A = n_actions;
    if (transition.size() != S * A * S) throw ConfigError("TabularCmdp: transition size mismatch");
    if (reward.size() != S * A || cost.size() != S * A) {
        throw ConfigError("TabularCmdp: reward/cost size mismatch");
    }
    if (initial_dist.size() != S) throw ConfigError("TabularCmdp: initial_dist size mismatch");
    if (!absorbing.empty() && absorbing.size() != S) {
        throw ConfigError("TabularCmdp: absorbing mask size mismatch");
    }
    if (gamma <= 0.0 || gamma >= 1.0) throw ConfigError("TabularCmdp: gamma must be in (0,1)");
    if (horizon < 1) throw ConfigError("TabularCmdp: horizon must be >= 1");
    if (cost_budget < 0.0) throw ConfigError("TabularCmdp: cost_budget must be >= 0");

    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            double row = 0.0;
            for (int s2 = 0; s2 < n_states; ++s2) {
                const double p = transition[sas(s, a, s2)];
                if (p < 0.0) throw ConfigError("TabularCmdp: negative transition probability");
                row += p;
            }
            if (std::abs(row - 1.0) > 1e-9) {
                throw ConfigError("TabularCmdp: transition row (" + std::to_string(s) + "," +
                                  std::to_string(a) + ") sums to " + std::to_string(row));
            }
            if (cost[sa(s, a)] < 0.0) throw ConfigError("TabularCmdp: negative cost entry");
        }
    }
    double init = 0.0;
    for (double p : initial_dist) {
        if (p < 0.0) throw ConfigError("TabularCmdp: negative initial probability");
        init += p;
    }
    if (std::abs(init - 1.0) > 1e-9) throw ConfigError("TabularCmdp: initial_dist does not sum to 1");

    if (!absorbing.empty()) {
        for (int s = 0; s < n_states; ++s) {
            if (!absorbing[s]) continue;
            for (int a = 0; a < n_actions; ++a) {
                if (std::abs(transition[sas(s, a, s)] - 1.0) > 1e-12 || reward[sa(s, a)] != 0.0 ||
                    cost[sa(s, a)] != 0.0) {
                    throw ConfigError("TabularCmdp: absorbing state " + std::to_string(s) +
                                      " must self-loop with zero reward and cost");
                }
            }
        }
    }
}

void validate_tabular_policy(const TabularCmdp& cmdp, const TabularPolicy& pi) {
    if (pi.size() != static_cast<std::size_t>(cmdp.n_states) * cmdp.n_actions) {
        throw DataError("tabular policy size mismatch");
    }
    for (int s = 0; s < cmdp.n_states; ++s) {
        double row = 0.0;
        for (int a = 0; a < cmdp.n_actions; ++a) {
            const double p = pi[cmdp.sa(s, a)];
            if (p < 0.0) throw DataError("tabular policy has a negative probability");
            row += p;
        }
        if (std::abs(row - 1.0) > 1e-9) {
            throw DataError("tabular policy row " + std::to_string(s) + " sums to " +
                            std::to_string(row));
        }
    }
}

TabularPolicy uniform_tabular_policy(const TabularCmdp& cmdp) {
    return TabularPolicy(static_cast<std::size_t>(cmdp.n_states) * cmdp.n_actions,
                         1.0 / cmdp.n_actions);
}

}  // namespace osil
