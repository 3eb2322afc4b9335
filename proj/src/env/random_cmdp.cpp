#include "osil/env/random_cmdp.hpp"

#include <cmath>

namespace osil {

namespace {

// Dirichlet(1) via normalized exponentials.
void fill_simplex(Rng& rng, double* out, int n) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        while (u <= 0.0) u = rng.uniform();
        out[i] = -std::log(u);
        total += out[i];
    }
    for (int i = 0; i < n; ++i) out[i] /= total;
}

}  // namespace

TabularCmdp make_random_cmdp(int n_states, int n_actions, Rng& rng, double gamma, int horizon) {
    TabularCmdp m;
    m.n_states = n_states;
    m.n_actions = n_actions;
    m.gamma = gamma;
    m.horizon = horizon;
    m.transition.assign(static_cast<std::size_t>(n_states) * n_actions * n_states, 0.0);
    m.reward.assign(static_cast<std::size_t>(n_states) * n_actions, 0.0);
    m.cost.assign(static_cast<std::size_t>(n_states) * n_actions, 0.0);
    m.initial_dist.assign(n_states, 0.0);
    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            fill_simplex(rng, m.transition.data() + m.sas(s, a, 0), n_states);
            m.reward[m.sa(s, a)] = rng.uniform(-1.0, 1.0);
            m.cost[m.sa(s, a)] = rng.uniform();
        }
    }
    fill_simplex(rng, m.initial_dist.data(), n_states);
    m.validate();
    return m;
}

TabularPolicy make_random_policy(const TabularCmdp& cmdp, Rng& rng) {
    TabularPolicy pi(static_cast<std::size_t>(cmdp.n_states) * cmdp.n_actions, 0.0);
    for (int s = 0; s < cmdp.n_states; ++s) {
        fill_simplex(rng, pi.data() + cmdp.sa(s, 0), cmdp.n_actions);
    }
    return pi;
}

}  // namespace osil
