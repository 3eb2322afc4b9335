#include "osil/env/trajectory.hpp"

#include <numeric>

namespace osil {

double Trajectory::total_hidden_reward() const {
    return std::accumulate(hidden_rewards.begin(), hidden_rewards.end(), 0.0);
}

double Trajectory::total_hidden_cost() const {
    return std::accumulate(hidden_costs.begin(), hidden_costs.end(), 0.0);
}

void Trajectory::check_consistent() const {
    const std::size_t t = actions.size();
    if (t == 0) throw DataError("Trajectory: empty");
    if (state_ids.size() != t + 1 || observations.size() != t + 1) {
        throw DataError("Trajectory: states must have one more entry than actions");
    }
    if (terminals.size() != t || hidden_rewards.size() != t || hidden_costs.size() != t) {
        throw DataError("Trajectory: per-step channel length mismatch");
    }
    for (double c : hidden_costs) {
        if (c < 0.0) throw DataError("Trajectory: negative hidden cost");
    }
}

ActionSampler tabular_action_sampler(const TabularCmdp& cmdp, TabularPolicy pi) {
    validate_tabular_policy(cmdp, pi);
    const int A = cmdp.n_actions;
    return [pi = std::move(pi), A](int state, const std::vector<double>&, Rng& rng) {
        std::vector<double> row(pi.begin() + static_cast<std::size_t>(state) * A,
                                pi.begin() + static_cast<std::size_t>(state + 1) * A);
        return rng.categorical(row);
    };
}

Trajectory rollout(const TabularCmdp& m, const std::vector<std::vector<double>>& features,
                   const ActionSampler& sample_action, Rng& rng, int horizon) {
    const int T = horizon < 0 ? m.horizon : horizon;
    if (T < 1) throw ConfigError("rollout: horizon must be >= 1");
    if (features.size() != static_cast<std::size_t>(m.n_states)) {
        throw DataError("rollout: feature table size mismatch");
    }

    Trajectory tr;
    tr.state_ids.reserve(T + 1);
    tr.observations.reserve(T + 1);
    tr.actions.reserve(T);

    int s = rng.categorical(m.initial_dist);
    tr.state_ids.push_back(s);
    tr.observations.push_back(features[s]);
    for (int t = 0; t < T; ++t) {
        const int a = sample_action(s, features[s], rng);
        if (a < 0 || a >= m.n_actions) throw DataError("rollout: sampler returned bad action");
        std::vector<double> row(m.transition.begin() + m.sas(s, a, 0),
                                m.transition.begin() + m.sas(s, a, 0) + m.n_states);
        const int s2 = rng.categorical(row);
        tr.actions.push_back(a);
        tr.hidden_rewards.push_back(m.reward[m.sa(s, a)]);
        tr.hidden_costs.push_back(m.cost[m.sa(s, a)]);
        // Absorbing states are ordinary zero-reward/zero-cost states of a
        // continuing process, and the horizon cut is a truncation, not an
        // episode end, so collected data carries no terminal flags. Value
        // bootstrapping then runs through absorption, where a constant
        // offset in a learned cost model shifts every Q(s, a) by the same
        // geometric series instead of penalizing long paths. Terminal
        // flags remain honored wherever a dataset provides them.
        tr.terminals.push_back(0);
        s = s2;
        tr.state_ids.push_back(s);
        tr.observations.push_back(features[s]);
    }
    tr.check_consistent();
    return tr;
}

Trajectory rollout(const GridWorld& world, const ActionSampler& sample_action, Rng& rng,
                   int horizon) {
    return rollout(world.cmdp, world.features, sample_action, rng, horizon);
}

std::vector<std::vector<double>> one_hot_features(int n_states) {
    std::vector<std::vector<double>> f(n_states, std::vector<double>(n_states, 0.0));
    for (int s = 0; s < n_states; ++s) f[s][s] = 1.0;
    return f;
}

}  // namespace osil
