#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "osil/core/kv.hpp"
#include "osil/env/dp.hpp"
#include "osil/env/grid.hpp"
#include "osil/env/random_cmdp.hpp"
#include "osil/env/scripted.hpp"
#include "osil/env/trajectory.hpp"
#include "test_support.hpp"

using namespace osil;

namespace {

// Deterministic 3-state chain 0 -> 1 -> 2 with absorbing terminal state 2.
TabularCmdp make_chain() {
    TabularCmdp m;
    m.n_states = 3;
    m.n_actions = 1;
    m.transition.assign(9, 0.0);
    m.transition[m.sas(0, 0, 1)] = 1.0;
    m.transition[m.sas(1, 0, 2)] = 1.0;
    m.transition[m.sas(2, 0, 2)] = 1.0;
    m.reward = {1.0, 0.5, 0.0};
    m.cost = {0.0, 0.2, 0.0};
    m.initial_dist = {1.0, 0.0, 0.0};
    m.absorbing = {0, 0, 1};
    m.gamma = 0.9;
    m.horizon = 4;
    m.validate();
    return m;
}

}  // namespace

TEST_CASE("grid compiles to a valid CMDP with arrival-based reward and cost") {
    const GridWorld w = make_grid_world(GridSpec{});
    const TabularCmdp& m = w.cmdp;
    CHECK(m.n_states == 25);
    CHECK(m.n_actions == 4);

    // (1,0) --east--> hazard (2,0): cost 1, step penalty only.
    const int s10 = w.state_of(1, 0);
    CHECK(m.cost[m.sa(s10, 0)] == 1.0);
    CHECK(m.reward[m.sa(s10, 0)] == -0.01);

    // (3,0) --east--> goal (4,0): terminal reward minus step penalty.
    const int s30 = w.state_of(3, 0);
    CHECK(m.reward[m.sa(s30, 0)] == doctest::Approx(0.99).epsilon(1e-15));
    CHECK(m.cost[m.sa(s30, 0)] == 0.0);

    // Goal is absorbing with zero channels.
    const int g = w.state_of(4, 0);
    CHECK(m.absorbing[g] == 1);
    CHECK(m.transition[m.sas(g, 2, g)] == 1.0);

    // Wall bumps at the corner start: west and south both stay.
    const int s00 = w.state_of(0, 0);
    CHECK(m.transition[m.sas(s00, 1, s00)] == 1.0);
    CHECK(m.transition[m.sas(s00, 3, s00)] == 1.0);
}

TEST_CASE("coordinate features are never the zero vector and flag hazards") {
    const GridWorld w = make_grid_world(GridSpec{});
    CHECK(w.obs_dim == 7);
    for (const auto& f : w.features) {
        double norm = 0.0;
        for (double v : f) norm += v * v;
        CHECK(norm > 0.0);
    }
    // (1,0) has hazard (2,0) to the east: flag layout is here/E/W/N/S.
    const auto& f = w.features[w.state_of(1, 0)];
    CHECK(f[0] == doctest::Approx(0.3));   // (1 + 0.5) / 5
    CHECK(f[1] == doctest::Approx(0.1));   // (0 + 0.5) / 5
    CHECK(f[2] == 0.0);
    CHECK(f[3] == 1.0);
    CHECK(f[6] == 0.0);  // south neighbor is off-grid, flag stays clear

    GridSpec one_hot = GridSpec{};
    one_hot.observation_mode = ObservationMode::kOneHotState;
    const GridWorld w2 = make_grid_world(one_hot);
    CHECK(w2.obs_dim == 25);
    CHECK(w2.features[3][3] == 1.0);
}

TEST_CASE("deterministic chain rollout is the unique trajectory") {
    const TabularCmdp m = make_chain();
    const auto features = one_hot_features(m.n_states);
    TabularPolicy pi(3, 1.0);  // single action
    Rng rng(5);
    const Trajectory tr = rollout(m, features, tabular_action_sampler(m, pi), rng, 4);
    CHECK(tr.state_ids == std::vector<int>{0, 1, 2, 2, 2});
    CHECK(tr.hidden_rewards == std::vector<double>{1.0, 0.5, 0.0, 0.0});
    // Truncation is not termination: collected data never flags absorption.
    CHECK(tr.terminals == std::vector<std::uint8_t>{0, 0, 0, 0});
    CHECK(tr.total_hidden_cost() == doctest::Approx(0.2));
}

TEST_CASE("discounted sum over a self-loop rollout is the geometric series") {
    TabularCmdp m;
    m.n_states = 1;
    m.n_actions = 1;
    m.transition = {1.0};
    m.reward = {1.0};
    m.cost = {0.0};
    m.initial_dist = {1.0};
    m.gamma = 0.9;
    m.horizon = 3;
    m.validate();
    Rng rng(6);
    const Trajectory tr =
        rollout(m, one_hot_features(1), tabular_action_sampler(m, TabularPolicy{1.0}), rng);
    double disc = 0.0, g = 1.0;
    for (double r : tr.hidden_rewards) {
        disc += g * r;
        g *= m.gamma;
    }
    CHECK(disc == doctest::Approx(1.0 + 0.9 + 0.81).epsilon(1e-12));

    // Single self-loop state, discounted infinite horizon: V = 1/(1-gamma).
    const PolicyEvalResult ev =
        exact_policy_evaluation(m, TabularPolicy{1.0}, EvalMode::kDiscountedInfinite);
    CHECK(ev.j_r == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("zero reward tensor evaluates to zero return") {
    Rng rng(7);
    TabularCmdp m = make_random_cmdp(5, 3, rng);
    std::fill(m.reward.begin(), m.reward.end(), 0.0);
    const TabularPolicy pi = make_random_policy(m, rng);
    for (EvalMode mode : {EvalMode::kDiscountedInfinite, EvalMode::kFiniteHorizon}) {
        CHECK(exact_policy_evaluation(m, pi, mode).j_r == 0.0);
    }
}

TEST_CASE("risky rollouts cost more than safe rollouts on average") {
    const GridWorld w = make_grid_world(GridSpec{});
    const TabularPolicy safe = scripted_safe_policy(w);
    const TabularPolicy risky = scripted_risky_policy(w);
    double safe_cost = 0.0, risky_cost = 0.0, safe_ret = 0.0, risky_ret = 0.0;
    const Rng root(99);
    for (int i = 0; i < 100; ++i) {
        Rng r1 = root.child("safe", i);
        Rng r2 = root.child("risky", i);
        const Trajectory ts = rollout(w, tabular_action_sampler(w.cmdp, safe), r1);
        const Trajectory tr = rollout(w, tabular_action_sampler(w.cmdp, risky), r2);
        safe_cost += ts.total_hidden_cost();
        risky_cost += tr.total_hidden_cost();
        safe_ret += ts.total_hidden_reward();
        risky_ret += tr.total_hidden_reward();
    }
    CHECK(risky_cost / 100 > safe_cost / 100);
    CHECK(safe_cost == 0.0);             // detour never touches the hazard column
    CHECK(risky_ret / 100 > safe_ret / 100);  // shorter path pays less step penalty
    CHECK(safe_ret / 100 > 0.8);         // but the detour still reaches the goal
}

TEST_CASE("finite-horizon evaluation matches Monte-Carlo on a random CMDP") {
    Rng rng(8);
    const TabularCmdp m = make_random_cmdp(6, 3, rng, 0.9, 10);
    const TabularPolicy pi = make_random_policy(m, rng);
    const PolicyEvalResult ev =
        exact_policy_evaluation(m, pi, EvalMode::kFiniteHorizon, /*gamma_override=*/1.0);

    const auto features = one_hot_features(m.n_states);
    const ActionSampler sampler = tabular_action_sampler(m, pi);
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    const Rng root(12345);
    for (int i = 0; i < n; ++i) {
        Rng r = root.child("mc", i);
        const double total = rollout(m, features, sampler, r).total_hidden_reward();
        sum += total;
        sum_sq += total * total;
    }
    const double mc_mean = sum / n;
    const double mc_var = (sum_sq / n - mc_mean * mc_mean) / n;
    const double se = std::sqrt(mc_var);
    CHECK(std::abs(mc_mean - ev.j_r) <= 3.0 * se);
}

TEST_CASE("discounted evaluation satisfies the Bellman equations tightly") {
    Rng rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        const TabularCmdp m = make_random_cmdp(7, 3, rng);
        const TabularPolicy pi = make_random_policy(m, rng);
        const PolicyEvalResult ev = exact_policy_evaluation(m, pi, EvalMode::kDiscountedInfinite);
        for (int s = 0; s < m.n_states; ++s) {
            double v_from_q = 0.0;
            for (int a = 0; a < m.n_actions; ++a) {
                v_from_q += pi[m.sa(s, a)] * ev.q_r[m.sa(s, a)];
                double q = m.reward[m.sa(s, a)];
                for (int s2 = 0; s2 < m.n_states; ++s2) {
                    q += m.gamma * m.transition[m.sas(s, a, s2)] * ev.v_r[s2];
                }
                CHECK(std::abs(q - ev.q_r[m.sa(s, a)]) <= 1e-10);
            }
            CHECK(std::abs(v_from_q - ev.v_r[s]) <= 1e-10);
        }
    }
}

TEST_CASE("discounted occupancy reproduces return and total mass") {
    Rng rng(10);
    const TabularCmdp m = make_random_cmdp(6, 4, rng);
    const TabularPolicy pi = make_random_policy(m, rng);
    const std::vector<double> occ = discounted_occupancy(m, pi);
    double mass = 0.0, ret = 0.0;
    for (int s = 0; s < m.n_states; ++s) {
        for (int a = 0; a < m.n_actions; ++a) {
            mass += occ[m.sa(s, a)];
            ret += occ[m.sa(s, a)] * m.reward[m.sa(s, a)];
        }
    }
    CHECK(mass == doctest::Approx(1.0 / (1.0 - m.gamma)).epsilon(1e-10));
    const PolicyEvalResult ev = exact_policy_evaluation(m, pi, EvalMode::kDiscountedInfinite);
    CHECK(ret == doctest::Approx(ev.j_r).epsilon(1e-10));
}

TEST_CASE("slack budget returns the unconstrained optimum at lambda zero") {
    GridSpec spec;
    spec.cost_budget = 1000.0;
    const GridWorld w = make_grid_world(spec);
    const ConstrainedSolution sol = solve_constrained_reference(w.cmdp);
    CHECK(sol.feasible);
    CHECK(sol.lambda == 0.0);
    CHECK(sol.j_r == doctest::Approx(sol.j_r_unconstrained));
    CHECK(sol.j_c == doctest::Approx(sol.j_c_unconstrained));
}

TEST_CASE("zero budget forces a zero-cost policy when one exists") {
    GridSpec spec;
    spec.cost_budget = 0.0;
    const GridWorld w = make_grid_world(spec);
    const ConstrainedSolution sol = solve_constrained_reference(w.cmdp);
    CHECK(sol.feasible);
    CHECK(sol.j_c <= 1e-9);
    CHECK(sol.j_r > 0.0);  // still reaches the goal via the detour
}

TEST_CASE("half-budget solution sits between the safest and greediest returns") {
    GridSpec spec;
    const GridWorld base = make_grid_world(spec);
    const PolicyEvalResult greedy = exact_policy_evaluation(
        base.cmdp, greedy_policy_lagrangian(base.cmdp, 0.0), EvalMode::kDiscountedInfinite);
    REQUIRE(greedy.j_c > 0.0);

    TabularCmdp m = base.cmdp;
    m.cost_budget = 0.5 * greedy.j_c;
    const ConstrainedSolution sol = solve_constrained_reference(m);
    CHECK(sol.feasible);
    CHECK(sol.j_c <= m.cost_budget * (1.0 + 1e-3) + 1e-9);

    const PolicyEvalResult safest = exact_policy_evaluation(
        m, greedy_policy_lagrangian(m, 1e6), EvalMode::kDiscountedInfinite);
    CHECK(sol.j_r >= safest.j_r - 1e-9);
    CHECK(sol.j_r <= greedy.j_r + 1e-9);
}

TEST_CASE("raising lambda never raises the greedy policy's discounted cost") {
    const std::vector<double> grid = {0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0};
    const GridWorld w = make_grid_world(GridSpec{});
    Rng rng(11);
    std::vector<TabularCmdp> cases = {w.cmdp};
    for (int i = 0; i < 3; ++i) cases.push_back(make_random_cmdp(6, 3, rng));
    for (const TabularCmdp& m : cases) {
        double prev = std::numeric_limits<double>::infinity();
        for (double lam : grid) {
            const PolicyEvalResult ev = exact_policy_evaluation(
                m, greedy_policy_lagrangian(m, lam), EvalMode::kDiscountedInfinite);
            CHECK(ev.j_c <= prev + 1e-9);
            prev = ev.j_c;
        }
    }
}

TEST_CASE("trajectories pad to the horizon through the absorbing goal") {
    const GridWorld w = make_grid_world(GridSpec{});
    Rng rng(12);
    const Trajectory tr =
        rollout(w, tabular_action_sampler(w.cmdp, scripted_risky_policy(w)), rng);
    CHECK(tr.length() == w.cmdp.horizon);
    CHECK(tr.state_ids.size() == static_cast<std::size_t>(w.cmdp.horizon) + 1);
    // The reward-greedy path needs 4 moves; everything after sits in the
    // zero-cost absorbing goal, unflagged (truncation is not termination).
    const int goal = tr.state_ids[4];
    for (int t = 4; t <= tr.length(); ++t) CHECK(tr.state_ids[t] == goal);
    for (int t = 0; t < tr.length(); ++t) CHECK(tr.terminals[t] == 0);
    CHECK(tr.total_hidden_cost() == 1.0);
    CHECK(tr.total_hidden_reward() == doctest::Approx(1.0 - 4 * 0.01));
}

TEST_CASE("pool generation is deterministic and spans the cost spectrum") {
    const GridWorld w = make_grid_world(GridSpec{});
    PoolConfig cfg;
    cfg.pool_size = 60;
    cfg.seed = 77;
    const std::vector<Trajectory> a = generate_pool(w, cfg);
    const std::vector<Trajectory> b = generate_pool(w, cfg);
    REQUIRE(a.size() == 60);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].state_ids == b[i].state_ids);
        CHECK(a[i].actions == b[i].actions);
    }
    double min_cost = 1e9, max_cost = -1e9;
    for (const Trajectory& t : a) {
        min_cost = std::min(min_cost, t.total_hidden_cost());
        max_cost = std::max(max_cost, t.total_hidden_cost());
    }
    CHECK(min_cost == 0.0);
    CHECK(max_cost >= 1.0);
}

TEST_CASE("mixed and uniform-blended policies stay row-stochastic") {
    const GridWorld w = make_grid_world(GridSpec{});
    const TabularPolicy safe = scripted_safe_policy(w);
    const TabularPolicy risky = scripted_risky_policy(w);
    const TabularPolicy mixed = mixed_policy(safe, risky, 0.3);
    validate_tabular_policy(w.cmdp, mixed);
    validate_tabular_policy(w.cmdp, blend_with_uniform(w.cmdp, mixed, 0.1));
    CHECK(mixed_policy(safe, risky, 0.0) == safe);
    CHECK(mixed_policy(safe, risky, 1.0) == risky);
    CHECK_THROWS_AS(mixed_policy(safe, risky, 1.5), ConfigError);
}

TEST_CASE("grid specs load from kv text with defaults and validation") {
    const KvConfig kv = KvConfig::from_string(
        "env.width = 6\n"
        "env.height = 4\n"
        "env.start = 0:1\n"
        "env.goals = 5:1\n"
        "env.hazards = 2:0, 2:1, 2:2\n"
        "env.slip_prob = 0.05\n"
        "env.horizon = 20\n");
    const GridSpec s = grid_spec_from_kv(kv);
    CHECK(s.width == 6);
    CHECK(s.height == 4);
    CHECK(s.start == std::pair<int, int>{0, 1});
    CHECK(s.hazards.size() == 3);
    CHECK(s.slip_prob == 0.05);
    CHECK(s.gamma == 0.99);  // untouched default

    const KvConfig bad = KvConfig::from_string("env.start = 9:9\n");
    CHECK_THROWS_AS(grid_spec_from_kv(bad), ConfigError);

    CHECK_THROWS_AS(KvConfig::from_string("no equals sign here\n"), ConfigError);
}

TEST_CASE("kv canonicalization and hashing are order-independent") {
    const KvConfig a = KvConfig::from_string("b = 2\na = 1\n");
    const KvConfig b = KvConfig::from_string("a = 1\nb = 2\n");
    CHECK(a.canonical_string() == b.canonical_string());
    CHECK(a.hash() == b.hash());
    const KvConfig c = KvConfig::from_string("a = 1\nb = 3\n");
    CHECK(a.hash() != c.hash());
}
