#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "osil/core/errors.hpp"
#include "osil/data/dataset.hpp"
#include "osil/env/dp.hpp"
#include "osil/env/grid.hpp"
#include "osil/eval/bound.hpp"
#include "osil/eval/metrics.hpp"
#include "test_support.hpp"

using namespace osil;

TEST_CASE("evaluation rollouts: determinism, zero variance, DP agreement") {
    GridWorld world = make_grid_world(GridSpec{});

    // A near-deterministic policy on the deterministic grid: all episodes
    // identical, so return/cost variance is exactly zero.
    PolicyConfig pcfg;
    pcfg.obs_dim = world.obs_dim;
    pcfg.space.n_actions = world.cmdp.n_actions;
    pcfg.hidden = {};
    Rng init(1);
    StochasticPolicy policy(pcfg, init);
    std::vector<double>& p = policy.net().params().values();
    std::fill(p.begin(), p.end(), 0.0);
    p[policy.net().bias_offset(0)] = 40.0;  // always east

    const RolloutStats det = evaluate_policy(world, policy, 10, Rng(2));
    REQUIRE(det.returns.size() == 10);
    for (int i = 1; i < 10; ++i) {
        CHECK(det.returns[i] == det.returns[0]);
        CHECK(det.costs[i] == det.costs[0]);
    }
    // Straight east through the hazard column: one hazard hit, goal reached.
    CHECK(det.costs[0] == 1.0);
    CHECK(det.mean_cost() == 1.0);

    // Same seed, same numbers; different seed may differ for stochastic
    // policies.
    std::fill(p.begin(), p.end(), 0.0);  // uniform policy now
    const RolloutStats a = evaluate_policy(world, policy, 40, Rng(3));
    const RolloutStats b = evaluate_policy(world, policy, 40, Rng(3));
    CHECK(a.returns == b.returns);
    CHECK(a.costs == b.costs);

    // Monte-Carlo mean vs exact finite-horizon undiscounted evaluation.
    const RolloutStats mc = evaluate_policy(world, policy, 400, Rng(4));
    const PolicyEvalResult exact = exact_policy_evaluation(
        world.cmdp, uniform_tabular_policy(world.cmdp), EvalMode::kFiniteHorizon, 1.0);
    double var = 0.0;
    for (double r : mc.returns) var += (r - mc.mean_return()) * (r - mc.mean_return());
    var /= (mc.returns.size() - 1);
    const double se = std::sqrt(var / mc.returns.size());
    CHECK(std::abs(mc.mean_return() - exact.j_r) <= 3.0 * se + 1e-12);
}

TEST_CASE("tabular extraction matches the policy's softmax") {
    GridWorld world = make_grid_world(GridSpec{});
    PolicyConfig pcfg;
    pcfg.obs_dim = world.obs_dim;
    pcfg.space.n_actions = world.cmdp.n_actions;
    pcfg.hidden = {8};
    Rng init(5);
    StochasticPolicy policy(pcfg, init);
    const TabularPolicy tab = tabular_policy_of(world, policy);
    validate_tabular_policy(world.cmdp, tab);
    MlpWorkspace ws;
    std::vector<double> lp;
    for (int s : {0, 7, 24}) {
        policy.discrete_log_probs(world.features[s], ws, lp);
        for (int a = 0; a < world.cmdp.n_actions; ++a) {
            CHECK(tab[world.cmdp.sa(s, a)] == std::exp(lp[a]));
        }
    }
}

TEST_CASE("normalization endpoints and degeneracy") {
    References refs;
    refs.r_random = 2.0;
    refs.r_ref = 10.0;
    refs.c_ref = 1.0;
    refs.c_max = 30.0;

    CHECK(normalize_metrics(10.0, 1.0, 1.0, refs).normalized_return == 1.0);
    CHECK(normalize_metrics(2.0, 1.0, 1.0, refs).normalized_return == 0.0);
    CHECK(normalize_metrics(6.0, 1.0, 1.0, refs).normalized_return == 0.5);
    CHECK(normalize_metrics(6.0, 30.0, 30.0, refs).normalized_cost == 1.0);
    CHECK(normalize_metrics(6.0, 1.0, 1.0, refs).normalized_cost == 0.0);
    // CVaR cost uses the same affine map.
    const NormalizedMetrics m = normalize_metrics(6.0, 15.5, 30.0, refs);
    CHECK(m.normalized_cost == 0.5);
    CHECK(m.normalized_cvar20_cost == 1.0);

    References degenerate = refs;
    degenerate.r_ref = refs.r_random;
    CHECK_THROWS_AS(normalize_metrics(1.0, 1.0, 1.0, degenerate), ConfigError);
    degenerate = refs;
    degenerate.c_max = refs.c_ref;
    CHECK_THROWS_AS(normalize_metrics(1.0, 1.0, 1.0, degenerate), ConfigError);
}

TEST_CASE("grid references are sane and reproducible") {
    GridWorld world = make_grid_world(GridSpec{});
    const References r1 = compute_references(world, 50, Rng(6));
    const References r2 = compute_references(world, 50, Rng(6));
    CHECK(r1.r_random == r2.r_random);
    CHECK(r1.r_ref == r2.r_ref);
    CHECK(r1.c_ref == r2.c_ref);
    CHECK(r1.c_max == 30.0);  // horizon 30 x max step cost 1
    // The constrained reference beats random return and respects the budget.
    CHECK(r1.r_ref > r1.r_random);
    CHECK(r1.c_ref <= world.cmdp.cost_budget + 1e-9);
}

TEST_CASE("cvar20 matches the sort oracle") {
    CHECK(cvar20(std::vector<double>{0, 0, 0, 0, 10}) == 10.0);
    const std::vector<double> equal(7, 3.25);
    CHECK(cvar20(equal) == 3.25);

    Rng rng(7);
    std::vector<double> costs(50);
    for (double& c : costs) c = rng.uniform(0.0, 30.0);
    // Oracle: sort descending, average the worst ceil(0.2*50) = 10.
    std::vector<double> sorted = costs;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double acc = 0.0;
    for (int i = 0; i < 10; ++i) acc += sorted[i] - sorted[0];
    const double oracle = sorted[0] + acc / 10.0;
    CHECK(cvar20(costs) == oracle);
    CHECK(cvar20(costs) >= std::accumulate(costs.begin(), costs.end(), 0.0) / 50.0);

    // n = 6 -> ceil(1.2) = 2 worst values.
    const std::vector<double> six{1, 2, 3, 4, 5, 100};
    CHECK(cvar20(six) == 52.5);
    CHECK_THROWS_AS(cvar20(std::vector<double>{}), DataError);
}

TEST_CASE("bootstrap confidence intervals") {
    SUBCASE("identical values collapse to a point") {
        const std::vector<double> v(5, 1.7);
        Rng rng(8);
        const Interval ci = bootstrap_ci(v, 1000, 0.95, rng);
        CHECK(ci.low == 1.7);
        CHECK(ci.high == 1.7);
        CHECK_FALSE(ci.degenerate);
    }
    SUBCASE("single seed is flagged degenerate") {
        Rng rng(9);
        const Interval ci = bootstrap_ci(std::vector<double>{2.5}, 1000, 0.95, rng);
        CHECK(ci.low == 2.5);
        CHECK(ci.high == 2.5);
        CHECK(ci.degenerate);
    }
    SUBCASE("matches an independent re-implementation on the same stream") {
        std::vector<double> v{0.3, 1.9, -0.4, 2.2, 0.8};
        Rng rng(10);
        const Interval ci = bootstrap_ci(v, 500, 0.9, rng);

        Rng mirror(10);
        std::vector<double> means;
        for (int b = 0; b < 500; ++b) {
            double acc = 0.0;
            double first = 0.0;
            std::vector<double> sample(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) {
                sample[i] = v[mirror.uniform_int(static_cast<int>(v.size()))];
            }
            first = sample[0];
            for (double s : sample) acc += s - first;
            means.push_back(first + acc / static_cast<double>(sample.size()));
        }
        CHECK(ci.low == quantile(means, 0.05));
        CHECK(ci.high == quantile(means, 0.95));
        CHECK(ci.low <= ci.high);
    }
    SUBCASE("contains the sample mean for symmetric data") {
        std::vector<double> v{-2, -1, 0, 1, 2};
        Rng rng(11);
        const Interval ci = bootstrap_ci(v, 2000, 0.95, rng);
        CHECK(ci.low <= 0.0);
        CHECK(ci.high >= 0.0);
    }
    SUBCASE("parameter validation") {
        Rng rng(12);
        CHECK_THROWS_AS(bootstrap_ci(std::vector<double>{}, 100, 0.95, rng), DataError);
        CHECK_THROWS_AS(bootstrap_ci(std::vector<double>{1, 2}, 0, 0.95, rng), ConfigError);
        CHECK_THROWS_AS(bootstrap_ci(std::vector<double>{1, 2}, 100, 1.0, rng), ConfigError);
    }
}

TEST_CASE("spearman rank correlation") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y{10, 20, 30, 40, 50};
    CHECK(spearman_rho(x, y) == 1.0);
    std::reverse(y.begin(), y.end());
    CHECK(spearman_rho(x, y) == -1.0);

    // Hand case: ranks (1,2,3) vs (3,1,2) -> rho = -0.5.
    CHECK(close(spearman_rho(std::vector<double>{1, 2, 3}, std::vector<double>{3, 1, 2}), -0.5,
                1e-12, 0.0));

    // Ties get average ranks: [1, 1, 2] vs [5, 5, 9] correlate perfectly
    // on ranks (1.5, 1.5, 3).
    CHECK(close(spearman_rho(std::vector<double>{1, 1, 2}, std::vector<double>{5, 5, 9}), 1.0,
                1e-12, 0.0));

    CHECK_THROWS_AS(spearman_rho(std::vector<double>{1, 1}, std::vector<double>{1, 2}), DataError);
    CHECK_THROWS_AS(spearman_rho(std::vector<double>{1}, std::vector<double>{1}), DataError);
}

TEST_CASE("performance bound: identical policies give equality") {
    Rng rng(13);
    const TabularCmdp m = random_cmdp(rng);
    const TabularPolicy pi = random_positive_policy(m, rng);
    const BoundCertificate cert = check_performance_bound(m, pi, pi);
    CHECK(cert.kl_finite);
    CHECK(cert.max_kl <= 1e-14);
    CHECK(close(cert.rhs, cert.j_piu, 1e-9, 1e-9));
    CHECK(cert.holds);
    CHECK(cert.lemma1_residual <= 1e-8);
    CHECK(cert.max_pinsker_gap <= 1e-12);
    CHECK(cert.avg_kl <= cert.max_kl + 1e-15);
}

TEST_CASE("performance bound: randomized property check") {
    Rng rng(14);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        const TabularCmdp m = random_cmdp(rng);
        const TabularPolicy pi_u = random_positive_policy(m, rng);
        const TabularPolicy pi = random_positive_policy(m, rng);
        const BoundCertificate cert = check_performance_bound(m, pi_u, pi);
        REQUIRE(cert.kl_finite);
        CHECK(cert.holds);
        CHECK(cert.lemma1_residual <= 1e-8);
        CHECK(cert.max_pinsker_gap <= 1e-12);
        CHECK(cert.avg_kl <= cert.max_kl + 1e-15);
        CHECK(cert.epsilon >= 0.0);
        ++checked;
    }
    CHECK(checked == 200);
}

TEST_CASE("performance bound: support violation withholds the certificate") {
    Rng rng(15);
    const TabularCmdp m = random_cmdp(rng);
    const TabularPolicy pi_u = random_positive_policy(m, rng);
    TabularPolicy pi = random_positive_policy(m, rng);
    // Zero out one action the union policy uses and renormalize.
    pi[m.sa(0, 0)] = 0.0;
    double total = 0.0;
    for (int a = 0; a < m.n_actions; ++a) total += pi[m.sa(0, a)];
    for (int a = 0; a < m.n_actions; ++a) pi[m.sa(0, a)] /= total;
    const BoundCertificate cert = check_performance_bound(m, pi_u, pi);
    CHECK_FALSE(cert.kl_finite);
    CHECK_FALSE(cert.holds);
}
