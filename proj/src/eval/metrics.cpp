#include "osil/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "osil/core/errors.hpp"
#include "osil/data/dataset.hpp"
#include "osil/env/dp.hpp"

namespace osil {

namespace {

// Mean computed as an offset from the first element, so a list of identical
// values averages to that value bitwise.
double centered_mean(std::span<const double> values) {
    if (values.empty()) throw DataError("mean of empty list");
    double acc = 0.0;
    for (double v : values) acc += v - values[0];
    return values[0] + acc / static_cast<double>(values.size());
}

}  // namespace

double RolloutStats::mean_return() const { return centered_mean(returns); }
double RolloutStats::mean_cost() const { return centered_mean(costs); }

ActionSampler policy_action_sampler(const StochasticPolicy& policy) {
    auto ws = std::make_shared<MlpWorkspace>();
    return [&policy, ws](int, const std::vector<double>& obs, Rng& rng) {
        return policy.sample_discrete(obs, *ws, rng);
    };
}

RolloutStats evaluate_sampler(const GridWorld& world, const ActionSampler& sampler, int n_eval,
                              const Rng& rng) {
    if (n_eval < 1) throw ConfigError("evaluate_policy: n_eval must be >= 1");
    RolloutStats stats;
    stats.returns.reserve(n_eval);
    stats.costs.reserve(n_eval);
    for (int i = 0; i < n_eval; ++i) {
        Rng episode = rng.child("eval_episode", static_cast<std::uint64_t>(i));
        const Trajectory tr = rollout(world, sampler, episode);
        stats.returns.push_back(tr.total_hidden_reward());
        stats.costs.push_back(tr.total_hidden_cost());
    }
    return stats;
}

RolloutStats evaluate_policy(const GridWorld& world, const StochasticPolicy& policy, int n_eval,
                             const Rng& rng) {
    return evaluate_sampler(world, policy_action_sampler(policy), n_eval, rng);
}

TabularPolicy tabular_policy_of(const GridWorld& world, const StochasticPolicy& policy) {
    const int n_actions = world.cmdp.n_actions;
    TabularPolicy tab(static_cast<std::size_t>(world.cmdp.n_states) * n_actions);
    MlpWorkspace ws;
    std::vector<double> log_probs;
    for (int s = 0; s < world.cmdp.n_states; ++s) {
        policy.discrete_log_probs(world.features[s], ws, log_probs);
        for (int a = 0; a < n_actions; ++a) {
            tab[world.cmdp.sa(s, a)] = std::exp(log_probs[a]);
        }
    }
    return tab;
}

References compute_references(const GridWorld& world, int n_eval, const Rng& rng) {
    References refs;
    const TabularPolicy uniform = uniform_tabular_policy(world.cmdp);
    const RolloutStats random_stats =
        evaluate_sampler(world, tabular_action_sampler(world.cmdp, uniform), n_eval, rng);
    refs.r_random = random_stats.mean_return();

    const ConstrainedSolution ref = solve_constrained_reference(world.cmdp);
    const PolicyEvalResult undiscounted =
        exact_policy_evaluation(world.cmdp, ref.policy, EvalMode::kFiniteHorizon, 1.0);
    refs.r_ref = undiscounted.j_r;
    refs.c_ref = undiscounted.j_c;

    double max_step_cost = 0.0;
    for (double c : world.cmdp.cost) max_step_cost = std::max(max_step_cost, c);
    refs.c_max = world.cmdp.horizon * max_step_cost;
    return refs;
}

NormalizedMetrics normalize_metrics(double mean_return, double mean_cost, double cvar20_cost,
                                    const References& refs) {
    const double r_span = refs.r_ref - refs.r_random;
    const double c_span = refs.c_max - refs.c_ref;
    if (std::abs(r_span) < 1e-12 || std::abs(c_span) < 1e-12) {
        throw ConfigError("normalize_metrics: degenerate reference endpoints");
    }
    NormalizedMetrics m;
    m.normalized_return = (mean_return - refs.r_random) / r_span;
    m.normalized_cost = (mean_cost - refs.c_ref) / c_span;
    m.normalized_cvar20_cost = (cvar20_cost - refs.c_ref) / c_span;
    return m;
}

double cvar20(std::span<const double> costs) {
    if (costs.empty()) throw DataError("cvar20: empty cost list");
    std::vector<double> sorted(costs.begin(), costs.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const std::size_t k =
        static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(sorted.size())));
    return centered_mean(std::span<const double>(sorted.data(), k));
}

Interval bootstrap_ci(std::span<const double> values, int n_boot, double confidence, Rng& rng) {
    if (values.empty()) throw DataError("bootstrap_ci: empty value list");
    if (n_boot < 1) throw ConfigError("bootstrap_ci: n_boot must be >= 1");
    if (confidence <= 0.0 || confidence >= 1.0) {
        throw ConfigError("bootstrap_ci: confidence must be in (0, 1)");
    }
    Interval out;
    if (values.size() == 1) {
        out.low = out.high = values[0];
        out.degenerate = true;
        return out;
    }
    const int n = static_cast<int>(values.size());
    std::vector<double> means(n_boot);
    std::vector<double> sample(n);
    for (int b = 0; b < n_boot; ++b) {
        for (int i = 0; i < n; ++i) sample[i] = values[rng.uniform_int(n)];
        means[b] = centered_mean(sample);
    }
    const double tail = (1.0 - confidence) / 2.0;
    out.low = quantile(means, tail);
    out.high = quantile(means, 1.0 - tail);
    return out;
}

double spearman_rho(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DataError("spearman_rho: length mismatch");
    if (a.size() < 2) throw DataError("spearman_rho: need at least two pairs");
    auto ranks = [](std::span<const double> v) {
        const int n = static_cast<int>(v.size());
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int i, int j) { return v[i] < v[j]; });
        std::vector<double> r(n);
        int i = 0;
        while (i < n) {
            int j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = 0.5 * (i + j) + 1.0;  // average rank, 1-based
            for (int k = i; k <= j; ++k) r[order[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> ra = ranks(a), rb = ranks(b);
    const double ma = centered_mean(ra), mb = centered_mean(rb);
    double num = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        const double da = ra[i] - ma, db = rb[i] - mb;
        num += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va == 0.0 || vb == 0.0) throw DataError("spearman_rho: constant input has no ranking");
    return num / std::sqrt(va * vb);
}

}  // namespace osil
