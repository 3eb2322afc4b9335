#include "osil/env/scripted.hpp"

#include "osil/env/dp.hpp"

namespace osil {

TabularPolicy scripted_safe_policy(const GridWorld& world) {
    // A hazard penalty that dwarfs any achievable return makes the greedy
    // policy lexicographically cost-first.
    return greedy_policy_lagrangian(world.cmdp, 1000.0);
}

TabularPolicy scripted_risky_policy(const GridWorld& world) {
    return greedy_policy_lagrangian(world.cmdp, 0.0);
}

TabularPolicy mixed_policy(const TabularPolicy& safe, const TabularPolicy& risky, double kappa) {
    if (kappa < 0.0 || kappa > 1.0) throw ConfigError("mixed_policy: kappa out of [0,1]");
    if (safe.size() != risky.size()) throw DataError("mixed_policy: policy size mismatch");
    TabularPolicy out(safe.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (1.0 - kappa) * safe[i] + kappa * risky[i];
    }
    return out;
}

TabularPolicy blend_with_uniform(const TabularCmdp& cmdp, TabularPolicy pi, double eps) {
    if (eps < 0.0 || eps > 1.0) throw ConfigError("blend_with_uniform: eps out of [0,1]");
    const double u = eps / cmdp.n_actions;
    for (double& p : pi) p = (1.0 - eps) * p + u;
    return pi;
}

std::vector<Trajectory> generate_pool(const GridWorld& world, const PoolConfig& cfg) {
    if (cfg.pool_size < 1) throw ConfigError("generate_pool: pool_size must be >= 1");
    if (cfg.pure_fraction < 0.0 || cfg.pure_fraction > 1.0) {
        throw ConfigError("generate_pool: pure_fraction out of [0,1]");
    }
    const TabularPolicy safe = scripted_safe_policy(world);
    const TabularPolicy risky = scripted_risky_policy(world);
    const Rng root(cfg.seed);
    std::vector<Trajectory> pool;
    pool.reserve(cfg.pool_size);
    for (int i = 0; i < cfg.pool_size; ++i) {
        Rng rng = root.child("pool", static_cast<std::uint64_t>(i));
        // Demonstrators are mostly mode-consistent: a pure_fraction coin
        // sends the whole episode to one end of the spectrum, the rest
        // draw a uniform blend. Exploration noise keeps coverage broad.
        double kappa = rng.uniform();
        if (rng.uniform() < cfg.pure_fraction) kappa = kappa < 0.5 ? 0.0 : 1.0;
        const TabularPolicy pi =
            blend_with_uniform(world.cmdp, mixed_policy(safe, risky, kappa), cfg.eps_explore);
        pool.push_back(rollout(world, tabular_action_sampler(world.cmdp, pi), rng));
    }
    return pool;
}

}  // namespace osil
