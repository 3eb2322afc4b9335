#include "osil/env/dp.hpp"

#include <cmath>
#include <tuple>

#include "osil/core/linalg.hpp"

namespace osil {

namespace {

// Collapse the policy into state-level dynamics: P_pi [s][s'], r_pi, c_pi.
struct Collapsed {
    std::vector<double> p;  // [s][s']
    std::vector<double> r, c;
};

Collapsed collapse(const TabularCmdp& m, const TabularPolicy& pi) {
    const int S = m.n_states, A = m.n_actions;
    Collapsed out;
    out.p.assign(static_cast<std::size_t>(S) * S, 0.0);
    out.r.assign(S, 0.0);
    out.c.assign(S, 0.0);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            const double w = pi[m.sa(s, a)];
            if (w == 0.0) continue;
            out.r[s] += w * m.reward[m.sa(s, a)];
            out.c[s] += w * m.cost[m.sa(s, a)];
            for (int s2 = 0; s2 < S; ++s2) {
                out.p[static_cast<std::size_t>(s) * S + s2] += w * m.transition[m.sas(s, a, s2)];
            }
        }
    }
    return out;
}

std::vector<double> solve_discounted_v(const TabularCmdp& m, const Collapsed& col,
                                       const std::vector<double>& per_state, double g) {
    const int S = m.n_states;
    std::vector<double> a(static_cast<std::size_t>(S) * S, 0.0);
    for (int i = 0; i < S; ++i) {
        for (int j = 0; j < S; ++j) {
            a[static_cast<std::size_t>(i) * S + j] =
                (i == j ? 1.0 : 0.0) - g * col.p[static_cast<std::size_t>(i) * S + j];
        }
    }
    return solve_linear(std::move(a), per_state);
}

void fill_q(const TabularCmdp& m, const std::vector<double>& table, const std::vector<double>& v,
            double g, std::vector<double>& q) {
    const int S = m.n_states, A = m.n_actions;
    q.assign(static_cast<std::size_t>(S) * A, 0.0);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            double exp_v = 0.0;
            for (int s2 = 0; s2 < S; ++s2) exp_v += m.transition[m.sas(s, a, s2)] * v[s2];
            q[m.sa(s, a)] = table[m.sa(s, a)] + g * exp_v;
        }
    }
}

}  // namespace

PolicyEvalResult exact_policy_evaluation(const TabularCmdp& cmdp, const TabularPolicy& pi,
                                         EvalMode mode, double gamma_override) {
    validate_tabular_policy(cmdp, pi);
    const double g = gamma_override >= 0.0 ? gamma_override : cmdp.gamma;
    const int S = cmdp.n_states, A = cmdp.n_actions;
    PolicyEvalResult res;
    const Collapsed col = collapse(cmdp, pi);

    if (mode == EvalMode::kDiscountedInfinite) {
        if (g >= 1.0) throw ConfigError("exact_policy_evaluation: discounted mode needs gamma < 1");
        res.v_r = solve_discounted_v(cmdp, col, col.r, g);
        res.v_c = solve_discounted_v(cmdp, col, col.c, g);
        fill_q(cmdp, cmdp.reward, res.v_r, g, res.q_r);
        fill_q(cmdp, cmdp.cost, res.v_c, g, res.q_c);
    } else {
        // Backward recursion; v holds V_{t+1}, ending with the time-0 values.
        res.v_r.assign(S, 0.0);
        res.v_c.assign(S, 0.0);
        for (int t = cmdp.horizon - 1; t >= 0; --t) {
            fill_q(cmdp, cmdp.reward, res.v_r, g, res.q_r);
            fill_q(cmdp, cmdp.cost, res.v_c, g, res.q_c);
            for (int s = 0; s < S; ++s) {
                double vr = 0.0, vc = 0.0;
                for (int a = 0; a < A; ++a) {
                    vr += pi[cmdp.sa(s, a)] * res.q_r[cmdp.sa(s, a)];
                    vc += pi[cmdp.sa(s, a)] * res.q_c[cmdp.sa(s, a)];
                }
                res.v_r[s] = vr;
                res.v_c[s] = vc;
            }
        }
    }
    for (int s = 0; s < S; ++s) {
        res.j_r += cmdp.initial_dist[s] * res.v_r[s];
        res.j_c += cmdp.initial_dist[s] * res.v_c[s];
    }
    return res;
}

TabularPolicy greedy_policy_lagrangian(const TabularCmdp& cmdp, double lambda) {
    const int S = cmdp.n_states, A = cmdp.n_actions;
    TabularCmdp scalarized = cmdp;
    for (std::size_t i = 0; i < scalarized.reward.size(); ++i) {
        scalarized.reward[i] = cmdp.reward[i] - lambda * cmdp.cost[i];
    }
    std::vector<int> action(S, 0);
    auto as_policy = [&]() {
        TabularPolicy pi(static_cast<std::size_t>(S) * A, 0.0);
        for (int s = 0; s < S; ++s) pi[cmdp.sa(s, action[s])] = 1.0;
        return pi;
    };
    for (int iter = 0; iter < 1000; ++iter) {
        const PolicyEvalResult ev =
            exact_policy_evaluation(scalarized, as_policy(), EvalMode::kDiscountedInfinite);
        bool changed = false;
        for (int s = 0; s < S; ++s) {
            int best = 0;
            double best_q = ev.q_r[cmdp.sa(s, 0)];
            for (int a = 1; a < A; ++a) {
                if (ev.q_r[cmdp.sa(s, a)] > best_q) {
                    best = a;
                    best_q = ev.q_r[cmdp.sa(s, a)];
                }
            }
            // Switch only on strict improvement so ties cannot cycle.
            if (best != action[s] && best_q > ev.q_r[cmdp.sa(s, action[s])] + 1e-12) {
                action[s] = best;
                changed = true;
            }
        }
        if (!changed) return as_policy();
    }
    throw NumericError("greedy_policy_lagrangian: policy iteration failed to converge");
}

ConstrainedSolution solve_constrained_reference(const TabularCmdp& cmdp) {
    cmdp.validate();
    const double b = cmdp.cost_budget;
    const double tol = std::max(1e-3 * b, 1e-9);
    auto eval_at = [&](double lambda) {
        TabularPolicy pi = greedy_policy_lagrangian(cmdp, lambda);
        const PolicyEvalResult ev = exact_policy_evaluation(cmdp, pi, EvalMode::kDiscountedInfinite);
        return std::tuple<TabularPolicy, double, double>(std::move(pi), ev.j_r, ev.j_c);
    };

    ConstrainedSolution sol;
    auto [pi0, jr0, jc0] = eval_at(0.0);
    sol.j_r_unconstrained = jr0;
    sol.j_c_unconstrained = jc0;
    if (jc0 <= b + tol) {
        sol.policy = std::move(pi0);
        sol.j_r = jr0;
        sol.j_c = jc0;
        sol.lambda = 0.0;
        sol.feasible = true;
        return sol;
    }

    // Grow the bracket until a feasible penalty appears (or give up).
    double lo = 0.0, hi = 1.0;
    bool found = false;
    TabularPolicy hi_pi;
    double hi_jr = 0.0, hi_jc = 0.0;
    while (hi <= 1e7) {
        std::tie(hi_pi, hi_jr, hi_jc) = eval_at(hi);
        if (hi_jc <= b + tol) {
            found = true;
            break;
        }
        lo = hi;
        hi *= 10.0;
    }
    sol.policy = hi_pi;
    sol.j_r = hi_jr;
    sol.j_c = hi_jc;
    sol.lambda = hi;
    sol.feasible = found;
    if (!found) return sol;  // even the most cost-averse greedy policy violates

    // Bisect toward the smallest feasible lambda; cost falls and return
    // falls as lambda grows, so that endpoint carries the best J_r.
    for (int it = 0; it < 60 && hi - lo > 1e-10 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        auto [pi_m, jr_m, jc_m] = eval_at(mid);
        if (jc_m <= b + tol) {
            // Smaller feasible lambda, so J_r is at least as good: keep it.
            hi = mid;
            sol.policy = std::move(pi_m);
            sol.j_r = jr_m;
            sol.j_c = jc_m;
            sol.lambda = mid;
        } else {
            lo = mid;
        }
    }
    return sol;
}

std::vector<double> discounted_occupancy(const TabularCmdp& cmdp, const TabularPolicy& pi) {
    validate_tabular_policy(cmdp, pi);
    const int S = cmdp.n_states, A = cmdp.n_actions;
    const Collapsed col = collapse(cmdp, pi);
    // mu(s') = rho0(s') + gamma * sum_s mu(s) P_pi(s, s')  ->  solve M mu = rho0
    std::vector<double> m(static_cast<std::size_t>(S) * S, 0.0);
    for (int i = 0; i < S; ++i) {
        for (int j = 0; j < S; ++j) {
            m[static_cast<std::size_t>(i) * S + j] =
                (i == j ? 1.0 : 0.0) -
                cmdp.gamma * col.p[static_cast<std::size_t>(j) * S + i];
        }
    }
    const std::vector<double> mu = solve_linear(std::move(m), cmdp.initial_dist);
    std::vector<double> occ(static_cast<std::size_t>(S) * A, 0.0);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) occ[cmdp.sa(s, a)] = mu[s] * pi[cmdp.sa(s, a)];
    }
    return occ;
}

}  // namespace osil
