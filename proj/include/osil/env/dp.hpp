#pragma once

#include "osil/env/tabular_cmdp.hpp"

namespace osil {

enum class EvalMode {
    kDiscountedInfinite,  // V = (I - gamma * P_pi)^-1 r_pi, solved exactly
    kFiniteHorizon,       // backward recursion over cmdp.horizon steps
};

struct PolicyEvalResult {
    double j_r = 0.0;
    double j_c = 0.0;
    std::vector<double> v_r, v_c;  // [s]
    std::vector<double> q_r, q_c;  // [s][a]
};

// Exact policy evaluation. In finite-horizon mode the returned V/Q are the
// time-0 values. `gamma_override` replaces cmdp.gamma when nonnegative; pass
// 1.0 with kFiniteHorizon for undiscounted episodic totals (the reporting
// convention), anything else for training-measure quantities.
PolicyEvalResult exact_policy_evaluation(const TabularCmdp& cmdp, const TabularPolicy& pi,
                                         EvalMode mode, double gamma_override = -1.0);

// Greedy stationary policy for the scalarized objective reward - lambda*cost
// under discounted-infinite-horizon dynamics, via exact policy iteration.
// Ties break toward the lowest action index, so results are deterministic.
TabularPolicy greedy_policy_lagrangian(const TabularCmdp& cmdp, double lambda);

struct ConstrainedSolution {
    TabularPolicy policy;
    double j_r = 0.0;      // discounted return of the returned policy
    double j_c = 0.0;      // discounted cost of the returned policy
    double lambda = 0.0;
    bool feasible = false;
    double j_r_unconstrained = 0.0;
    double j_c_unconstrained = 0.0;
};

// Lagrangian reference solver: bisects the penalty lambda until the
// discounted cost meets cost_budget within 1e-3 * budget (absolute floor
// 1e-9), keeping the best feasible policy seen. Reports infeasible when
// even the most cost-averse greedy policy violates the budget.
ConstrainedSolution solve_constrained_reference(const TabularCmdp& cmdp);

// Discounted state-action occupancy sum_t gamma^t Pr(s_t = s, a_t = a)
// under pi, from a linear solve. Used by the performance-bound verifier.
std::vector<double> discounted_occupancy(const TabularCmdp& cmdp, const TabularPolicy& pi);

}  // namespace osil
