#pragma once

#include "osil/env/dp.hpp"
#include "osil/env/tabular_cmdp.hpp"

namespace osil {

// Exact certificate for the performance bound
//   J_r(pi) >= J_r(pi_U) - (2 * epsilon / (1 - gamma)) * sqrt(max_kl)
// where epsilon = max_{s,a} |Q_r^pi(s,a) - V_r^pi(s)| and max_kl is the
// largest per-state KL(pi_U(.|s) || pi(.|s)). All quantities come from
// exact dynamic programming, not sampling.
struct BoundCertificate {
    double j_pi = 0.0;
    double j_piu = 0.0;
    double epsilon = 0.0;
    double max_kl = 0.0;
    double avg_kl = 0.0;  // occupancy-weighted mean KL under pi_U
    double rhs = 0.0;
    bool holds = false;
    bool kl_finite = true;  // false => support violation, no certificate

    // Diagnostics: the advantage-decomposition identity
    //   J(pi_U) - J(pi) = E_{tau ~ pi_U}[ sum_t gamma^t A^pi(s_t, a_t) ]
    // evaluated exactly on both sides, and the per-state Pinsker check
    // TV(pi_U(s), pi(s))^2 <= KL(pi_U(s) || pi(s)) with TV in the
    // half-L1 convention.
    double lemma1_residual = 0.0;
    double max_pinsker_gap = 0.0;  // max_s (TV^2 - KL); <= 0 when Pinsker holds
};

inline constexpr double kBoundSlack = 1e-9;

BoundCertificate check_performance_bound(const TabularCmdp& cmdp, const TabularPolicy& pi_u,
                                         const TabularPolicy& pi);

}  // namespace osil
