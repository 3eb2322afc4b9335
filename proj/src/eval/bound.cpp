#include "osil/eval/bound.hpp"

#include <cmath>
#include <limits>

#include "osil/core/errors.hpp"

namespace osil {

BoundCertificate check_performance_bound(const TabularCmdp& cmdp, const TabularPolicy& pi_u,
                                         const TabularPolicy& pi) {
    validate_tabular_policy(cmdp, pi_u);
    validate_tabular_policy(cmdp, pi);

    BoundCertificate cert;
    const PolicyEvalResult eval_pi =
        exact_policy_evaluation(cmdp, pi, EvalMode::kDiscountedInfinite);
    const PolicyEvalResult eval_piu =
        exact_policy_evaluation(cmdp, pi_u, EvalMode::kDiscountedInfinite);
    cert.j_pi = eval_pi.j_r;
    cert.j_piu = eval_piu.j_r;

    for (int s = 0; s < cmdp.n_states; ++s) {
        for (int a = 0; a < cmdp.n_actions; ++a) {
            cert.epsilon =
                std::max(cert.epsilon, std::abs(eval_pi.q_r[cmdp.sa(s, a)] - eval_pi.v_r[s]));
        }
    }

    // Per-state KL and total variation of the two action distributions.
    std::vector<double> kl(cmdp.n_states, 0.0);
    cert.max_pinsker_gap = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < cmdp.n_states; ++s) {
        double tv = 0.0;
        for (int a = 0; a < cmdp.n_actions; ++a) {
            const double p = pi_u[cmdp.sa(s, a)];
            const double q = pi[cmdp.sa(s, a)];
            tv += std::abs(p - q);
            if (p <= 0.0) continue;
            if (q <= 0.0) {
                cert.kl_finite = false;
                continue;
            }
            kl[s] += p * std::log(p / q);
        }
        tv *= 0.5;
        // Rounding can leave a tiny negative KL when the distributions are
        // (nearly) identical; it is a sum of p*log(p/q) terms that cancels
        // analytically to >= 0.
        kl[s] = std::max(kl[s], 0.0);
        cert.max_kl = std::max(cert.max_kl, kl[s]);
        cert.max_pinsker_gap = std::max(cert.max_pinsker_gap, tv * tv - kl[s]);
    }

    if (!cert.kl_finite) {
        cert.rhs = -std::numeric_limits<double>::infinity();
        cert.holds = false;
        return cert;
    }

    // Occupancy of pi_U: sum_t gamma^t Pr(s_t = s, a_t = a).
    const std::vector<double> occ = discounted_occupancy(cmdp, pi_u);
    double occ_mass = 0.0, kl_weighted = 0.0, advantage_sum = 0.0;
    for (int s = 0; s < cmdp.n_states; ++s) {
        double state_occ = 0.0;
        for (int a = 0; a < cmdp.n_actions; ++a) {
            const double o = occ[cmdp.sa(s, a)];
            state_occ += o;
            advantage_sum += o * (eval_pi.q_r[cmdp.sa(s, a)] - eval_pi.v_r[s]);
        }
        occ_mass += state_occ;
        kl_weighted += state_occ * kl[s];
    }
    cert.avg_kl = kl_weighted / occ_mass;
    cert.lemma1_residual = std::abs((cert.j_piu - cert.j_pi) - advantage_sum);

    const double gamma = cmdp.gamma;
    cert.rhs = cert.j_piu - (2.0 * cert.epsilon / (1.0 - gamma)) * std::sqrt(cert.max_kl);
    cert.holds = cert.j_pi >= cert.rhs - kBoundSlack;
    return cert;
}

}  // namespace osil
