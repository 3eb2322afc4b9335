#include "osil/policy/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "osil/core/errors.hpp"
#include "osil/simd/kernels.hpp"

namespace osil {

namespace {

std::vector<int> policy_sizes(const PolicyConfig& cfg) {
    if (cfg.obs_dim <= 0) throw ConfigError("policy obs_dim must be positive");
    int out_dim = 0;
    switch (cfg.space.kind) {
        case ActionSpaceKind::kDiscrete:
            if (cfg.space.n_actions < 2) {
                throw ConfigError("discrete policy needs at least two actions");
            }
            out_dim = cfg.space.n_actions;
            break;
        case ActionSpaceKind::kBox:
            if (cfg.space.action_dim <= 0) {
                throw ConfigError("box policy needs positive action_dim");
            }
            out_dim = 2 * cfg.space.action_dim;  // mean and log-std per dim
            break;
    }
    std::vector<int> sizes;
    sizes.push_back(cfg.obs_dim);
    for (int h : cfg.hidden) sizes.push_back(h);
    sizes.push_back(out_dim);
    return sizes;
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

// Writes log-softmax of `logits` into `out` and returns the log-normalizer.
double log_softmax(std::span<const double> logits, std::vector<double>& out) {
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double l : logits) sum += std::exp(l - m);
    const double lse = m + std::log(sum);
    out.resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
    return lse;
}

void check_obs(const StochasticPolicy& policy, std::span<const double> obs) {
    if (static_cast<int>(obs.size()) != policy.obs_dim()) {
        throw DataError("policy observation dimensionality mismatch");
    }
}

}  // namespace

StochasticPolicy::StochasticPolicy(const PolicyConfig& cfg, Rng& init_rng)
    : space_(cfg.space),
      obs_dim_(cfg.obs_dim),
      net_(policy_sizes(cfg), cfg.activation, OutputTransform::kIdentity, "policy") {
    net_.init_glorot(init_rng);
}

void StochasticPolicy::discrete_log_probs(std::span<const double> obs, MlpWorkspace& ws,
                                          std::vector<double>& out) const {
    if (space_.kind != ActionSpaceKind::kDiscrete) {
        throw ConfigError("discrete_log_probs called on a box policy");
    }
    check_obs(*this, obs);
    net_.forward(obs, ws);
    log_softmax(ws.out, out);
}

int StochasticPolicy::sample_discrete(std::span<const double> obs, MlpWorkspace& ws,
                                      Rng& rng) const {
    if (space_.kind != ActionSpaceKind::kDiscrete) {
        throw ConfigError("sample_discrete called on a box policy");
    }
    check_obs(*this, obs);
    net_.forward(obs, ws);
    const double m = *std::max_element(ws.out.begin(), ws.out.end());
    double sum = 0.0;
    std::vector<double> probs(ws.out.size());
    for (std::size_t i = 0; i < ws.out.size(); ++i) {
        probs[i] = std::exp(ws.out[i] - m);
        sum += probs[i];
    }
    for (double& p : probs) p /= sum;
    return rng.categorical(probs);
}

void StochasticPolicy::sample_box(std::span<const double> obs, MlpWorkspace& ws, Rng& rng,
                                  std::vector<double>& action) const {
    if (space_.kind != ActionSpaceKind::kBox) {
        throw ConfigError("sample_box called on a discrete policy");
    }
    check_obs(*this, obs);
    net_.forward(obs, ws);
    const int d = space_.action_dim;
    action.resize(d);
    for (int i = 0; i < d; ++i) {
        const double mean = ws.out[i];
        const double log_std = std::clamp(ws.out[d + i], kLogStdMin, kLogStdMax);
        action[i] = std::tanh(mean + std::exp(log_std) * rng.normal());
    }
}

double StochasticPolicy::box_log_prob(std::span<const double> obs, std::span<const double> action,
                                      MlpWorkspace& ws) const {
    if (space_.kind != ActionSpaceKind::kBox) {
        throw ConfigError("box_log_prob called on a discrete policy");
    }
    check_obs(*this, obs);
    const int d = space_.action_dim;
    if (static_cast<int>(action.size()) != d) {
        throw DataError("box action dimensionality mismatch");
    }
    net_.forward(obs, ws);
    double logp = 0.0;
    constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * log(2*pi)
    for (int i = 0; i < d; ++i) {
        double a = action[i];
        if (std::abs(a) > 1.0 + kActionBoundTolerance) {
            std::ostringstream msg;
            msg << "box action component " << i << " = " << a << " outside [-1, 1]";
            throw DataError(msg.str());
        }
        a = std::clamp(a, -1.0 + kActionBoundTolerance, 1.0 - kActionBoundTolerance);
        const double u = std::atanh(a);
        const double mean = ws.out[i];
        const double log_std = std::clamp(ws.out[d + i], kLogStdMin, kLogStdMax);
        const double z = (u - mean) * std::exp(-log_std);
        // Gaussian density of the pre-squash value plus the tanh Jacobian
        // correction log(1 - tanh(u)^2) in its numerically stable form.
        logp += -0.5 * z * z - log_std - kHalfLog2Pi;
        logp -= 2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u));
    }
    return logp;
}

double bc_loss(const StochasticPolicy& policy, const StateActionBatch& batch,
               std::span<double> pgrad, PolicyScratch& scratch) {
    if (policy.space().kind != ActionSpaceKind::kDiscrete) {
        throw ConfigError("bc_loss: discrete overload called on a box policy");
    }
    const int n = batch.size();
    if (n == 0) throw DataError("bc_loss: empty batch");
    const int n_actions = policy.space().n_actions;
    const Mlp& net = policy.net();
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
        const int a = batch.actions[i];
        if (a < 0 || a >= n_actions) throw DataError("bc_loss: action out of range");
        policy.discrete_log_probs(*batch.obs[i], scratch.ws, scratch.buf);
        loss += -scratch.buf[a];
        if (!pgrad.empty()) {
            scratch.grad_out.resize(n_actions);
            for (int b = 0; b < n_actions; ++b) {
                const double p = std::exp(scratch.buf[b]);
                scratch.grad_out[b] = (p - (b == a ? 1.0 : 0.0)) / n;
            }
            net.backward(scratch.ws, scratch.grad_out, pgrad);
        }
    }
    return loss / n;
}

double bc_loss_box(const StochasticPolicy& policy, const BoxBatch& batch, std::span<double> pgrad,
                   PolicyScratch& scratch) {
    if (policy.space().kind != ActionSpaceKind::kBox) {
        throw ConfigError("bc_loss_box called on a discrete policy");
    }
    const int n = batch.size();
    if (n == 0) throw DataError("bc_loss_box: empty batch");
    const int d = policy.space().action_dim;
    const Mlp& net = policy.net();
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
        const std::vector<double>& obs = *batch.obs[i];
        const std::vector<double>& action = *batch.actions[i];
        loss += -policy.box_log_prob(obs, action, scratch.ws);
        if (pgrad.empty()) continue;
        // d(-log pi)/d mean = -z/std, d(-log pi)/d log_std = 1 - z^2, with
        // zero gradient where the log-std clamp is active.
        scratch.grad_out.assign(2 * d, 0.0);
        for (int k = 0; k < d; ++k) {
            const double a = std::clamp(action[k], -1.0 + kActionBoundTolerance,
                                        1.0 - kActionBoundTolerance);
            const double u = std::atanh(a);
            const double raw = scratch.ws.out[d + k];
            const double log_std = std::clamp(raw, kLogStdMin, kLogStdMax);
            const double z = (u - scratch.ws.out[k]) * std::exp(-log_std);
            scratch.grad_out[k] = -z * std::exp(-log_std) / n;
            if (raw > kLogStdMin && raw < kLogStdMax) {
                scratch.grad_out[d + k] = (1.0 - z * z) / n;
            }
        }
        net.backward(scratch.ws, scratch.grad_out, pgrad);
    }
    return loss / n;
}

namespace {

// Fills scratch.q_row with Q(s, a) for every action.
void critic_row(const CostCritic& critic, std::span<const double> obs, PolicyScratch& scratch,
                CriticScratch& critic_scratch) {
    const int n_actions = critic.n_actions();
    scratch.q_row.resize(n_actions);
    for (int a = 0; a < n_actions; ++a) {
        scratch.q_row[a] = critic.q_value(obs, a, critic_scratch.ws, critic_scratch.input);
    }
}

}  // namespace

double adaptive_alpha(const CostCritic& critic, const StochasticPolicy& policy,
                      const StateActionBatch& initial_batch, double alpha_bar,
                      PolicyScratch& scratch, CriticScratch& critic_scratch) {
    if (alpha_bar <= 0.0) throw ConfigError("adaptive_alpha requires alpha_bar > 0");
    const int n = initial_batch.size();
    if (n == 0) throw DataError("adaptive_alpha: empty initial batch");
    double mean_exp = 0.0;
    for (int i = 0; i < n; ++i) {
        const std::vector<double>& obs = *initial_batch.obs[i];
        const int a0 = initial_batch.actions[i];
        policy.discrete_log_probs(obs, scratch.ws, scratch.buf);
        critic_row(critic, obs, scratch, critic_scratch);
        // Anchor on Q(s0, a0) so identical critic values give exactly zero:
        // Q(s0,a0) - E_pi Q = -sum_a pi(a) (Q(a) - Q(a0)).
        double gap = 0.0;
        for (int a = 0; a < critic.n_actions(); ++a) {
            gap += std::exp(scratch.buf[a]) * (scratch.q_row[a] - scratch.q_row[a0]);
        }
        const double exponent = std::clamp(-gap, -10.0, 10.0);
        mean_exp += std::exp(exponent);
    }
    mean_exp /= n;
    return alpha_bar / mean_exp;
}

PolicyStepResult policy_step(StochasticPolicy& policy, const CostCritic* critic,
                             const StateActionBatch& union_batch,
                             const StateActionBatch& initial_batch, AdamState& opt,
                             const PolicyStepOptions& options, PolicyScratch& scratch,
                             CriticScratch& critic_scratch) {
    if (policy.space().kind != ActionSpaceKind::kDiscrete) {
        throw ConfigError("policy_step currently supports discrete action spaces only");
    }
    PolicyStepResult result;
    std::vector<double>& pgrad = scratch.pgrad;
    pgrad.assign(policy.net().params().size(), 0.0);

    result.bc_term = bc_loss(policy, union_batch, pgrad, scratch);

    if (options.alpha_bar > 0.0) {
        if (critic == nullptr) throw ConfigError("policy_step: alpha_bar > 0 needs a critic");
        result.alpha =
            adaptive_alpha(*critic, policy, initial_batch, options.alpha_bar, scratch,
                           critic_scratch);
        const int n = initial_batch.size();
        const int n_actions = critic->n_actions();

        // Batch-mean Q baseline, computed as an offset from the first value
        // so a constant critic yields exactly zero centered values.
        std::vector<double> q_all(static_cast<std::size_t>(n) * n_actions);
        for (int i = 0; i < n; ++i) {
            critic_row(*critic, *initial_batch.obs[i], scratch, critic_scratch);
            std::copy(scratch.q_row.begin(), scratch.q_row.end(),
                      q_all.begin() + static_cast<std::size_t>(i) * n_actions);
        }
        double offset_sum = 0.0;
        for (double q : q_all) offset_sum += q - q_all[0];
        const double baseline = q_all[0] + offset_sum / static_cast<double>(q_all.size());

        double term = 0.0;
        for (int i = 0; i < n; ++i) {
            const std::vector<double>& obs = *initial_batch.obs[i];
            policy.discrete_log_probs(obs, scratch.ws, scratch.buf);
            const double* q_i = q_all.data() + static_cast<std::size_t>(i) * n_actions;
            double expect = 0.0;  // E_pi[Q - baseline]
            for (int a = 0; a < n_actions; ++a) {
                expect += std::exp(scratch.buf[a]) * (q_i[a] - baseline);
            }
            term += expect;
            // d/dlogit_b sum_a pi_a v_a = pi_b (v_b - sum_a pi_a v_a).
            scratch.grad_out.resize(n_actions);
            for (int b = 0; b < n_actions; ++b) {
                scratch.grad_out[b] = result.alpha / n * std::exp(scratch.buf[b]) *
                                      ((q_i[b] - baseline) - expect);
            }
            policy.net().backward(scratch.ws, scratch.grad_out, pgrad);
        }
        result.critic_term = result.alpha * (term / n + baseline);
    }

    if (!std::isfinite(result.bc_term) || !std::isfinite(result.critic_term) ||
        !std::isfinite(result.alpha)) {
        std::ostringstream msg;
        msg << "policy loss non-finite (bc = " << result.bc_term
            << ", critic = " << result.critic_term << ", alpha = " << result.alpha << ")";
        throw NumericError(msg.str());
    }

    if (options.grad_clip > 0.0) {
        const simd::Kernels& k = simd::active();
        const double norm = std::sqrt(k.sum_sq(pgrad.data(), pgrad.size()));
        if (norm > options.grad_clip) {
            k.scale(options.grad_clip / norm, pgrad.data(), pgrad.size());
        }
    }
    opt.step(policy.net().params().values(), pgrad);
    return result;
}

}  // namespace osil
