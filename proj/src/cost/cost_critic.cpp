#include "osil/cost/cost_critic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "osil/core/errors.hpp"

namespace osil {

namespace {

std::vector<int> critic_sizes(const CostCriticConfig& cfg) {
    if (cfg.obs_dim < 1 || cfg.n_actions < 1) {
        throw ConfigError("cost critic needs positive obs_dim and n_actions");
    }
    std::vector<int> sizes{cfg.obs_dim + cfg.n_actions};
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(1);
    return sizes;
}

double check_zeta(double zeta) {
    if (!(zeta > 0.0) || zeta > 1.0) throw ConfigError("zeta must be in (0, 1]");
    return zeta;
}

double check_gamma(double gamma) {
    if (!(gamma >= 0.0) || gamma >= 1.0) throw ConfigError("gamma must be in [0, 1)");
    return gamma;
}

}  // namespace

CostCritic::CostCritic(const CostCriticConfig& cfg, Rng& init_rng)
    : n_actions_(cfg.n_actions),
      zeta_(check_zeta(cfg.zeta)),
      gamma_(check_gamma(cfg.gamma)),
      q_net_(critic_sizes(cfg), cfg.activation, OutputTransform::kIdentity, "cost_critic"),
      // Same layout name as the online net so Polyak updates can verify
      // the two parameter vectors are interchangeable.
      q_target_(critic_sizes(cfg), cfg.activation, OutputTransform::kIdentity, "cost_critic") {
    q_net_.init_glorot(init_rng);
    q_target_.params().values() = q_net_.params().values();
}

void CostCritic::build_input(std::span<const double> obs, int action,
                             std::vector<double>& out) const {
    if (static_cast<int>(obs.size()) + n_actions_ != q_net_.input_dim()) {
        throw DataError("cost critic observation dimensionality mismatch");
    }
    if (action < 0 || action >= n_actions_) {
        throw DataError("cost critic action out of range: " + std::to_string(action));
    }
    out.assign(q_net_.input_dim(), 0.0);
    std::copy(obs.begin(), obs.end(), out.begin());
    out[obs.size() + static_cast<std::size_t>(action)] = 1.0;
}

double CostCritic::q_value(std::span<const double> obs, int action, MlpWorkspace& ws,
                           std::vector<double>& input) const {
    build_input(obs, action, input);
    q_net_.forward(input, ws);
    return ws.out[0];
}

double CostCritic::q_target_value(std::span<const double> obs, int action, MlpWorkspace& ws,
                                  std::vector<double>& input) const {
    build_input(obs, action, input);
    q_target_.forward(input, ws);
    return ws.out[0];
}

OracleCostSource::OracleCostSource(const std::vector<std::vector<double>>& features,
                                   const TabularCmdp& cmdp)
    : cmdp_(&cmdp) {
    if (static_cast<int>(features.size()) != cmdp.n_states) {
        throw DataError("oracle cost source: one feature vector per state required");
    }
    for (int s = 0; s < cmdp.n_states; ++s) state_of_obs_[features[s]] = s;
}

double OracleCostSource::step_cost(std::span<const double> obs, int action) {
    const auto it = state_of_obs_.find(std::vector<double>(obs.begin(), obs.end()));
    if (it == state_of_obs_.end()) {
        throw DataError("oracle cost source: observation does not match any state");
    }
    if (action < 0 || action >= cmdp_->n_actions) {
        throw DataError("oracle cost source: action out of range");
    }
    return cmdp_->cost[cmdp_->sa(it->second, action)];
}

double td_target(const CostCritic& critic, CostSource& cost, std::span<const double> obs,
                 int action, std::span<const double> next_obs, bool terminal,
                 const BootstrapPolicy& policy, Rng& rng, CriticScratch& scratch) {
    double y = cost.step_cost(obs, action);
    if (!terminal) {
        const int next_action = policy(next_obs, rng);
        y += critic.gamma() * critic.q_target_value(next_obs, next_action, scratch.ws,
                                                    scratch.input);
    }
    return y;
}

double critic_step(CostCritic& critic, CostSource& cost, const TransitionBatch& batch,
                   const BootstrapPolicy& policy, AdamState& opt, Rng& rng,
                   CriticScratch& scratch, double grad_clip) {
    const int n = batch.size();
    if (n < 1) throw DataError("critic step needs a nonempty batch");
    scratch.pgrad.assign(critic.q_net().params().size(), 0.0);

    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double y = td_target(critic, cost, *batch.obs[i], batch.actions[i],
                                   *batch.next_obs[i], batch.terminals[i] != 0, policy, rng,
                                   scratch);
        const double q = critic.q_value(*batch.obs[i], batch.actions[i], scratch.ws,
                                        scratch.input);
        const double residual = q - y;
        if (!std::isfinite(residual)) {
            throw NumericError("critic TD residual non-finite at batch item " +
                               std::to_string(i) + " (q = " + std::to_string(q) +
                               ", target = " + std::to_string(y) + ")");
        }
        loss += residual * residual;
        const double grad_out = 2.0 * residual / n;
        critic.q_net().backward(scratch.ws, std::span<const double>(&grad_out, 1),
                                scratch.pgrad);
    }
    loss /= n;

    clip_grad_norm(scratch.pgrad, grad_clip);
    opt.step(critic.q_net().params().values(), scratch.pgrad);
    critic.polyak_step();
    return loss;
}

}  // namespace osil
