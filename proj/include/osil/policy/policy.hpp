#pragma once

#include <span>
#include <vector>

#include "osil/core/rng.hpp"
#include "osil/cost/cost_critic.hpp"
#include "osil/data/sampling.hpp"
#include "osil/diff/adam.hpp"
#include "osil/diff/mlp.hpp"

namespace osil {

enum class ActionSpaceKind { kDiscrete, kBox };

struct ActionSpace {
    ActionSpaceKind kind = ActionSpaceKind::kDiscrete;
    int n_actions = 0;   // kDiscrete: number of choices
    int action_dim = 0;  // kBox: dimensionality of the [-1, 1]^d action
};

struct PolicyConfig {
    int obs_dim = 0;
    ActionSpace space;
    std::vector<int> hidden{256, 256};
    Activation activation = Activation::kRelu;
};

// Raw log-std outputs are clamped to this range before exponentiation.
inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;
// Box actions may overshoot [-1, 1] by at most this much before the
// inverse squash rejects them as out of bounds.
inline constexpr double kActionBoundTolerance = 1e-6;

// Stochastic policy: categorical over logits for discrete spaces, or a
// tanh-squashed diagonal Gaussian for box spaces (network emits mean and
// log-std per dimension).
class StochasticPolicy {
  public:
    StochasticPolicy(const PolicyConfig& cfg, Rng& init_rng);

    const ActionSpace& space() const { return space_; }
    int obs_dim() const { return obs_dim_; }
    Mlp& net() { return net_; }
    const Mlp& net() const { return net_; }

    // Discrete: fills `out` with the log-softmax of the logits.
    void discrete_log_probs(std::span<const double> obs, MlpWorkspace& ws,
                            std::vector<double>& out) const;
    int sample_discrete(std::span<const double> obs, MlpWorkspace& ws, Rng& rng) const;

    // Box: draws a = tanh(mean + std * eps) with eps ~ N(0, I).
    void sample_box(std::span<const double> obs, MlpWorkspace& ws, Rng& rng,
                    std::vector<double>& action) const;
    // Tanh-corrected log-density of a given box action.
    double box_log_prob(std::span<const double> obs, std::span<const double> action,
                        MlpWorkspace& ws) const;

  private:
    ActionSpace space_;
    int obs_dim_ = 0;
    Mlp net_;
};

struct PolicyScratch {
    MlpWorkspace ws;
    std::vector<double> grad_out;
    std::vector<double> buf;    // probabilities / per-dim terms
    std::vector<double> q_row;  // critic values per action at one state
    std::vector<double> pgrad;  // parameter gradient accumulator
};

// Continuous state-action pairs viewed from caller-owned storage.
struct BoxBatch {
    std::vector<const std::vector<double>*> obs;
    std::vector<const std::vector<double>*> actions;

    int size() const { return static_cast<int>(actions.size()); }
};

// Mean negative log-likelihood of the batch actions. Accumulates the
// parameter gradient into `pgrad` when non-empty.
double bc_loss(const StochasticPolicy& policy, const StateActionBatch& batch,
               std::span<double> pgrad, PolicyScratch& scratch);
double bc_loss_box(const StochasticPolicy& policy, const BoxBatch& batch, std::span<double> pgrad,
                   PolicyScratch& scratch);

// Adaptive penalty coefficient: alpha_bar / mean_i exp(Q(s0,a0) - Q(s0,pi)),
// with each exponent clamped to [-10, 10]. For discrete policies Q(s0,pi)
// is the exact expectation under the current policy. The result is a
// constant with respect to policy gradients.
double adaptive_alpha(const CostCritic& critic, const StochasticPolicy& policy,
                      const StateActionBatch& initial_batch, double alpha_bar,
                      PolicyScratch& scratch, CriticScratch& critic_scratch);

struct PolicyStepOptions {
    double alpha_bar = 0.005;
    double grad_clip = 0.0;  // L2 cap on the parameter gradient; <= 0 disables
};

struct PolicyStepResult {
    double bc_term = 0.0;
    double critic_term = 0.0;  // alpha * mean_i E_pi[Q(s0_i, .)]
    double alpha = 0.0;
};

// One Adam step on bc_loss + alpha * mean_i E_pi[Q(s0_i, .)]. For discrete
// policies the critic term uses the exact expectation over actions with the
// batch-mean Q subtracted as a baseline. With alpha_bar == 0 the update is
// bitwise identical to a pure behavior-cloning step and `critic` may be
// null and `initial_batch` empty.
PolicyStepResult policy_step(StochasticPolicy& policy, const CostCritic* critic,
                             const StateActionBatch& union_batch,
                             const StateActionBatch& initial_batch, AdamState& opt,
                             const PolicyStepOptions& options, PolicyScratch& scratch,
                             CriticScratch& critic_scratch);

}  // namespace osil
