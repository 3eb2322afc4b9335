#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "osil/cost/cost_model.hpp"
#include "osil/data/sampling.hpp"
#include "osil/diff/adam.hpp"
#include "osil/diff/mlp.hpp"
#include "osil/diff/polyak.hpp"
#include "osil/env/tabular_cmdp.hpp"

namespace osil {

struct CostCriticConfig {
    int obs_dim = 0;
    int n_actions = 0;
    std::vector<int> hidden{256, 256};
    double zeta = 0.005;  // Polyak coefficient for the target network
    double gamma = 0.99;
    Activation activation = Activation::kRelu;
};

// Cost action-value Q_c̃(s,a) with a Polyak-averaged target copy used for
// bootstrapping. Both networks read state ⊕ one-hot(action) and emit a
// scalar (identity output).
class CostCritic {
  public:
    CostCritic(const CostCriticConfig& cfg, Rng& init_rng);

    int n_actions() const { return n_actions_; }
    double zeta() const { return zeta_; }
    double gamma() const { return gamma_; }
    Mlp& q_net() { return q_net_; }
    const Mlp& q_net() const { return q_net_; }
    Mlp& q_target() { return q_target_; }
    const Mlp& q_target() const { return q_target_; }

    void build_input(std::span<const double> obs, int action, std::vector<double>& out) const;
    double q_value(std::span<const double> obs, int action, MlpWorkspace& ws,
                   std::vector<double>& input) const;
    double q_target_value(std::span<const double> obs, int action, MlpWorkspace& ws,
                          std::vector<double>& input) const;

    // target <- (1-zeta) * target + zeta * online.
    void polyak_step() { polyak_update(q_target_.params(), q_net_.params(), zeta_); }

  private:
    int n_actions_;
    double zeta_, gamma_;
    Mlp q_net_;
    Mlp q_target_;
};

// Per-step cost feeding the TD target. The learned model is the default;
// the tabular oracle is the privileged ground-truth ablation path.
class CostSource {
  public:
    virtual ~CostSource() = default;
    virtual double step_cost(std::span<const double> obs, int action) = 0;
};

class ModelCostSource final : public CostSource {
  public:
    explicit ModelCostSource(const CostModel& model) : model_(&model) {}
    double step_cost(std::span<const double> obs, int action) override {
        return model_->cost(obs, action, ws_);
    }

  private:
    const CostModel* model_;
    CostModelWorkspace ws_;
};

// Looks states up by their (exact) feature vectors and reads the hidden
// cost table directly.
class OracleCostSource final : public CostSource {
  public:
    OracleCostSource(const std::vector<std::vector<double>>& features, const TabularCmdp& cmdp);
    double step_cost(std::span<const double> obs, int action) override;

  private:
    std::map<std::vector<double>, int> state_of_obs_;
    const TabularCmdp* cmdp_;
};

// Chooses the bootstrap action at s'. Learned policies sample themselves
// (or return the mode, per config); tabular test policies wrap their rows.
using BootstrapPolicy = std::function<int(std::span<const double> next_obs, Rng& rng)>;

struct CriticScratch {
    std::vector<double> input;
    MlpWorkspace ws;
    std::vector<double> pgrad;
};

// y = c(s,a) + γ · Q⁻(s', π(s')), with the bootstrap masked on terminal
// transitions. Constant with respect to all gradients by construction (the
// target network and the cost evaluation are not differentiated here).
double td_target(const CostCritic& critic, CostSource& cost, std::span<const double> obs,
                 int action, std::span<const double> next_obs, bool terminal,
                 const BootstrapPolicy& policy, Rng& rng, CriticScratch& scratch);

// One Adam step on the mean squared TD residual over the batch, followed by
// a Polyak target update. Returns the loss. A positive grad_clip caps the
// gradient's L2 norm before the optimizer step.
double critic_step(CostCritic& critic, CostSource& cost, const TransitionBatch& batch,
                   const BootstrapPolicy& policy, AdamState& opt, Rng& rng,
                   CriticScratch& scratch, double grad_clip = 0.0);

}  // namespace osil
