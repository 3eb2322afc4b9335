#pragma once

#include <span>
#include <vector>

#include "osil/core/rng.hpp"
#include "osil/data/sampling.hpp"
#include "osil/diff/adam.hpp"
#include "osil/diff/mlp.hpp"

namespace osil {

struct CostModelConfig {
    int obs_dim = 0;
    int n_actions = 0;
    std::vector<int> encoder_hidden{256, 256};
    int embed_dim = 128;
    double eta = 0.1;  // contrastive temperature
    Activation activation = Activation::kRelu;
};

// Scratch for one state-action evaluation; reuse across calls.
struct CostModelWorkspace {
    std::vector<double> input;
    MlpWorkspace enc;
    MlpWorkspace head;
};

// Per-step cost c̃ = g∘f. The encoder f maps a state-action pair to a
// unit-norm embedding used by the contrastive loss; the head g is a single
// linear layer squashed into (0,1), so discounted segment costs are bounded.
class CostModel {
  public:
    CostModel(const CostModelConfig& cfg, Rng& init_rng);

    int input_dim() const { return encoder_.input_dim(); }
    int embed_dim() const { return encoder_.output_dim(); }
    int n_actions() const { return n_actions_; }
    double eta() const { return eta_; }
    Mlp& encoder() { return encoder_; }
    const Mlp& encoder() const { return encoder_; }
    Mlp& head() { return head_; }
    const Mlp& head() const { return head_; }

    // input = obs ⊕ one_hot(action).
    void build_input(std::span<const double> obs, int action, std::vector<double>& out) const;

    // z = f(s,a); the result aliases ws.enc.out until the next forward.
    const std::vector<double>& embed(std::span<const double> obs, int action,
                                     CostModelWorkspace& ws) const;

    // c̃(s,a) = g(f(s,a)) ∈ (0,1).
    double cost(std::span<const double> obs, int action, CostModelWorkspace& ws) const;

  private:
    int n_actions_;
    double eta_;
    Mlp encoder_;
    Mlp head_;
};

// A borrowed sequence of state-action steps; the observation storage must
// outlive the segment.
struct StepRef {
    const std::vector<double>* obs = nullptr;
    int action = 0;
};
using Segment = std::vector<StepRef>;

Segment make_segment(const PartialTrajectoryBatch& batch, int seg_index);
// Full-episode segment for evaluation; observations may carry the usual
// trailing next-state entry.
Segment make_segment(const std::vector<std::vector<double>>& observations,
                     const std::vector<int>& actions);

// C(τ) = Σ_t γ^t c̃(s_t, a_t), with the discount restarting at the segment's
// first step.
double discounted_model_cost(const Segment& segment, const CostModel& model, double gamma,
                             CostModelWorkspace& ws);

// Supervised contrastive loss over pre-computed embeddings: positives are
// the other samples with the same label, the denominator runs over all
// other samples. Anchors whose label has no second occurrence cannot form
// a positive set; they are skipped and counted.
struct SupConResult {
    double loss = 0.0;
    int n_anchors = 0;
    int n_skipped = 0;
};
SupConResult supcon_loss(const std::vector<std::vector<double>>& embeddings,
                         const std::vector<int>& labels, double eta);

// Same loss with segments as labels, plus its exact gradient with respect
// to each embedding (written to dz when non-null). Every segment must have
// at least two member anchors. Loss is the anchor average.
double contrastive_embedding_loss(const std::vector<std::vector<double>>& embeddings,
                                  const std::vector<int>& segment_of, double eta,
                                  std::vector<std::vector<double>>* dz);

// Shared scratch for the model-level losses and the joint step.
struct CostScratch {
    CostModelWorkspace ws;
    std::vector<std::vector<double>> z;
    std::vector<std::vector<double>> dz;
    std::vector<int> segment_of;
    std::vector<double> input_grad;
    std::vector<double> enc_pgrad;
    std::vector<double> head_pgrad;
};

// Embeds every step of every segment in the batch (positives = same
// segment) and, when encoder_pgrad is non-empty, accumulates the loss
// gradient into it. Returns the anchor-averaged loss.
double contrastive_loss(const PartialTrajectoryBatch& batch, const CostModel& model,
                        std::span<double> encoder_pgrad, CostScratch& scratch);

// Bradley-Terry probability that the first argument is the non-preferred
// (higher-cost) one, and the matching hard-label loss −log p_non. The two
// swapped calls return probabilities that sum to 1 exactly.
struct BradleyTerry {
    double loss = 0.0;
    double p_non = 0.0;
};
BradleyTerry bradley_terry_nonpref(double cost_n, double cost_u);

// Preference loss for one (τ_N, τ_U) pair using discounted model costs.
// Gradients (scaled by grad_weight) accumulate into the pgrad spans when
// non-empty.
struct PreferenceResult {
    double loss = 0.0;
    double p_non = 0.0;
    double cost_n = 0.0;
    double cost_u = 0.0;
};
PreferenceResult preference_loss(const Segment& tau_n, const Segment& tau_u,
                                 const CostModel& model, double gamma,
                                 std::span<double> encoder_pgrad, std::span<double> head_pgrad,
                                 CostModelWorkspace& ws, double grad_weight = 1.0);

// Adam moments for both networks of the cost model.
class CostOptimizer {
  public:
    CostOptimizer(const CostModel& model, const AdamConfig& cfg)
        : enc_(model.encoder().params().size(), cfg),
          head_(model.head().params().size(), cfg) {}
    AdamState& encoder() { return enc_; }
    AdamState& head() { return head_; }

  private:
    AdamState enc_, head_;
};

struct CostStepOptions {
    double gamma = 0.99;
    bool use_contrastive = true;  // ablation switch for the encoder loss
    double grad_clip = 0.0;       // joint encoder+head L2 cap; <= 0 disables
};

struct CostStepResult {
    double pref_loss = 0.0;
    double cont_loss = 0.0;
};

// One optimization step on L_pref + L_cont. Each non-preferred segment in
// the batch is paired with a uniformly drawn union segment from the same
// batch; the preference loss averages over those pairs. The batch must
// contain segments of both labels.
CostStepResult joint_cost_step(const PartialTrajectoryBatch& batch, CostModel& model,
                               CostOptimizer& opt, Rng& rng, const CostStepOptions& options,
                               CostScratch& scratch);

}  // namespace osil
