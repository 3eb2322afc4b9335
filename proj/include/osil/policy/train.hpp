#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "osil/cost/cost_critic.hpp"
#include "osil/cost/cost_model.hpp"
#include "osil/data/sampling.hpp"
#include "osil/policy/policy.hpp"

namespace osil {

// Optimization knobs shared by every learner (one column of the
// hyperparameter table). Defaults are the full-scale settings; see
// desk_osil_config for the laptop-sized preset.
struct OptimConfig {
    double lr = 1e-5;
    double weight_decay = 0.01;
    int batch_size = 128;
    int steps = 1'000'000;
    double gamma = 0.99;
    double grad_clip = 10.0;  // per-network L2 cap; <= 0 disables
    int log_every = 1000;
    int eval_every = 0;  // 0 disables periodic evaluation callbacks
    std::uint64_t seed = 0;
};

struct OsilConfig {
    OptimConfig optim;
    std::vector<int> policy_hidden{256, 256};
    std::vector<int> critic_hidden{256, 256};
    std::vector<int> encoder_hidden{256, 256};
    int embed_dim = 128;
    int segment_len = 5;  // H, the partial-trajectory window
    int bag_size = 0;     // segments per dataset in the cost bag; 0 -> batch_size / 2
    double eta = 0.1;
    double alpha_bar = 0.005;
    double zeta = 0.005;
    bool use_contrastive = true;
};

// Same algorithm sized to finish a full run in a couple of minutes on one
// CPU core at the default grid size.
OsilConfig desk_osil_config(std::uint64_t seed);

// Periodic evaluation callback; whatever it returns is merged into that
// step's log line. It must not mutate the policy and must be deterministic
// for the log-determinism contract to hold.
using Evaluator = std::function<nlohmann::json(int step, const StochasticPolicy& policy)>;

struct TrainResult {
    std::unique_ptr<CostModel> cost_model;  // null when alpha_bar == 0
    std::unique_ptr<CostCritic> critic;     // null when alpha_bar == 0
    std::unique_ptr<StochasticPolicy> policy;
    std::vector<std::string> log_lines;  // JSON lines, no timestamps
};

// Interleaved cost -> critic -> policy training. Each iteration samples a
// bag of length-H windows from both datasets for the cost model, a
// transition batch from the union data for the critic (bootstrapping
// through the current policy, costs from the current cost model), and
// state-action batches from the union data for the policy step. With
// alpha_bar == 0 the cost model, critic, and initial-state batches are
// skipped entirely and the run is bitwise identical to train_bc_union.
TrainResult train_osil(const DatasetView& union_view, const DatasetView& nonpref_view,
                       const OsilConfig& cfg, const Evaluator& evaluator = {});

// Behavior cloning on the union data: the alpha_bar == 0 path of the same
// loop.
TrainResult train_bc_union(const DatasetView& union_view, const OsilConfig& cfg,
                           const Evaluator& evaluator = {});

}  // namespace osil
