#include "osil/policy/train.hpp"

#include <string>
#include <utility>

#include "osil/core/errors.hpp"

namespace osil {
namespace {

void validate_config(const OsilConfig& cfg, const DatasetView& union_view,
                     const DatasetView* nonpref_view) {
    if (cfg.optim.steps <= 0) throw ConfigError("steps must be positive");
    if (cfg.optim.batch_size <= 0) throw ConfigError("batch size must be positive");
    if (!(cfg.optim.lr > 0.0)) throw ConfigError("learning rate must be positive");
    if (cfg.optim.log_every <= 0) throw ConfigError("log cadence must be positive");
    if (cfg.optim.eval_every < 0) throw ConfigError("eval cadence must be nonnegative");
    if (cfg.alpha_bar < 0.0) throw ConfigError("alpha_bar must be nonnegative");
    if (union_view.size() == 0) throw DataError("union dataset is empty");
    if (cfg.alpha_bar > 0.0) {
        if (nonpref_view == nullptr) {
            throw ConfigError("non-preferred dataset required when alpha_bar > 0");
        }
        if (nonpref_view->size() == 0) throw DataError("non-preferred dataset is empty");
        if (nonpref_view->obs_dim() != union_view.obs_dim() ||
            nonpref_view->n_actions() != union_view.n_actions()) {
            throw DataError("union and non-preferred datasets disagree on dimensions");
        }
        if (cfg.segment_len < 1) throw ConfigError("segment length must be at least 1");
        if (!(cfg.eta > 0.0)) throw ConfigError("contrastive temperature must be positive");
        if (!(cfg.zeta > 0.0 && cfg.zeta <= 1.0)) throw ConfigError("zeta must be in (0, 1]");
        if (cfg.embed_dim < 1) throw ConfigError("embedding dimension must be positive");
    }
}

template <typename Error>
[[noreturn]] void rethrow_at(int step, const Error& e) {
    throw Error("iteration " + std::to_string(step) + ": " + e.what());
}

TrainResult run_loop(const DatasetView& union_view, const DatasetView* nonpref_view,
                     const OsilConfig& cfg, const Evaluator& evaluator) {
    validate_config(cfg, union_view, nonpref_view);
    const bool lagrangian = cfg.alpha_bar > 0.0;

    // Every consumer draws from its own child stream, so adding or removing
    // one component never perturbs the others. This is what makes the
    // alpha_bar == 0 run bitwise identical to plain behavior cloning.
    Rng root(cfg.optim.seed);
    Rng rng_policy_init = root.child("init_policy");
    Rng rng_policy_batch = root.child("policy_batch");

    PolicyConfig pcfg;
    pcfg.obs_dim = union_view.obs_dim();
    pcfg.space.kind = ActionSpaceKind::kDiscrete;
    pcfg.space.n_actions = union_view.n_actions();
    pcfg.hidden = cfg.policy_hidden;
    auto policy = std::make_unique<StochasticPolicy>(pcfg, rng_policy_init);

    AdamConfig adam_cfg;
    adam_cfg.learning_rate = cfg.optim.lr;
    adam_cfg.weight_decay = cfg.optim.weight_decay;
    AdamState policy_opt(policy->net().params().size(), adam_cfg);

    std::unique_ptr<CostModel> cost_model;
    std::unique_ptr<CostCritic> critic;
    std::unique_ptr<CostOptimizer> cost_opt;
    std::unique_ptr<AdamState> critic_opt;
    std::unique_ptr<ModelCostSource> cost_source;
    Rng rng_cost_init = root.child("init_cost");
    Rng rng_critic_init = root.child("init_critic");
    Rng rng_cost_batch = root.child("cost_batch");
    Rng rng_critic_batch = root.child("critic_batch");
    Rng rng_initial_batch = root.child("initial_batch");
    Rng rng_bootstrap = root.child("bootstrap");
    if (lagrangian) {
        CostModelConfig ccfg;
        ccfg.obs_dim = union_view.obs_dim();
        ccfg.n_actions = union_view.n_actions();
        ccfg.encoder_hidden = cfg.encoder_hidden;
        ccfg.embed_dim = cfg.embed_dim;
        ccfg.eta = cfg.eta;
        cost_model = std::make_unique<CostModel>(ccfg, rng_cost_init);
        cost_opt = std::make_unique<CostOptimizer>(*cost_model, adam_cfg);
        cost_source = std::make_unique<ModelCostSource>(*cost_model);

        CostCriticConfig qcfg;
        qcfg.obs_dim = union_view.obs_dim();
        qcfg.n_actions = union_view.n_actions();
        qcfg.hidden = cfg.critic_hidden;
        qcfg.zeta = cfg.zeta;
        qcfg.gamma = cfg.optim.gamma;
        critic = std::make_unique<CostCritic>(qcfg, rng_critic_init);
        critic_opt = std::make_unique<AdamState>(critic->q_net().params().size(), adam_cfg);
    }

    CostStepOptions cost_opts;
    cost_opts.gamma = cfg.optim.gamma;
    cost_opts.use_contrastive = cfg.use_contrastive;
    cost_opts.grad_clip = cfg.optim.grad_clip;

    PolicyStepOptions policy_opts;
    policy_opts.alpha_bar = cfg.alpha_bar;
    policy_opts.grad_clip = cfg.optim.grad_clip;

    CostScratch cost_scratch;
    CriticScratch critic_scratch;
    PolicyScratch policy_scratch;
    MlpWorkspace bootstrap_ws;
    const BootstrapPolicy bootstrap = [&policy, &bootstrap_ws](std::span<const double> next_obs,
                                                               Rng& rng) {
        return policy->sample_discrete(next_obs, bootstrap_ws, rng);
    };

    const int bag = cfg.bag_size > 0 ? cfg.bag_size : cfg.optim.batch_size / 2;
    const StateActionBatch empty_initial;

    TrainResult result;
    for (int step = 1; step <= cfg.optim.steps; ++step) {
        CostStepResult cost_res;
        double critic_loss = 0.0;
        PolicyStepResult policy_res;
        try {
            if (lagrangian) {
                const PartialTrajectoryBatch bag_batch = sample_partial_batch(
                    union_view, *nonpref_view, bag, bag, cfg.segment_len, rng_cost_batch);
                cost_res = joint_cost_step(bag_batch, *cost_model, *cost_opt, rng_cost_batch,
                                           cost_opts, cost_scratch);

                const TransitionBatch transitions =
                    sample_transitions(union_view, cfg.optim.batch_size, rng_critic_batch);
                critic_loss =
                    critic_step(*critic, *cost_source, transitions, bootstrap, *critic_opt,
                                rng_bootstrap, critic_scratch, cfg.optim.grad_clip);
            }

            const StateActionBatch union_batch =
                sample_state_actions(union_view, cfg.optim.batch_size, rng_policy_batch);
            if (lagrangian) {
                const StateActionBatch initial_batch = sample_initial_state_actions(
                    union_view, cfg.optim.batch_size, rng_initial_batch);
                policy_res = policy_step(*policy, critic.get(), union_batch, initial_batch,
                                         policy_opt, policy_opts, policy_scratch, critic_scratch);
            } else {
                policy_res = policy_step(*policy, nullptr, union_batch, empty_initial, policy_opt,
                                         policy_opts, policy_scratch, critic_scratch);
            }
        } catch (const ConfigError& e) {
            rethrow_at(step, e);
        } catch (const DataError& e) {
            rethrow_at(step, e);
        } catch (const NumericError& e) {
            rethrow_at(step, e);
        }

        const bool log_due = step % cfg.optim.log_every == 0 || step == cfg.optim.steps;
        const bool eval_due = evaluator && cfg.optim.eval_every > 0 &&
                              (step % cfg.optim.eval_every == 0 || step == cfg.optim.steps);
        if (log_due || eval_due) {
            nlohmann::json line;
            line["step"] = step;
            line["bc"] = policy_res.bc_term;
            if (lagrangian) {
                line["pref"] = cost_res.pref_loss;
                if (cfg.use_contrastive) line["cont"] = cost_res.cont_loss;
                line["critic"] = critic_loss;
                line["critic_term"] = policy_res.critic_term;
                line["alpha"] = policy_res.alpha;
            }
            if (eval_due) line.update(evaluator(step, *policy));
            result.log_lines.push_back(line.dump());
        }
    }

    result.cost_model = std::move(cost_model);
    result.critic = std::move(critic);
    result.policy = std::move(policy);
    return result;
}

}  // namespace

OsilConfig desk_osil_config(std::uint64_t seed) {
    OsilConfig cfg;
    cfg.optim.lr = 3e-4;
    cfg.optim.batch_size = 64;
    cfg.optim.steps = 50'000;
    cfg.optim.seed = seed;
    cfg.policy_hidden = {32, 32};
    cfg.critic_hidden = {32, 32};
    cfg.encoder_hidden = {32, 32};
    cfg.embed_dim = 16;
    cfg.bag_size = 16;
    // A large penalty base keeps the effective alpha meaningful even after
    // the adaptive normalizer grows: once the policy is safer than the data,
    // mean exp(Q(s0,a0) - E_pi Q) rises roughly like e^gap, throttling alpha
    // by two orders of magnitude on the hazard grid.
    cfg.alpha_bar = 2.0;
    return cfg;
}

TrainResult train_osil(const DatasetView& union_view, const DatasetView& nonpref_view,
                       const OsilConfig& cfg, const Evaluator& evaluator) {
    return run_loop(union_view, &nonpref_view, cfg, evaluator);
}

TrainResult train_bc_union(const DatasetView& union_view, const OsilConfig& cfg,
                           const Evaluator& evaluator) {
    OsilConfig bc = cfg;
    bc.alpha_bar = 0.0;
    return run_loop(union_view, nullptr, bc, evaluator);
}

}  // namespace osil
