#include "osil/cost/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "osil/core/errors.hpp"
#include "osil/simd/kernels.hpp"

namespace osil {

namespace {

std::vector<int> encoder_sizes(const CostModelConfig& cfg) {
    if (cfg.obs_dim < 1 || cfg.n_actions < 1) {
        throw ConfigError("cost model needs positive obs_dim and n_actions");
    }
    if (cfg.embed_dim < 1) throw ConfigError("cost model embed_dim must be positive");
    std::vector<int> sizes{cfg.obs_dim + cfg.n_actions};
    sizes.insert(sizes.end(), cfg.encoder_hidden.begin(), cfg.encoder_hidden.end());
    sizes.push_back(cfg.embed_dim);
    return sizes;
}

double check_eta(double eta) {
    if (!(eta > 0.0)) throw ConfigError("contrastive temperature eta must be positive");
    return eta;
}

// softplus(x) = log(1 + e^x) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace

CostModel::CostModel(const CostModelConfig& cfg, Rng& init_rng)
    : n_actions_(cfg.n_actions),
      eta_(check_eta(cfg.eta)),
      encoder_(encoder_sizes(cfg), cfg.activation, OutputTransform::kUnitNormalize,
               "cost_encoder"),
      head_({cfg.embed_dim, 1}, cfg.activation, OutputTransform::kSigmoid, "cost_head") {
    encoder_.init_glorot(init_rng);
    head_.init_glorot(init_rng);
}

void CostModel::build_input(std::span<const double> obs, int action,
                            std::vector<double>& out) const {
    if (static_cast<int>(obs.size()) + n_actions_ != encoder_.input_dim()) {
        throw DataError("cost model observation dimensionality mismatch");
    }
    if (action < 0 || action >= n_actions_) {
        throw DataError("cost model action out of range: " + std::to_string(action));
    }
    out.assign(encoder_.input_dim(), 0.0);
    std::copy(obs.begin(), obs.end(), out.begin());
    out[obs.size() + static_cast<std::size_t>(action)] = 1.0;
}

const std::vector<double>& CostModel::embed(std::span<const double> obs, int action,
                                            CostModelWorkspace& ws) const {
    build_input(obs, action, ws.input);
    encoder_.forward(ws.input, ws.enc);
    return ws.enc.out;
}

double CostModel::cost(std::span<const double> obs, int action, CostModelWorkspace& ws) const {
    head_.forward(embed(obs, action, ws), ws.head);
    return ws.head.out[0];
}

Segment make_segment(const PartialTrajectoryBatch& batch, int seg_index) {
    Segment seg;
    seg.reserve(batch.horizon);
    for (int t = 0; t < batch.horizon; ++t) {
        seg.push_back({&batch.observation(seg_index, t), batch.action(seg_index, t)});
    }
    return seg;
}

Segment make_segment(const std::vector<std::vector<double>>& observations,
                     const std::vector<int>& actions) {
    if (observations.size() < actions.size()) {
        throw DataError("segment needs an observation for every action");
    }
    Segment seg;
    seg.reserve(actions.size());
    for (std::size_t t = 0; t < actions.size(); ++t) seg.push_back({&observations[t], actions[t]});
    return seg;
}

double discounted_model_cost(const Segment& segment, const CostModel& model, double gamma,
                             CostModelWorkspace& ws) {
    double total = 0.0;
    double discount = 1.0;
    for (const StepRef& step : segment) {
        total += discount * model.cost(*step.obs, step.action, ws);
        discount *= gamma;
    }
    return total;
}

SupConResult supcon_loss(const std::vector<std::vector<double>>& embeddings,
                         const std::vector<int>& labels, double eta) {
    check_eta(eta);
    const int n = static_cast<int>(embeddings.size());
    if (n < 2) throw DataError("supcon_loss needs at least 2 samples");
    if (labels.size() != embeddings.size()) throw DataError("supcon_loss labels/embedding count");
    const std::size_t dim = embeddings[0].size();
    const auto& k = simd::active();

    SupConResult res;
    for (int i = 0; i < n; ++i) {
        if (embeddings[i].size() != dim) throw DataError("supcon_loss embedding dim mismatch");
        int n_pos = 0;
        for (int b = 0; b < n; ++b) {
            if (b != i && labels[b] == labels[i]) ++n_pos;
        }
        if (n_pos == 0) {
            ++res.n_skipped;
            continue;
        }
        double max_logit = -std::numeric_limits<double>::infinity();
        for (int b = 0; b < n; ++b) {
            if (b == i) continue;
            max_logit = std::max(max_logit, k.dot(embeddings[i].data(), embeddings[b].data(), dim) / eta);
        }
        double denom = 0.0, pos_sum = 0.0;
        for (int b = 0; b < n; ++b) {
            if (b == i) continue;
            const double logit = k.dot(embeddings[i].data(), embeddings[b].data(), dim) / eta;
            denom += std::exp(logit - max_logit);
            if (labels[b] == labels[i]) pos_sum += logit;
        }
        const double log_denom = max_logit + std::log(denom);
        res.loss += log_denom - pos_sum / n_pos;
        ++res.n_anchors;
    }
    res.loss /= res.n_anchors > 0 ? res.n_anchors : 1;
    return res;
}

double contrastive_embedding_loss(const std::vector<std::vector<double>>& embeddings,
                                  const std::vector<int>& segment_of, double eta,
                                  std::vector<std::vector<double>>* dz) {
    check_eta(eta);
    const int n = static_cast<int>(embeddings.size());
    if (n < 2) throw DataError("contrastive loss needs at least 2 anchors");
    if (segment_of.size() != embeddings.size()) {
        throw DataError("contrastive loss segment index count mismatch");
    }
    const std::size_t dim = embeddings[0].size();
    const auto& k = simd::active();

    std::vector<int> n_pos(n, 0);
    for (int i = 0; i < n; ++i) {
        if (embeddings[i].size() != dim) throw DataError("contrastive embedding dim mismatch");
        for (int b = 0; b < n; ++b) {
            if (b != i && segment_of[b] == segment_of[i]) ++n_pos[i];
        }
    }
    for (int i = 0; i < n; ++i) {
        if (n_pos[i] == 0) {
            throw DataError("contrastive loss: segment " + std::to_string(segment_of[i]) +
                            " has a single step; segments need length >= 2");
        }
    }

    std::vector<double> logits(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int b = 0; b < n; ++b) {
            if (b == i) continue;
            logits[i * n + b] = k.dot(embeddings[i].data(), embeddings[b].data(), dim) / eta;
        }
    }

    // grad_coeff[i][b] = dL/d logits[i][b] * n (softmax minus positive-indicator).
    std::vector<double> grad_coeff;
    if (dz != nullptr) grad_coeff.assign(static_cast<std::size_t>(n) * n, 0.0);

    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
        double max_logit = -std::numeric_limits<double>::infinity();
        for (int b = 0; b < n; ++b) {
            if (b != i) max_logit = std::max(max_logit, logits[i * n + b]);
        }
        double denom = 0.0;
        for (int b = 0; b < n; ++b) {
            if (b != i) denom += std::exp(logits[i * n + b] - max_logit);
        }
        const double log_denom = max_logit + std::log(denom);
        double pos_mean = 0.0;
        for (int b = 0; b < n; ++b) {
            if (b != i && segment_of[b] == segment_of[i]) pos_mean += logits[i * n + b];
        }
        pos_mean /= n_pos[i];
        loss += log_denom - pos_mean;

        if (dz != nullptr) {
            for (int b = 0; b < n; ++b) {
                if (b == i) continue;
                const double q = std::exp(logits[i * n + b] - max_logit) / denom;
                const double pos = segment_of[b] == segment_of[i] ? 1.0 / n_pos[i] : 0.0;
                grad_coeff[i * n + b] = q - pos;
            }
        }
    }
    loss /= n;

    if (dz != nullptr) {
        dz->assign(n, std::vector<double>(dim, 0.0));
        const double scale = 1.0 / (n * eta);
        for (int i = 0; i < n; ++i) {
            double* g = (*dz)[i].data();
            for (int b = 0; b < n; ++b) {
                if (b == i) continue;
                const double c = scale * (grad_coeff[i * n + b] + grad_coeff[b * n + i]);
                if (c != 0.0) k.axpy(c, embeddings[b].data(), g, dim);
            }
        }
    }
    return loss;
}

double contrastive_loss(const PartialTrajectoryBatch& batch, const CostModel& model,
                        std::span<double> encoder_pgrad, CostScratch& scratch) {
    const int n_seg = batch.size();
    const int h = batch.horizon;
    const int n = n_seg * h;
    scratch.z.resize(n);
    scratch.segment_of.resize(n);
    int k = 0;
    for (int s = 0; s < n_seg; ++s) {
        for (int t = 0; t < h; ++t, ++k) {
            scratch.z[k] = model.embed(batch.observation(s, t), batch.action(s, t), scratch.ws);
            scratch.segment_of[k] = s;
        }
    }

    const double loss = contrastive_embedding_loss(
        scratch.z, scratch.segment_of, model.eta(), encoder_pgrad.empty() ? nullptr : &scratch.dz);

    if (!encoder_pgrad.empty()) {
        k = 0;
        for (int s = 0; s < n_seg; ++s) {
            for (int t = 0; t < h; ++t, ++k) {
                model.embed(batch.observation(s, t), batch.action(s, t), scratch.ws);
                model.encoder().backward(scratch.ws.enc, scratch.dz[k], encoder_pgrad);
            }
        }
    }
    return loss;
}

BradleyTerry bradley_terry_nonpref(double cost_n, double cost_u) {
    const double delta = cost_n - cost_u;
    BradleyTerry bt;
    bt.loss = softplus(-delta);
    // Branching keeps the two swapped probabilities exact complements: the
    // larger-cost side computes q = 1/(1+e^{-|delta|}) >= 1/2 and the other
    // side returns 1 - q, which is exact in that range.
    if (cost_n >= cost_u) {
        bt.p_non = 1.0 / (1.0 + std::exp(cost_u - cost_n));
    } else {
        bt.p_non = 1.0 - 1.0 / (1.0 + std::exp(cost_n - cost_u));
    }
    return bt;
}

PreferenceResult preference_loss(const Segment& tau_n, const Segment& tau_u,
                                 const CostModel& model, double gamma,
                                 std::span<double> encoder_pgrad, std::span<double> head_pgrad,
                                 CostModelWorkspace& ws, double grad_weight) {
    if (tau_n.empty() || tau_u.empty()) throw DataError("preference segments must be nonempty");

    PreferenceResult res;
    res.cost_n = discounted_model_cost(tau_n, model, gamma, ws);
    res.cost_u = discounted_model_cost(tau_u, model, gamma, ws);
    const BradleyTerry bt = bradley_terry_nonpref(res.cost_n, res.cost_u);
    res.loss = bt.loss;
    res.p_non = bt.p_non;

    if (encoder_pgrad.empty() && head_pgrad.empty()) return res;

    // dL/dC(τ_N) = p_non − 1, dL/dC(τ_U) = 1 − p_non; each step of a segment
    // contributes through c̃ with weight γ^t.
    std::vector<double> input_grad(model.embed_dim());
    auto backprop_segment = [&](const Segment& seg, double dl_dcost) {
        double discount = 1.0;
        for (const StepRef& step : seg) {
            model.cost(*step.obs, step.action, ws);
            const double g_out = dl_dcost * discount * grad_weight;
            std::fill(input_grad.begin(), input_grad.end(), 0.0);
            model.head().backward(ws.head, std::span<const double>(&g_out, 1), head_pgrad,
                                  input_grad);
            model.encoder().backward(ws.enc, input_grad, encoder_pgrad);
            discount *= gamma;
        }
    };
    backprop_segment(tau_n, bt.p_non - 1.0);
    backprop_segment(tau_u, 1.0 - bt.p_non);
    return res;
}

CostStepResult joint_cost_step(const PartialTrajectoryBatch& batch, CostModel& model,
                               CostOptimizer& opt, Rng& rng, const CostStepOptions& options,
                               CostScratch& scratch) {
    std::vector<int> union_segs, nonpref_segs;
    for (int s = 0; s < batch.size(); ++s) {
        (batch.segments[s].label == DatasetLabel::kUnion ? union_segs : nonpref_segs).push_back(s);
    }
    if (union_segs.empty() || nonpref_segs.empty()) {
        throw DataError("joint cost step needs both union and non-preferred segments");
    }

    scratch.enc_pgrad.assign(model.encoder().params().size(), 0.0);
    scratch.head_pgrad.assign(model.head().params().size(), 0.0);

    CostStepResult res;
    if (options.use_contrastive) {
        res.cont_loss = contrastive_loss(batch, model, scratch.enc_pgrad, scratch);
    }

    const double pair_weight = 1.0 / nonpref_segs.size();
    for (int n_idx : nonpref_segs) {
        const int u_idx = union_segs[rng.uniform_int(static_cast<int>(union_segs.size()))];
        const PreferenceResult pref =
            preference_loss(make_segment(batch, n_idx), make_segment(batch, u_idx), model,
                            options.gamma, scratch.enc_pgrad, scratch.head_pgrad, scratch.ws,
                            pair_weight);
        res.pref_loss += pref.loss * pair_weight;
    }

    if (options.grad_clip > 0.0) {
        // The encoder and head act as one network here, so the clip is on
        // their joint gradient norm.
        const simd::Kernels& k = simd::active();
        const double norm_sq = k.sum_sq(scratch.enc_pgrad.data(), scratch.enc_pgrad.size()) +
                               k.sum_sq(scratch.head_pgrad.data(), scratch.head_pgrad.size());
        const double norm = std::sqrt(norm_sq);
        if (norm > options.grad_clip) {
            const double scale = options.grad_clip / norm;
            k.scale(scale, scratch.enc_pgrad.data(), scratch.enc_pgrad.size());
            k.scale(scale, scratch.head_pgrad.data(), scratch.head_pgrad.size());
        }
    }
    opt.encoder().step(model.encoder().params().values(), scratch.enc_pgrad);
    opt.head().step(model.head().params().values(), scratch.head_pgrad);
    return res;
}

}  // namespace osil
