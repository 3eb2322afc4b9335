#include "osil/diff/adam.hpp"

#include <cmath>

#include "osil/simd/kernels.hpp"

namespace osil {

AdamState::AdamState(std::size_t n, AdamConfig cfg) : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {
    if (cfg_.learning_rate <= 0.0) throw ConfigError("Adam: learning_rate must be positive");
    if (cfg_.beta1 < 0.0 || cfg_.beta1 >= 1.0) throw ConfigError("Adam: beta1 out of [0,1)");
    if (cfg_.beta2 < 0.0 || cfg_.beta2 >= 1.0) throw ConfigError("Adam: beta2 out of [0,1)");
    if (cfg_.epsilon <= 0.0) throw ConfigError("Adam: epsilon must be positive");
    if (cfg_.weight_decay < 0.0) throw ConfigError("Adam: weight_decay must be nonnegative");
}

void AdamState::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw DataError("Adam: parameter/gradient size mismatch");
    }
    const simd::Kernels& k = simd::active();
    if (!std::isfinite(k.sum(grads.data(), grads.size()))) {
        throw NumericError("Adam: non-finite gradient");
    }
    if (cfg_.weight_decay > 0.0) {
        k.scale(1.0 - cfg_.learning_rate * cfg_.weight_decay, params.data(), params.size());
    }
    ++step_count_;
    const double inv_bc1 = 1.0 / (1.0 - std::pow(cfg_.beta1, static_cast<double>(step_count_)));
    const double inv_bc2 = 1.0 / (1.0 - std::pow(cfg_.beta2, static_cast<double>(step_count_)));
    k.adam_update(params.data(), m_.data(), v_.data(), grads.data(), cfg_.learning_rate,
                  cfg_.beta1, cfg_.beta2, cfg_.epsilon, inv_bc1, inv_bc2, params.size());
    if (!std::isfinite(k.sum(params.data(), params.size()))) {
        throw NumericError("Adam: non-finite parameter after step");
    }
}

void clip_grad_norm(std::span<double> grads, double max_norm) {
    if (max_norm <= 0.0) return;
    const simd::Kernels& k = simd::active();
    const double norm = std::sqrt(k.sum_sq(grads.data(), grads.size()));
    if (norm > max_norm) {
        k.scale(max_norm / norm, grads.data(), grads.size());
    }
}

}  // namespace osil
