#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "osil/core/errors.hpp"

namespace osil {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.0;  // decoupled; applied before the moment update
};

// Adam with decoupled weight decay. Moments live here; parameters are the
// caller's flat array, which must keep the same length across steps.
class AdamState {
  public:
    AdamState(std::size_t n, AdamConfig cfg);

    void step(std::span<double> params, std::span<const double> grads);

    std::int64_t step_count() const { return step_count_; }
    const AdamConfig& config() const { return cfg_; }
    // Learning-rate schedules adjust this between steps; moments persist.
    void set_learning_rate(double lr) {
        if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
        cfg_.learning_rate = lr;
    }
    std::vector<double>& m() { return m_; }
    std::vector<double>& v() { return v_; }
    void set_step_count(std::int64_t t) { step_count_ = t; }

  private:
    AdamConfig cfg_;
    std::vector<double> m_, v_;
    std::int64_t step_count_ = 0;
};

// Scales `grads` in place so their global L2 norm is at most `max_norm`.
// No-op when max_norm <= 0, so a nonpositive setting disables clipping.
void clip_grad_norm(std::span<double> grads, double max_norm);

}  // namespace osil
