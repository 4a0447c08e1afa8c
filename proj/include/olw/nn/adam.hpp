#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "olw/errors.hpp"
#include "olw/nn/model.hpp"
#include "olw/nn/tensor.hpp"

namespace olw::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Keeps first/second moment estimates aligned with a fixed parameter list.
// Non-trainable parameters hold (empty) slots so indices stay stable.
class AdamState {
 public:
  AdamState(const std::vector<Param*>& params, AdamConfig config = {})
      : config_(config) {
    for (const Param* p : params) {
      m_.emplace_back(p->value.shape);
      v_.emplace_back(p->value.shape);
    }
  }

  const AdamConfig& config() const { return config_; }
  long long step_count() const { return t_; }

  // Applies one update from the gradients currently stored on the params.
  void apply(const std::vector<Param*>& params) {
    if (params.size() != m_.size()) {
      throw config_error("adam state built for " + std::to_string(m_.size()) +
                         " params, got " + std::to_string(params.size()));
    }
    ++t_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      Param& p = *params[i];
      if (!p.trainable) continue;
      for (std::size_t j = 0; j < p.value.v.size(); ++j) {
        double g = p.grad.v[j];
        m_[i].v[j] = config_.beta1 * m_[i].v[j] + (1.0 - config_.beta1) * g;
        v_[i].v[j] = config_.beta2 * v_[i].v[j] + (1.0 - config_.beta2) * g * g;
        double mhat = m_[i].v[j] / c1;
        double vhat = v_[i].v[j] / c2;
        p.value.v[j] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
      }
    }
  }

 private:
  AdamConfig config_;
  std::vector<Tensor> m_, v_;
  long long t_ = 0;
};

// Zeroes gradients, runs one forward/backward pass over the minibatch, then
// applies an Adam update. A non-finite loss aborts before the update.
inline double train_step(Model& model, AdamState& adam,
                         const std::vector<int>& tokens, int batch, int time,
                         const std::vector<int>& labels,
                         const std::vector<double>& class_weights,
                         Rng& dropout_rng) {
  auto params = model.params();
  for (Param* p : params) p->zero_grad();
  double loss = model.loss_and_gradients(tokens, batch, time, labels,
                                         class_weights, dropout_rng);
  if (!std::isfinite(loss)) {
    throw numeric_error("training loss is not finite");
  }
  adam.apply(params);
  return loss;
}

}  // namespace olw::nn
