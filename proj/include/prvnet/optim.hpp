#pragma once

#include "prvnet/rng.hpp"
#include "prvnet/tensor.hpp"

#include <cstdint>
#include <vector>

namespace prvnet {

// He-normal init: i.i.d. N(0, 2/fan_in), drawn in flat index order from `rng`.
Tensor he_init(std::vector<int> shape, int fan_in, Rng& rng);

struct AdamConfig {
  float lr = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
  float weight_decay = 0.0f;  // decoupled; applied to the weights before the adaptive step
};

// First and second moment buffers plus the shared step counter. One state
// drives one parameter list; the list's order and shapes are fixed at
// construction.
class AdamState {
 public:
  AdamState(const std::vector<const Tensor*>& params, AdamConfig cfg);

  const AdamConfig& config() const { return cfg_; }
  AdamConfig& config() { return cfg_; }
  std::int64_t step_count() const { return step_; }
  const Tensor& m(size_t i) const { return m_[i]; }
  const Tensor& v(size_t i) const { return v_[i]; }

  friend void adam_step(const std::vector<Tensor*>& params,
                        const std::vector<const Tensor*>& grads, AdamState& state);

 private:
  AdamConfig cfg_;
  std::int64_t step_ = 0;
  std::vector<Tensor> m_, v_;
};

// One Adam update over the whole parameter list. Decoupled weight decay
// (p -= lr*wd*p) happens first and never enters the moment estimates.
void adam_step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
               AdamState& state);

}  // namespace prvnet
