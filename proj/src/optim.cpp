#include "prvnet/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace prvnet {

Tensor he_init(std::vector<int> shape, int fan_in, Rng& rng) {
  if (fan_in <= 0) throw std::invalid_argument("he_init: fan_in must be positive");
  Tensor t(std::move(shape));
  const double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (std::int64_t i = 0; i < t.numel(); ++i)
    t.at(i) = static_cast<float>(rng.gaussian() * std_dev);
  return t;
}

AdamState::AdamState(const std::vector<const Tensor*>& params, AdamConfig cfg) : cfg_(cfg) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const Tensor* p : params) {
    m_.emplace_back(p->shape());
    v_.emplace_back(p->shape());
  }
}

void adam_step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
               AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m_.size())
    throw std::invalid_argument("adam_step: params/grads/state sizes differ: " +
                                std::to_string(params.size()) + "/" + std::to_string(grads.size()) +
                                "/" + std::to_string(state.m_.size()));
  const AdamConfig& c = state.cfg_;
  const std::int64_t t = ++state.step_;
  const float bc1 = static_cast<float>(1.0 - std::pow(static_cast<double>(c.beta1), t));
  const float bc2 = static_cast<float>(1.0 - std::pow(static_cast<double>(c.beta2), t));

  for (size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = *grads[i];
    if (!p.same_shape(state.m_[i]) || !g.same_shape(state.m_[i]))
      throw std::invalid_argument("adam_step: param/grad shape " + p.shape_str() + "/" +
                                  g.shape_str() + " does not match state slot " +
                                  state.m_[i].shape_str());
    auto pa = p.arr();
    auto ga = g.arr();
    auto ma = state.m_[i].arr();
    auto va = state.v_[i].arr();

    if (c.weight_decay != 0.0f) pa -= (c.lr * c.weight_decay) * pa;
    ma = c.beta1 * ma + (1.0f - c.beta1) * ga;
    va = c.beta2 * va + (1.0f - c.beta2) * ga.square();
    pa -= c.lr * (ma / bc1) / ((va / bc2).sqrt() + c.eps);
  }
}

}  // namespace prvnet
