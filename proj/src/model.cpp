#include "prvnet/model.hpp"

#include "prvnet/ops.hpp"
#include "prvnet/optim.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace prvnet {

std::string to_string(ModelMode m) {
  return m == ModelMode::variational ? "variational" : "point_estimate";
}

ModelMode mode_from_string(const std::string& s) {
  if (s == "variational") return ModelMode::variational;
  if (s == "point_estimate") return ModelMode::point_estimate;
  throw std::invalid_argument("unknown model mode '" + s +
                              "' (expected variational or point_estimate)");
}

Architecture Architecture::for_gamma(double gamma, int n_a, int n_t, ModelMode mode) {
  Architecture a;
  a.n_a = n_a;
  a.n_t = n_t;
  a.mode = mode;
  const int n = a.input_dim();
  const long m = std::lround(gamma * n);
  if (m < 1 || m >= n) {
    throw std::invalid_argument("compression ratio " + std::to_string(gamma) +
                                " gives codeword size " + std::to_string(m) +
                                ", outside [1, " + std::to_string(n) + ")");
  }
  a.m = static_cast<int>(m);
  return a;
}

bool operator==(const Architecture& a, const Architecture& b) {
  return a.n_a == b.n_a && a.n_t == b.n_t && a.enc_ch1 == b.enc_ch1 && a.enc_ch2 == b.enc_ch2 &&
         a.dec_ch1 == b.dec_ch1 && a.dec_ch2 == b.dec_ch2 && a.kernel == b.kernel && a.m == b.m &&
         a.mode == b.mode;
}

namespace {

void check_positive_dims(const Architecture& a) {
  if (a.n_a < 1 || a.n_t < 1 || a.enc_ch1 < 1 || a.enc_ch2 < 1 || a.dec_ch1 < 1 ||
      a.dec_ch2 < 1 || a.m < 1) {
    throw std::invalid_argument("architecture dimensions must be positive");
  }
  if (a.kernel < 1 || a.kernel % 2 == 0) {
    throw std::invalid_argument("kernel size must be odd and positive, got " +
                                std::to_string(a.kernel));
  }
  if (a.m >= a.input_dim()) {
    throw std::invalid_argument("codeword size " + std::to_string(a.m) +
                                " must be smaller than the input dimension " +
                                std::to_string(a.input_dim()));
  }
}

}  // namespace

std::vector<ParamSpec> parameter_layout(const Architecture& a) {
  check_positive_dims(a);
  const int k = a.kernel;
  std::vector<ParamSpec> layout = {
      {"enc_k1", {a.enc_ch1, 2, k, k}, 2 * k * k},
      {"enc_b1", {a.enc_ch1}, 0},
      {"enc_k2", {a.enc_ch2, a.enc_ch1, k, k}, a.enc_ch1 * k * k},
      {"enc_b2", {a.enc_ch2}, 0},
      {"w_head1", {a.flat_dim(), a.m}, a.flat_dim()},
      {"b_head1", {a.m}, 0},
  };
  if (a.mode == ModelMode::variational) {
    layout.push_back({"w_head2", {a.flat_dim(), a.m}, a.flat_dim()});
    layout.push_back({"b_head2", {a.m}, 0});
  }
  layout.push_back({"w_dec", {a.m, a.input_dim()}, a.m});
  layout.push_back({"b_dec", {a.input_dim()}, 0});
  layout.push_back({"dec_k1", {a.dec_ch1, 2, k, k}, 2 * k * k});
  layout.push_back({"dec_b1", {a.dec_ch1}, 0});
  layout.push_back({"dec_k2", {a.dec_ch2, a.dec_ch1, k, k}, a.dec_ch1 * k * k});
  layout.push_back({"dec_b2", {a.dec_ch2}, 0});
  layout.push_back({"dec_k3", {2, a.dec_ch2, k, k}, a.dec_ch2 * k * k});
  layout.push_back({"dec_b3", {2}, 0});
  return layout;
}

ModelParams params_from_tensors(const Architecture& arch, std::vector<Tensor> tensors) {
  const std::vector<ParamSpec> layout = parameter_layout(arch);
  if (tensors.size() != layout.size()) {
    throw std::invalid_argument("expected " + std::to_string(layout.size()) +
                                " parameter tensors, got " + std::to_string(tensors.size()));
  }
  std::vector<Var> vars;
  vars.reserve(layout.size());
  for (size_t i = 0; i < layout.size(); ++i) {
    if (tensors[i].shape() != layout[i].shape) {
      throw std::invalid_argument("parameter " + layout[i].name + " expects shape " +
                                  shape_to_string(layout[i].shape) + ", got " +
                                  tensors[i].shape_str());
    }
    vars.push_back(param(std::move(tensors[i])));
  }
  ModelParams p;
  p.arch = arch;
  size_t i = 0;
  p.enc_k1 = vars[i++];
  p.enc_b1 = vars[i++];
  p.enc_k2 = vars[i++];
  p.enc_b2 = vars[i++];
  p.w_head1 = vars[i++];
  p.b_head1 = vars[i++];
  if (arch.mode == ModelMode::variational) {
    p.w_head2 = vars[i++];
    p.b_head2 = vars[i++];
  }
  p.w_dec = vars[i++];
  p.b_dec = vars[i++];
  p.dec_k1 = vars[i++];
  p.dec_b1 = vars[i++];
  p.dec_k2 = vars[i++];
  p.dec_b2 = vars[i++];
  p.dec_k3 = vars[i++];
  p.dec_b3 = vars[i++];
  return p;
}

ModelParams ModelParams::init(const Architecture& arch, std::uint64_t seed) {
  std::vector<Tensor> tensors;
  const std::vector<ParamSpec> layout = parameter_layout(arch);
  tensors.reserve(layout.size());
  for (size_t slot = 0; slot < layout.size(); ++slot) {
    const ParamSpec& spec = layout[slot];
    if (spec.fan_in > 0) {
      Rng rng = derive_rng(seed, StreamPurpose::init, static_cast<std::uint64_t>(slot));
      tensors.push_back(he_init(spec.shape, spec.fan_in, rng));
    } else {
      tensors.push_back(Tensor(spec.shape));
    }
  }
  return params_from_tensors(arch, std::move(tensors));
}

std::vector<Var> ModelParams::parameters() const {
  std::vector<Var> out = {enc_k1, enc_b1, enc_k2, enc_b2, w_head1, b_head1};
  if (arch.mode == ModelMode::variational) {
    out.push_back(w_head2);
    out.push_back(b_head2);
  }
  for (const Var& v : {w_dec, b_dec, dec_k1, dec_b1, dec_k2, dec_b2, dec_k3, dec_b3}) {
    out.push_back(v);
  }
  return out;
}

std::int64_t ModelParams::parameter_count() const {
  std::int64_t n = 0;
  for (const Var& v : parameters()) n += v.value().numel();
  return n;
}

namespace {

void check_batch_input(const Architecture& a, const std::vector<int>& s) {
  if (s.size() != 4 || s[1] != 2 || s[2] != a.n_a || s[3] != a.n_t) {
    throw std::invalid_argument("encoder input must be [B, 2, " + std::to_string(a.n_a) + ", " +
                                std::to_string(a.n_t) + "], got " + shape_to_string(s));
  }
}

void check_batch_code(const Architecture& a, const std::vector<int>& s) {
  if (s.size() != 2 || s[1] != a.m) {
    throw std::invalid_argument("decoder input must be [B, " + std::to_string(a.m) + "], got " +
                                shape_to_string(s));
  }
}

}  // namespace

EncoderHeads encode_graph(const ModelParams& p, const Var& x) {
  check_batch_input(p.arch, x.shape());
  Var h = leaky_relu(add_channel_bias(conv2d(x, p.enc_k1), p.enc_b1));
  h = leaky_relu(add_channel_bias(conv2d(h, p.enc_k2), p.enc_b2));
  Var flat = reshape(h, {x.shape()[0], p.arch.flat_dim()});
  EncoderHeads heads;
  heads.mu = add_row_bias(matmul(flat, p.w_head1), p.b_head1);
  if (p.arch.mode == ModelMode::variational) {
    heads.log_sigma = add_row_bias(matmul(flat, p.w_head2), p.b_head2);
  }
  return heads;
}

Var decode_graph(const ModelParams& p, const Var& z) {
  check_batch_code(p.arch, z.shape());
  Var d = add_row_bias(matmul(z, p.w_dec), p.b_dec);
  Var img = reshape(d, {z.shape()[0], 2, p.arch.n_a, p.arch.n_t});
  img = leaky_relu(add_channel_bias(conv2d(img, p.dec_k1), p.dec_b1));
  img = leaky_relu(add_channel_bias(conv2d(img, p.dec_k2), p.dec_b2));
  return sigmoid(add_channel_bias(conv2d(img, p.dec_k3), p.dec_b3));
}

Var kl_graph(const EncoderHeads& heads) {
  if (!heads.log_sigma.defined()) {
    throw std::invalid_argument("kl_graph needs a log-sigma head (variational mode only)");
  }
  // 0.5 * sum(mu^2 + exp(2*log_sigma) - 1 - 2*log_sigma); exactly 0 at (0, 1).
  Var sigma_sq = exp(scale(heads.log_sigma, 2.0f));
  Var terms = add(add(square(heads.mu), sigma_sq), scale(heads.log_sigma, -2.0f));
  return scale(sum(add_scalar(terms, -1.0f)), 0.5f);
}

namespace {

Tensor single_to_batch(const Architecture& a, const Tensor& x) {
  if (x.shape() != std::vector<int>{2, a.n_a, a.n_t}) {
    throw std::invalid_argument("expected a single sample [2, " + std::to_string(a.n_a) + ", " +
                                std::to_string(a.n_t) + "], got " + x.shape_str());
  }
  return Tensor({1, 2, a.n_a, a.n_t},
                std::vector<float>(x.data(), x.data() + x.numel()));
}

std::vector<float> row_of(const Var& v) {
  return std::vector<float>(v.value().data(), v.value().data() + v.value().numel());
}

}  // namespace

CodewordDistribution encode(const ModelParams& p, const Tensor& x) {
  if (p.arch.mode != ModelMode::variational) {
    throw std::logic_error("encode produces a distribution; this model is point-estimate, "
                           "use point_estimate_forward");
  }
  EncoderHeads heads = encode_graph(p, constant(single_to_batch(p.arch, x)));
  return {row_of(heads.mu), row_of(heads.log_sigma)};
}

Codeword reparameterize(const CodewordDistribution& dist, const std::vector<float>& eps,
                        double gamma) {
  if (dist.mu.size() != dist.log_sigma.size() || dist.mu.size() != eps.size()) {
    throw std::invalid_argument("reparameterize size mismatch: mu " +
                                std::to_string(dist.mu.size()) + ", log_sigma " +
                                std::to_string(dist.log_sigma.size()) + ", eps " +
                                std::to_string(eps.size()));
  }
  Codeword c;
  c.gamma = gamma;
  c.z.resize(eps.size());
  for (size_t i = 0; i < eps.size(); ++i) {
    // f32 like the graph path; the same saturation as the exp op.
    const float sigma = std::exp(std::min(dist.log_sigma[i], 80.0f));
    c.z[i] = dist.mu[i] + eps[i] * sigma;
  }
  return c;
}

double kl_term(const CodewordDistribution& dist) {
  if (dist.mu.size() != dist.log_sigma.size()) {
    throw std::invalid_argument("kl_term size mismatch: mu " + std::to_string(dist.mu.size()) +
                                ", log_sigma " + std::to_string(dist.log_sigma.size()));
  }
  double total = 0.0;
  for (size_t i = 0; i < dist.mu.size(); ++i) {
    const double mu = dist.mu[i];
    const double ls = dist.log_sigma[i];
    const double term = 0.5 * (mu * mu + std::exp(2.0 * ls) - 1.0 - 2.0 * ls);
    total += std::max(term, 0.0);
  }
  return total;
}

Tensor decode(const ModelParams& p, const std::vector<float>& z) {
  if (static_cast<int>(z.size()) != p.arch.m) {
    throw std::invalid_argument("codeword size " + std::to_string(z.size()) +
                                " does not match the model's " + std::to_string(p.arch.m));
  }
  Var out = decode_graph(p, constant(Tensor({1, p.arch.m}, z)));
  return Tensor({2, p.arch.n_a, p.arch.n_t},
                std::vector<float>(out.value().data(), out.value().data() + out.value().numel()));
}

LossBreakdown prvnet_loss(const Tensor& x, const Tensor& x_hat, const CodewordDistribution& dist,
                          double beta) {
  if (!x.same_shape(x_hat)) {
    throw std::invalid_argument("loss shape mismatch: x " + x.shape_str() + ", x_hat " +
                                x_hat.shape_str());
  }
  LossBreakdown out;
  for (std::int64_t i = 0; i < x.numel(); ++i) {
    const double d = static_cast<double>(x.at(i)) - static_cast<double>(x_hat.at(i));
    out.recon += d * d;
  }
  out.kl = kl_term(dist);
  out.total = out.recon + beta * out.kl;
  return out;
}

Tensor input_dropout(const Tensor& x, float rate, Rng& rng) {
  if (rate < 0.0f || rate >= 1.0f) {
    throw std::invalid_argument("dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
  if (rate == 0.0f) return x;
  // Inverted dropout: surviving inputs are scaled by 1/(1-rate) so the
  // expected activation matches the no-dropout forward pass.
  Tensor out = x;
  const float keep_scale = 1.0f / (1.0f - rate);
  for (std::int64_t i = 0; i < out.numel(); ++i) {
    out.at(i) = rng.next_float() < rate ? 0.0f : out.at(i) * keep_scale;
  }
  return out;
}

std::pair<Codeword, Tensor> point_estimate_forward(const ModelParams& p, const Tensor& x,
                                                   float dropout_rate, Rng* dropout_rng) {
  if (p.arch.mode != ModelMode::point_estimate) {
    throw std::logic_error("point_estimate_forward requires a point-estimate model; "
                           "this one is variational");
  }
  Tensor in = single_to_batch(p.arch, x);
  if (dropout_rate != 0.0f) {
    if (dropout_rng == nullptr) {
      throw std::invalid_argument("dropout rate > 0 needs a dropout stream");
    }
    in = input_dropout(in, dropout_rate, *dropout_rng);
  }
  EncoderHeads heads = encode_graph(p, constant(std::move(in)));
  Codeword c{row_of(heads.mu), p.arch.gamma()};
  Var out = decode_graph(p, heads.mu);
  Tensor x_hat({2, p.arch.n_a, p.arch.n_t},
               std::vector<float>(out.value().data(), out.value().data() + out.value().numel()));
  return {std::move(c), std::move(x_hat)};
}

}  // namespace prvnet
