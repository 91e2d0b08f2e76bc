#pragma once

#include "prvnet/channel.hpp"
#include "prvnet/graph.hpp"
#include "prvnet/rng.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace prvnet {

// Variational CSI autoencoder. Encoder: two 3x3 same-padding convolutions
// (widths enc_ch1, enc_ch2) with leaky-relu(0.3), flatten, and dense heads to
// the M-dimensional codeword: mean plus log-sigma in variational mode, a
// single point head otherwise. Decoder: dense M -> 2*n_a*n_t, reshape, two
// refinement convolutions with leaky-relu, and a 3x3 output convolution with
// sigmoid so reconstructions live in (0,1) like the normalized inputs.

enum class ModelMode { variational, point_estimate };
std::string to_string(ModelMode m);
ModelMode mode_from_string(const std::string& s);

struct Architecture {
  int n_a = 32;
  int n_t = 32;
  int enc_ch1 = 8;
  int enc_ch2 = 16;
  int dec_ch1 = 8;
  int dec_ch2 = 16;
  int kernel = 3;
  int m = 512;
  ModelMode mode = ModelMode::variational;

  int input_dim() const { return 2 * n_a * n_t; }
  int flat_dim() const { return enc_ch2 * n_a * n_t; }
  double gamma() const { return static_cast<double>(m) / input_dim(); }

  // m = round(gamma * 2*n_a*n_t); gamma must give 1 <= m < input_dim.
  static Architecture for_gamma(double gamma, int n_a, int n_t,
                                ModelMode mode = ModelMode::variational);
};

bool operator==(const Architecture& a, const Architecture& b);

// Parameter leaves in a fixed canonical order (the checkpoint layout):
//   enc_k1, enc_b1, enc_k2, enc_b2, w_head1, b_head1,
//   [w_head2, b_head2 in variational mode only],
//   w_dec, b_dec, dec_k1, dec_b1, dec_k2, dec_b2, dec_k3, dec_b3
// Weight tensors draw He-normal values from the init stream indexed by their
// canonical slot; biases start at zero.
struct ModelParams {
  Architecture arch;
  Var enc_k1, enc_b1, enc_k2, enc_b2;
  Var w_head1, b_head1;  // mu head (variational) or codeword head (point)
  Var w_head2, b_head2;  // log-sigma head; undefined in point mode
  Var w_dec, b_dec;
  Var dec_k1, dec_b1, dec_k2, dec_b2, dec_k3, dec_b3;

  std::vector<Var> parameters() const;
  std::int64_t parameter_count() const;

  static ModelParams init(const Architecture& arch, std::uint64_t seed);
};

// Canonical parameter layout; fan_in is 0 for biases (zero-initialized).
struct ParamSpec {
  std::string name;
  std::vector<int> shape;
  int fan_in = 0;
};
std::vector<ParamSpec> parameter_layout(const Architecture& arch);
// Builds a model from tensors in canonical order (checkpoint loading).
ModelParams params_from_tensors(const Architecture& arch, std::vector<Tensor> tensors);

struct CodewordDistribution {
  std::vector<float> mu;
  std::vector<float> log_sigma;
};

struct Codeword {
  std::vector<float> z;
  double gamma = 0.0;
};

struct LossBreakdown {
  double total = 0.0;
  double recon = 0.0;
  double kl = 0.0;
};

// Graph builders used by training; x is [B, 2, n_a, n_t], z is [B, M].
struct EncoderHeads {
  Var mu;
  Var log_sigma;  // undefined in point mode
};
EncoderHeads encode_graph(const ModelParams& p, const Var& x);
Var decode_graph(const ModelParams& p, const Var& z);
// Closed-form KL to the standard normal prior, summed over batch and
// dimensions: sum 0.5*(mu^2 + sigma^2 - 1 - 2*log_sigma).
Var kl_graph(const EncoderHeads& heads);

// Plain single-sample surface (forward only, f32 graph underneath).
CodewordDistribution encode(const ModelParams& p, const Tensor& x);  // x [2, n_a, n_t]
Codeword reparameterize(const CodewordDistribution& dist, const std::vector<float>& eps,
                        double gamma);
// Closed form in double, each per-dimension term floored at 0 (the form is
// analytically non-negative; the floor removes rounding's -1e-7 artifacts).
double kl_term(const CodewordDistribution& dist);
Tensor decode(const ModelParams& p, const std::vector<float>& z);  // -> [2, n_a, n_t]
// total = recon + beta * kl, recon = sum of squared reconstruction error.
LossBreakdown prvnet_loss(const Tensor& x, const Tensor& x_hat, const CodewordDistribution& dist,
                          double beta);
// Point-estimate pass: optional inverted dropout on the input (training
// only; pass a dropout stream) then encode and decode.
std::pair<Codeword, Tensor> point_estimate_forward(const ModelParams& p, const Tensor& x,
                                                   float dropout_rate = 0.0f,
                                                   Rng* dropout_rng = nullptr);

// Inverted input dropout: one uniform draw per element in flat order; an
// element is zeroed when the draw falls below `rate`, survivors are scaled by
// 1/(1-rate). rate 0 returns the input unchanged without consuming draws.
Tensor input_dropout(const Tensor& x, float rate, Rng& rng);

}  // namespace prvnet
