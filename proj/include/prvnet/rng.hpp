#pragma once

#include <cstdint>

namespace prvnet {

// Deterministic generator used for every random draw in the toolkit.
//
// Core generator: xoshiro256** (Blackman/Vigna), state seeded by four
// successive splitmix64 outputs. Both are integer-only, so the raw streams
// are identical on every platform.
//
// Stream derivation: all randomness flows from one master seed. Each
// consumer derives an independent stream as
//
//   seed(master, purpose, index) = splitmix64(splitmix64(master ^ purpose * GOLDEN) + index)
//
// with GOLDEN = 0x9E3779B97F4A7C15. `purpose` is a StreamPurpose tag and
// `index` a per-purpose counter (sample index, epoch, step, ...), so
// reordering one consumer never perturbs another.
//
// Gaussians use the Marsaglia polar method evaluated in double precision;
// consumers that store f32 cast at the boundary. The polar method consumes a
// variable number of uniforms per pair, which is fine because every stream
// is private to one consumer.

enum class StreamPurpose : std::uint64_t {
  dataset = 1,       // path draws for sample `index`
  init = 2,          // weight init, `index` = parameter slot
  epsilon = 3,       // reparameterization noise, `index` = global step
  channel_noise = 4, // AWGN on codewords, `index` = global step or eval batch
  dropout = 5,       // input dropout masks, `index` = global step
  shuffle = 6,       // epoch shuffles, `index` = epoch
  eval = 7,          // evaluation-time sampling, `index` = batch
};

std::uint64_t splitmix64(std::uint64_t& state);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform in [0, 1), 53 random bits.
  double next_double();
  // Uniform in [0, 1), 24 random bits.
  float next_float();
  // Standard normal, Marsaglia polar, second draw of each pair cached.
  double gaussian();
  // Uniform integer in [0, n), n > 0, rejection-free bias below 2^-64 * n.
  std::uint64_t next_below(std::uint64_t n);

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t derive_seed(std::uint64_t master, StreamPurpose purpose, std::uint64_t index);
Rng derive_rng(std::uint64_t master, StreamPurpose purpose, std::uint64_t index);

}  // namespace prvnet
