#pragma once

#include "prvnet/tensor.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace prvnet {

// Synthetic multipath channel pipeline. A channel is synthesized on the
// spatial-frequency grid (n_subcarriers x n_t antennas, complex double),
// moved to the angular-delay domain by a unitary 2D DFT, truncated to the
// first n_a delay rows, and stored as a real [2, n_a, n_t] f32 tensor
// (real/imaginary planes), optionally min-max normalized into [0,1].

enum class Scenario { indoor, outdoor };
std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

struct PathSpec {
  std::complex<double> gain;
  double delay = 0.0;    // in delay-grid samples, [0, n_subcarriers)
  double sin_aod = 0.0;  // sine of the departure angle, [-1, 1]
};

struct MultipathParams {
  int n_subcarriers = 256;
  int n_t = 32;
  int num_paths = 6;
  double gain_scale = 1.0;    // total mean path power is gain_scale^2
  int delay_min = 0;          // integer delay bounds, inclusive
  int delay_max = 11;
  double delay_jitter = 0.0;  // fractional delay added uniformly from [0, jitter]
  double sin_aod_max = 0.95;
};

// Scenario presets. Integer delays (jitter 0) keep every path inside the
// retained delay rows exactly, so truncation is lossless; delay_max stays
// well under the 32 retained rows for both presets.
MultipathParams scenario_params(Scenario s, int n_subcarriers = 256, int n_t = 32);

struct SpatialFrequencyChannel {
  Eigen::MatrixXcd h;  // n_subcarriers x n_t
};

// Path draws consume the stream in a fixed order per path (gain re, gain im,
// integer delay, fractional jitter, sin aod), independent of parameter
// values, so datasets reproduce exactly.
std::vector<PathSpec> draw_paths(const MultipathParams& params, std::uint64_t seed);

// H[n,t] = sum_l g_l * exp(-j 2 pi n tau_l / Nc) * exp(-j pi t sin_aod_l)
SpatialFrequencyChannel synth_channel(const std::vector<PathSpec>& paths, int n_subcarriers,
                                      int n_t);

SpatialFrequencyChannel generate_channel(const MultipathParams& params, std::uint64_t seed);

struct NormRecord {
  float min_v = 0.0f;
  float max_v = 1.0f;
};

struct AngularDelayCsi {
  Tensor values;                  // [2, n_a, n_t]
  std::optional<NormRecord> norm; // present iff values are normalized
};

// Unitary 2D DFT (delay kernel exp(+j 2 pi k n / Nc)/sqrt(Nc), angular kernel
// exp(+j 2 pi m t / Nt)/sqrt(Nt) applied as H * Fa^H), truncated to the first
// n_a delay rows. A path with integer delay tau lands exactly in row tau.
AngularDelayCsi to_angular_delay(const SpatialFrequencyChannel& ch, int n_a);

// Inverse: denormalizes if needed, zero-pads the delay rows back to
// n_subcarriers, applies the inverse unitary transforms.
SpatialFrequencyChannel from_angular_delay(const AngularDelayCsi& csi, int n_subcarriers);

// Affine map onto [0,1] by the dataset-level record (min < max required).
// Values outside the record's range map outside [0,1]; nothing clamps.
AngularDelayCsi normalize(const AngularDelayCsi& raw, NormRecord record);
Tensor denormalize(const AngularDelayCsi& csi);
Tensor denormalize_values(const Tensor& values, NormRecord record);

// Fraction of angular-delay energy kept by truncating to the first n_a rows.
double truncation_energy_ratio(const SpatialFrequencyChannel& ch, int n_a);

}  // namespace prvnet
