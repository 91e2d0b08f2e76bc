#pragma once

#include "prvnet/channel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace prvnet {

// Dataset of normalized angular-delay CSI samples, ordered train | val | test
// with a 10:3:2 split. The normalization record is computed from the raw
// train split only and applied to all three splits (no clamping).
struct ChannelDataset {
  int n_a = 0;
  int n_t = 0;
  int n_train = 0;
  int n_val = 0;
  int n_test = 0;
  NormRecord norm;
  std::vector<Tensor> samples;  // each [2, n_a, n_t], normalized

  Scenario scenario = Scenario::indoor;
  MultipathParams params;
  std::uint64_t seed = 0;

  int count() const { return static_cast<int>(samples.size()); }
  int input_dim() const { return 2 * n_a * n_t; }
  int split_begin(int split) const;  // 0 train, 1 val, 2 test
  int split_size(int split) const;
};

// Sample i uses the path stream derived from (seed, dataset, i), so any
// sample is reproducible in isolation. count must be at least 15; the split
// is floor(count*10/15) / floor(count*3/15) / remainder.
ChannelDataset build_dataset(Scenario scenario, const MultipathParams& params, int count, int n_a,
                             std::uint64_t seed);

// Binary container, little-endian:
//   magic "PRVC" | u32 version=1 | u32 count | u32 n_a | u32 n_t
//   | u32 n_train | u32 n_val | u32 n_test | f32 norm_min | f32 norm_max
//   | count * (2*n_a*n_t) f32 normalized samples
// plus a JSON sidecar at <path>.json holding scenario, seed, and the
// generation parameters. Both files together form the dataset.
void save_dataset(const ChannelDataset& ds, const std::string& path);
ChannelDataset load_dataset(const std::string& path);

// FNV-1a (64-bit) over a file's bytes; manifests record this for the dataset.
std::uint64_t fnv1a_file(const std::string& path);
std::string hex_u64(std::uint64_t v);

}  // namespace prvnet
