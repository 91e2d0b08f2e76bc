#include "prvnet/channel.hpp"

#include "prvnet/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace prvnet {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Unitary DFT matrix with the +j kernel, cached per size (single-threaded).
const Eigen::MatrixXcd& dft_matrix(int n) {
  static std::unordered_map<int, Eigen::MatrixXcd> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXcd f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      const double ph = 2.0 * kPi * static_cast<double>(k) * static_cast<double>(j) /
                        static_cast<double>(n);
      f(k, j) = std::complex<double>(std::cos(ph) * scale, std::sin(ph) * scale);
    }
  return cache.emplace(n, std::move(f)).first->second;
}
}  // namespace

std::string to_string(Scenario s) { return s == Scenario::indoor ? "indoor" : "outdoor"; }

Scenario scenario_from_string(const std::string& s) {
  if (s == "indoor") return Scenario::indoor;
  if (s == "outdoor") return Scenario::outdoor;
  throw std::invalid_argument("unknown scenario '" + s + "' (want indoor or outdoor)");
}

MultipathParams scenario_params(Scenario s, int n_subcarriers, int n_t) {
  MultipathParams p;
  p.n_subcarriers = n_subcarriers;
  p.n_t = n_t;
  if (s == Scenario::indoor) {
    p.num_paths = 6;
    p.delay_min = 0;
    p.delay_max = 11;
    p.sin_aod_max = 0.95;
  } else {
    p.num_paths = 14;
    p.delay_min = 0;
    p.delay_max = 27;
    p.sin_aod_max = 0.95;
  }
  return p;
}

std::vector<PathSpec> draw_paths(const MultipathParams& params, std::uint64_t seed) {
  if (params.num_paths <= 0) throw std::invalid_argument("num_paths must be positive");
  if (params.delay_min < 0 || params.delay_max < params.delay_min ||
      params.delay_max + params.delay_jitter >= params.n_subcarriers)
    throw std::invalid_argument("delay range [" + std::to_string(params.delay_min) + ", " +
                                std::to_string(params.delay_max) +
                                "] invalid for n_subcarriers=" +
                                std::to_string(params.n_subcarriers));
  Rng rng(seed);
  std::vector<PathSpec> paths(static_cast<size_t>(params.num_paths));
  // Per-path mean power gain_scale^2 / L keeps total power independent of L.
  const double g_std = params.gain_scale / std::sqrt(2.0 * params.num_paths);
  const std::uint64_t delay_span =
      static_cast<std::uint64_t>(params.delay_max - params.delay_min) + 1;
  for (auto& p : paths) {
    const double re = rng.gaussian() * g_std;
    const double im = rng.gaussian() * g_std;
    p.gain = {re, im};
    const double d_int = static_cast<double>(params.delay_min) +
                         static_cast<double>(rng.next_below(delay_span));
    p.delay = d_int + params.delay_jitter * rng.next_double();
    p.sin_aod = params.sin_aod_max * (2.0 * rng.next_double() - 1.0);
  }
  return paths;
}

SpatialFrequencyChannel synth_channel(const std::vector<PathSpec>& paths, int n_subcarriers,
                                      int n_t) {
  if (n_subcarriers <= 0 || n_t <= 0)
    throw std::invalid_argument("synth_channel: grid " + std::to_string(n_subcarriers) + "x" +
                                std::to_string(n_t) + " invalid");
  SpatialFrequencyChannel ch;
  ch.h = Eigen::MatrixXcd::Zero(n_subcarriers, n_t);
  Eigen::VectorXcd delay_vec(n_subcarriers);
  Eigen::RowVectorXcd ant_vec(n_t);
  for (const auto& p : paths) {
    for (int n = 0; n < n_subcarriers; ++n) {
      const double ph = -2.0 * kPi * static_cast<double>(n) * p.delay /
                        static_cast<double>(n_subcarriers);
      delay_vec(n) = std::complex<double>(std::cos(ph), std::sin(ph));
    }
    for (int t = 0; t < n_t; ++t) {
      const double ph = -kPi * static_cast<double>(t) * p.sin_aod;
      ant_vec(t) = std::complex<double>(std::cos(ph), std::sin(ph));
    }
    ch.h.noalias() += p.gain * (delay_vec * ant_vec);
  }
  return ch;
}

SpatialFrequencyChannel generate_channel(const MultipathParams& params, std::uint64_t seed) {
  return synth_channel(draw_paths(params, seed), params.n_subcarriers, params.n_t);
}

AngularDelayCsi to_angular_delay(const SpatialFrequencyChannel& ch, int n_a) {
  const int nc = static_cast<int>(ch.h.rows());
  const int nt = static_cast<int>(ch.h.cols());
  if (n_a <= 0 || n_a > nc)
    throw std::invalid_argument("to_angular_delay: n_a=" + std::to_string(n_a) +
                                " outside [1, " + std::to_string(nc) + "]");
  const Eigen::MatrixXcd& fd = dft_matrix(nc);
  const Eigen::MatrixXcd& fa = dft_matrix(nt);
  Eigen::MatrixXcd ha = fd.topRows(n_a) * ch.h * fa.adjoint();

  AngularDelayCsi out;
  out.values = Tensor({2, n_a, nt});
  float* re = out.values.data();
  float* im = re + static_cast<std::int64_t>(n_a) * nt;
  for (int k = 0; k < n_a; ++k)
    for (int t = 0; t < nt; ++t) {
      re[k * nt + t] = static_cast<float>(ha(k, t).real());
      im[k * nt + t] = static_cast<float>(ha(k, t).imag());
    }
  return out;
}

SpatialFrequencyChannel from_angular_delay(const AngularDelayCsi& csi, int n_subcarriers) {
  const auto& shape = csi.values.shape();
  if (shape.size() != 3 || shape[0] != 2)
    throw std::invalid_argument("from_angular_delay: want [2, n_a, n_t] values, got " +
                                csi.values.shape_str());
  const int n_a = shape[1], nt = shape[2];
  if (n_subcarriers < n_a)
    throw std::invalid_argument("from_angular_delay: n_subcarriers=" +
                                std::to_string(n_subcarriers) + " smaller than n_a=" +
                                std::to_string(n_a));
  Tensor raw = csi.norm ? denormalize(csi) : csi.values;
  const float* re = raw.data();
  const float* im = re + static_cast<std::int64_t>(n_a) * nt;
  Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(n_subcarriers, nt);
  for (int k = 0; k < n_a; ++k)
    for (int t = 0; t < nt; ++t)
      padded(k, t) = std::complex<double>(re[k * nt + t], im[k * nt + t]);

  const Eigen::MatrixXcd& fd = dft_matrix(n_subcarriers);
  const Eigen::MatrixXcd& fa = dft_matrix(nt);
  SpatialFrequencyChannel ch;
  ch.h = fd.adjoint() * padded * fa;
  return ch;
}

AngularDelayCsi normalize(const AngularDelayCsi& raw, NormRecord record) {
  if (!(record.min_v < record.max_v))
    throw std::invalid_argument("normalize: record min " + std::to_string(record.min_v) +
                                " must be below max " + std::to_string(record.max_v));
  AngularDelayCsi out;
  out.values = Tensor(raw.values.shape());
  const float span = record.max_v - record.min_v;
  out.values.arr() = (raw.values.arr() - record.min_v) / span;
  out.norm = record;
  return out;
}

Tensor denormalize(const AngularDelayCsi& csi) {
  if (!csi.norm) return csi.values;
  return denormalize_values(csi.values, *csi.norm);
}

Tensor denormalize_values(const Tensor& values, NormRecord record) {
  Tensor out(values.shape());
  out.arr() = values.arr() * (record.max_v - record.min_v) + record.min_v;
  return out;
}

double truncation_energy_ratio(const SpatialFrequencyChannel& ch, int n_a) {
  const int nc = static_cast<int>(ch.h.rows());
  const int nt = static_cast<int>(ch.h.cols());
  if (n_a <= 0 || n_a > nc)
    throw std::invalid_argument("truncation_energy_ratio: n_a=" + std::to_string(n_a) +
                                " outside [1, " + std::to_string(nc) + "]");
  const Eigen::MatrixXcd& fd = dft_matrix(nc);
  const Eigen::MatrixXcd& fa = dft_matrix(nt);
  const Eigen::MatrixXcd ha = fd * ch.h * fa.adjoint();
  const double total = ha.squaredNorm();
  if (total == 0.0) return 1.0;
  return ha.topRows(n_a).squaredNorm() / total;
}

}  // namespace prvnet
