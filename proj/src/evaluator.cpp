#include "prvnet/evaluator.hpp"

#include "prvnet/graph.hpp"
#include "prvnet/ops.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace prvnet {

AwgnResult add_awgn(const Tensor& z, double snr_db, Rng& rng) {
  AwgnResult out;
  out.z = z;
  double power = 0.0;
  for (std::int64_t i = 0; i < z.numel(); ++i) {
    power += static_cast<double>(z.at(i)) * z.at(i);
  }
  if (z.numel() > 0) power /= static_cast<double>(z.numel());
  out.signal_power = power;
  if (power == 0.0) return out;
  out.noise_power = power / std::pow(10.0, snr_db / 10.0);
  const double sigma = std::sqrt(out.noise_power);
  for (std::int64_t i = 0; i < z.numel(); ++i) {
    out.z.at(i) = static_cast<float>(z.at(i) + sigma * rng.gaussian());
  }
  return out;
}

namespace {

struct NmseAccum {
  double sum_ratio = 0.0;
  int kept = 0;
  int excluded = 0;

  void add(const float* h, const float* h_hat, std::int64_t len) {
    double num = 0.0, den = 0.0;
    for (std::int64_t i = 0; i < len; ++i) {
      const double d = static_cast<double>(h[i]) - h_hat[i];
      num += d * d;
      den += static_cast<double>(h[i]) * h[i];
    }
    if (den == 0.0) {
      ++excluded;
    } else {
      sum_ratio += num / den;
      ++kept;
    }
  }

  double value_db() const {
    if (kept == 0) return kNmseFloorDb;
    const double mean = sum_ratio / kept;
    if (mean <= 0.0) return kNmseFloorDb;
    return std::max(10.0 * std::log10(mean), kNmseFloorDb);
  }
};

}  // namespace

double nmse_db(const std::vector<Tensor>& h, const std::vector<Tensor>& h_hat, int* excluded) {
  if (h.size() != h_hat.size()) {
    throw std::invalid_argument("nmse_db needs matching sample lists, got " +
                                std::to_string(h.size()) + " and " +
                                std::to_string(h_hat.size()));
  }
  NmseAccum acc;
  for (size_t i = 0; i < h.size(); ++i) {
    if (!h[i].same_shape(h_hat[i])) {
      throw std::invalid_argument("nmse_db sample " + std::to_string(i) + " shapes differ: " +
                                  h[i].shape_str() + " vs " + h_hat[i].shape_str());
    }
    acc.add(h[i].data(), h_hat[i].data(), h[i].numel());
  }
  if (excluded != nullptr) *excluded = acc.excluded;
  return acc.value_db();
}

EvalResult evaluate(const ModelParams& model, const ChannelDataset& data,
                    const EvalOptions& opt) {
  if (opt.split < kSplitTrain || opt.split > kSplitTest) {
    throw std::invalid_argument("unknown split index " + std::to_string(opt.split));
  }
  if (model.arch.n_a != data.n_a || model.arch.n_t != data.n_t) {
    throw std::invalid_argument("model grid [" + std::to_string(model.arch.n_a) + "x" +
                                std::to_string(model.arch.n_t) + "] does not match dataset [" +
                                std::to_string(data.n_a) + "x" + std::to_string(data.n_t) + "]");
  }
  const int begin = data.split_begin(opt.split);
  const int b = data.split_size(opt.split);
  if (b <= 0) throw std::invalid_argument("empty evaluation split");
  const std::int64_t per = data.input_dim();

  Tensor batch({b, 2, data.n_a, data.n_t});
  for (int s = 0; s < b; ++s) {
    const Tensor& src = data.samples[static_cast<size_t>(begin + s)];
    for (std::int64_t i = 0; i < per; ++i) batch.at(s * per + i) = src.at(i);
  }

  EncoderHeads heads = encode_graph(model, constant(std::move(batch)));
  Tensor z = heads.mu.value();
  if (opt.sample_codeword) {
    if (model.arch.mode != ModelMode::variational) {
      throw std::invalid_argument("sample_codeword needs a variational model");
    }
    Rng eps_rng = derive_rng(opt.seed, StreamPurpose::epsilon, 0);
    const Tensor& ls = heads.log_sigma.value();
    for (std::int64_t i = 0; i < z.numel(); ++i) {
      const float sigma = std::exp(std::min(ls.at(i), 80.0f));
      z.at(i) += static_cast<float>(eps_rng.gaussian()) * sigma;
    }
  }

  EvalResult result;
  result.n_samples = b;
  if (opt.snr_db.has_value()) {
    Rng noise_rng = derive_rng(opt.seed, StreamPurpose::channel_noise, 0);
    AwgnResult noisy = add_awgn(z, *opt.snr_db, noise_rng);
    result.signal_power = noisy.signal_power;
    result.noise_power = noisy.noise_power;
    z = std::move(noisy.z);
  } else {
    double power = 0.0;
    for (std::int64_t i = 0; i < z.numel(); ++i) {
      power += static_cast<double>(z.at(i)) * z.at(i);
    }
    result.signal_power = z.numel() > 0 ? power / static_cast<double>(z.numel()) : 0.0;
  }

  Var decoded = decode_graph(model, constant(std::move(z)));
  const Tensor x_hat = denormalize_values(decoded.value(), data.norm);
  NmseAccum acc;
  for (int s = 0; s < b; ++s) {
    const Tensor h = denormalize_values(data.samples[static_cast<size_t>(begin + s)], data.norm);
    acc.add(h.data(), x_hat.data() + s * per, per);
  }
  result.excluded = acc.excluded;
  result.nmse_db = acc.value_db();
  return result;
}

std::string model_id(const Architecture& arch) {
  char gamma_str[32];
  std::snprintf(gamma_str, sizeof gamma_str, "%.6g", arch.gamma());
  const char* prefix = arch.mode == ModelMode::variational ? "prvnet" : "ae";
  return std::string(prefix) + "-g" + gamma_str + "-M" + std::to_string(arch.m);
}

ReportRow evaluate_row(const ModelParams& model, const ChannelDataset& data,
                       const EvalOptions& opt) {
  EvalResult r = evaluate(model, data, opt);
  ReportRow row;
  row.gamma = model.arch.gamma();
  row.scenario = to_string(data.scenario);
  if (opt.snr_db.has_value()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", *opt.snr_db);
    row.snr = buf;
  } else {
    row.snr = "clean";
  }
  row.nmse_db = r.nmse_db;
  row.n_samples = r.n_samples;
  row.model_id = model_id(model.arch);
  row.seed = opt.seed;
  return row;
}

std::vector<ReportRow> snr_sweep(const ModelParams& model, const ChannelDataset& data, int split,
                                 std::uint64_t seed) {
  std::vector<ReportRow> rows;
  EvalOptions opt;
  opt.split = split;
  opt.seed = seed;
  rows.push_back(evaluate_row(model, data, opt));
  for (double snr : kSnrGridDb) {
    opt.snr_db = snr;
    rows.push_back(evaluate_row(model, data, opt));
  }
  return rows;
}

std::string report_csv_string(const std::vector<ReportRow>& rows) {
  std::string out = "gamma,scenario,snr_db,nmse_db,n_samples,model_id,seed\n";
  char buf[256];
  for (const ReportRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%s,%s,%.6f,%d,%s,%llu\n", r.gamma, r.scenario.c_str(),
                  r.snr.c_str(), r.nmse_db, r.n_samples, r.model_id.c_str(),
                  static_cast<unsigned long long>(r.seed));
    out += buf;
  }
  return out;
}

void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open report file for writing: " + path);
  const std::string body = report_csv_string(rows);
  os.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!os) throw std::runtime_error("failed while writing report: " + path);
}

}  // namespace prvnet
