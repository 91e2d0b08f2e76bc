#include "prvnet/sweeps.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace prvnet {

CrSweepResult cr_sweep(const ChannelDataset& data, const TrainConfig& cfg,
                       const std::vector<double>& gammas, ModelMode mode) {
  if (gammas.empty()) throw std::invalid_argument("cr_sweep: empty gamma grid");
  EvalOptions clean;
  clean.split = kSplitTest;
  clean.seed = cfg.seed;
  CrSweepResult out;
  for (double gamma : gammas) {
    SweepArm arm;
    arm.gamma = gamma;
    arm.arch = Architecture::for_gamma(gamma, data.n_a, data.n_t, mode);
    arm.run = train_model(arm.arch, data, cfg);
    out.rows.push_back(evaluate_row(arm.run.model, data, clean));
    out.arms.push_back(std::move(arm));
  }
  return out;
}

BaselineCompareResult baseline_compare(const ChannelDataset& data, double gamma,
                                       const TrainConfig& cfg) {
  BaselineCompareResult out;

  const Architecture var_arch =
      Architecture::for_gamma(gamma, data.n_a, data.n_t, ModelMode::variational);
  TrainConfig var_cfg = cfg;
  var_cfg.dropout = 0.0f;
  out.prvnet = anneal_and_retrain(var_arch, data, var_cfg);

  const Architecture ae_arch =
      Architecture::for_gamma(gamma, data.n_a, data.n_t, ModelMode::point_estimate);
  out.point_ae = train_model(ae_arch, data, cfg);

  out.rows = snr_sweep(out.prvnet.final_run.model, data, kSplitTest, cfg.seed);
  std::vector<ReportRow> ae_rows = snr_sweep(out.point_ae.model, data, kSplitTest, cfg.seed);
  out.rows.insert(out.rows.end(), ae_rows.begin(), ae_rows.end());
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open file for writing: " + path);
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw std::runtime_error("failed while writing: " + path);
}

}  // namespace prvnet
