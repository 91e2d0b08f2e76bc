#pragma once

#include "prvnet/evaluator.hpp"
#include "prvnet/trainer.hpp"

#include <string>
#include <vector>

namespace prvnet {

// Default compression-ratio grid: 1/4, 1/16, 1/32, 1/64.
inline const std::vector<double> kDefaultGammas = {0.25, 0.0625, 0.03125, 0.015625};

// One trained arm of a sweep.
struct SweepArm {
  double gamma = 0.0;
  Architecture arch;
  TrainResult run;
};

struct CrSweepResult {
  std::vector<SweepArm> arms;    // one per gamma, input order
  std::vector<ReportRow> rows;   // clean test-split row per arm, input order
};

// Trains one model per gamma under the identical budget/seed in cfg and
// scores each on the clean test split. Each arm is an independent
// single-phase training run (the beta ramp ends at cfg.beta_end).
CrSweepResult cr_sweep(const ChannelDataset& data, const TrainConfig& cfg,
                       const std::vector<double>& gammas = kDefaultGammas,
                       ModelMode mode = ModelMode::variational);

struct BaselineCompareResult {
  AnnealOutcome prvnet;       // two-phase annealed variational model
  TrainResult point_ae;       // point-estimate baseline, same budget
  std::vector<ReportRow> rows;  // clean + SNR grid, variational rows first
};

// Trains the annealed variational model and the point-estimate baseline with
// the same budget and seed, then evaluates both clean and across the SNR
// grid on the test split. cfg.dropout applies to the point-estimate arm only
// (input dropout is that model's regularizer); the variational arm gets its
// regularization from the latent term.
BaselineCompareResult baseline_compare(const ChannelDataset& data, double gamma,
                                       const TrainConfig& cfg);

// Standalone SVG line plots.
//  - Compression plot: clean rows only, x = 1/gamma on a log2 scale, one
//    polyline per model family (the model_id prefix before "-g").
//  - SNR plot: numeric-snr rows, x = SNR in dB, one polyline per model_id;
//    each model's clean row, when present, becomes a dashed reference line.
std::string nmse_vs_compression_svg(const std::vector<ReportRow>& rows);
std::string nmse_vs_snr_svg(const std::vector<ReportRow>& rows);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace prvnet
