#pragma once

#include "prvnet/channel.hpp"
#include "prvnet/model.hpp"
#include "prvnet/trainer.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prvnet {

// Merged experiment configuration. Every field has a default; values merge as
// command-line flags over config-file entries over these defaults. The
// resolved configuration serializes to the flat sectioned key=value text
// below and is written into each run directory.
struct ExperimentConfig {
  // [dataset]
  std::string scenario = "indoor";
  int count = 3000;
  int n_a = 32;
  int n_subcarriers = 256;
  int n_t = 32;
  int num_paths = 0;  // 0: take the scenario preset's path count

  // [model]
  double gamma = 0.25;
  std::string mode = "variational";

  // [train]
  int batch_size = 128;
  int epochs = 200;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  std::uint64_t seed = 1;
  double beta_end = 1.0;
  double anneal_frac = 0.5;
  double dropout = 0.0;
  std::optional<double> train_snr_db;  // "none" in text form
  std::optional<double> beta_fixed;    // single-phase run at this constant beta

  // [eval]
  std::string split = "test";
  std::string snr = "clean";  // "clean", "sweep" (clean + SNR grid), or a dB value
  bool sample_codeword = false;

  // [sweep]
  std::vector<double> gammas = {0.25, 0.0625, 0.03125, 0.015625};
  bool baseline_compare = false;
  int parallel = 1;

  // Typed views onto the raw fields; these validate and throw
  // std::invalid_argument with the offending key.
  Scenario scenario_enum() const;
  ModelMode mode_enum() const;
  int split_index() const;                 // train 0 / val 1 / test 2
  std::optional<double> snr_value() const; // nullopt for "clean"; throws on "sweep"
  MultipathParams multipath() const;       // preset merged with overrides
  TrainConfig train_config() const;        // beta_fixed folded into the ramp
};

// Accepts "0.25" and ratio form "1/4".
double parse_ratio(const std::string& text);
// Comma-separated ratios: "1/4,1/16".
std::vector<double> parse_ratio_list(const std::string& text);

// Flat sectioned key=value text: '#' comments, blank lines, [section]
// headers; keys address fields as "section.key". Unknown keys and malformed
// values throw std::invalid_argument naming the key.
ExperimentConfig config_from_text(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});
std::string config_to_text(const ExperimentConfig& cfg);
void save_config_file(const std::string& path, const ExperimentConfig& cfg);

// Training hyperparameters as published: lr 0.1, 1000 epochs, batch 128,
// weight decay 1e-4.
void apply_paper_hyperparams(ExperimentConfig& cfg);

}  // namespace prvnet
