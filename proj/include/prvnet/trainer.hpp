#pragma once

#include "prvnet/dataset.hpp"
#include "prvnet/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace prvnet {

struct TrainConfig {
  int batch_size = 128;
  int epochs = 200;
  float lr = 1e-3f;
  float weight_decay = 1e-4f;  // decoupled, applied to every parameter
  std::uint64_t seed = 1;      // drives init, shuffling, eps, noise, dropout
  double beta_end = 1.0;       // end value of the KL-weight ramp
  double anneal_frac = 0.5;    // fraction of all updates spent ramping
  float dropout = 0.0f;        // inverted input dropout (the autoencoder baseline)
  std::optional<double> train_snr_db;  // AWGN on the codeword during training
};

// beta(t) = min(beta_end, beta_end * t / T) over 0-based update indices t,
// with T = round(anneal_frac * total_updates). A ramp always starts at
// beta = 0; anneal_frac = 0 holds beta_end from the first update.
class AnnealSchedule {
 public:
  AnnealSchedule(double beta_end, double anneal_frac, std::int64_t total_updates);
  double beta_at(std::int64_t update) const;
  double beta_end() const { return beta_end_; }
  std::int64_t ramp_updates() const { return ramp_updates_; }

 private:
  double beta_end_ = 0.0;
  std::int64_t ramp_updates_ = 0;
};

struct TraceRow {
  int epoch = 0;            // 1-based
  double beta = 0.0;        // beta used by the epoch's last update
  double recon_loss = 0.0;  // mean per-sample sum-squared reconstruction error
  double kl_loss = 0.0;     // mean per-sample KL (0 in point mode), floored at 0
  double total_loss = 0.0;  // recon_loss + beta * kl_loss, recomputed in double
  double val_nmse_db = 0.0;  // clean-feedback NMSE on the validation split
};

// CSV with the pinned header epoch,beta,recon_loss,kl_loss,total_loss,val_nmse_db
std::string trace_csv_string(const std::vector<TraceRow>& rows);
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows);

struct TrainResult {
  ModelParams model;  // weights of the best validation epoch
  std::vector<TraceRow> trace;
  int best_epoch = 0;  // 1-based
  double best_val_nmse_db = 0.0;
  std::int64_t total_updates = 0;
  double mean_train_noise_power = 0.0;  // 0 without train_snr_db
};

// Trains a fresh model (initialized from cfg.seed) on the train split,
// scoring the validation split after every epoch. Per-update randomness comes
// from streams derived as (seed, purpose, update index), and shuffling from
// (seed, shuffle, epoch), so runs are bitwise reproducible. Throws
// std::runtime_error if the loss stops being finite.
TrainResult train_model(const Architecture& arch, const ChannelDataset& data,
                        const TrainConfig& cfg);

// The beta of the trace row with the lowest validation NMSE; exact ties pick
// the smaller beta.
double select_beta_star(const std::vector<TraceRow>& trace);

struct AnnealOutcome {
  TrainResult exploration;  // beta ramped 0 -> 1
  double beta_star = 0.0;
  TrainResult final_run;  // fresh same-seed model, beta ramped 0 -> beta_star
};

// Two-phase recipe: ramp beta to 1 to explore, pick beta* from the
// exploration trace, then retrain from scratch with the ramp ending at beta*.
AnnealOutcome anneal_and_retrain(const Architecture& arch, const ChannelDataset& data,
                                 TrainConfig cfg);

}  // namespace prvnet
