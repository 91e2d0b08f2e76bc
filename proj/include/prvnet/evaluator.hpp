#pragma once

#include "prvnet/dataset.hpp"
#include "prvnet/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace prvnet {

constexpr int kSplitTrain = 0;
constexpr int kSplitVal = 1;
constexpr int kSplitTest = 2;

// NMSE floor/sentinel: perfect (or all-excluded) reconstructions report this.
constexpr double kNmseFloorDb = -300.0;

// Feedback SNR grid used by snr_sweep, in dB.
inline const std::vector<double> kSnrGridDb = {35.0, 32.0, 29.0, 26.0, 23.0};

// AWGN feedback channel. Noise variance is set against the tensor's own
// empirical power: sigma_n^2 = P / 10^(snr_db/10), P = mean(z_i^2) over every
// element. One gaussian per element in flat order; a zero-power input passes
// through untouched.
struct AwgnResult {
  Tensor z;
  double signal_power = 0.0;
  double noise_power = 0.0;  // sigma_n^2 actually applied
};
AwgnResult add_awgn(const Tensor& z, double snr_db, Rng& rng);

// 10*log10(mean_i ||h_i - h_hat_i||^2 / ||h_i||^2), accumulated in double.
// Zero-norm references are excluded from the mean (counted into *excluded
// when given); no usable samples, or a mean at/below the floor, returns
// kNmseFloorDb.
double nmse_db(const std::vector<Tensor>& h, const std::vector<Tensor>& h_hat,
               int* excluded = nullptr);

struct EvalOptions {
  int split = kSplitTest;
  std::optional<double> snr_db;  // nullopt: clean feedback
  bool sample_codeword = false;  // true: transmit mu + sigma*eps instead of mu
  std::uint64_t seed = 0;        // derives the epsilon / channel-noise streams
};

struct EvalResult {
  double nmse_db = 0.0;
  int n_samples = 0;  // samples in the split
  int excluded = 0;   // zero-norm references skipped by the mean
  double signal_power = 0.0;
  double noise_power = 0.0;  // 0 for a clean channel
};

// Runs the model over one dataset split in a single batch: encode, transmit
// the codeword (mean by default, sampled on request, over AWGN when an SNR is
// given), decode, then score NMSE on denormalized values.
EvalResult evaluate(const ModelParams& model, const ChannelDataset& data,
                    const EvalOptions& opt);

// "prvnet-g0.25-M512" for variational models, "ae-..." for point-estimate.
std::string model_id(const Architecture& arch);

struct ReportRow {
  double gamma = 0.0;
  std::string scenario;
  std::string snr;  // "clean" or the dB value
  double nmse_db = 0.0;
  int n_samples = 0;
  std::string model_id;
  std::uint64_t seed = 0;
};

// Runs evaluate and packs the result into a report row; the snr field is
// "clean" or the %.10g form of opt.snr_db.
ReportRow evaluate_row(const ModelParams& model, const ChannelDataset& data,
                       const EvalOptions& opt);

// One clean row followed by the kSnrGridDb rows. Every row reuses the same
// eval seed, so the underlying noise draws are shared across SNR levels and
// differ only in scale.
std::vector<ReportRow> snr_sweep(const ModelParams& model, const ChannelDataset& data, int split,
                                 std::uint64_t seed);

// CSV with the pinned header gamma,scenario,snr_db,nmse_db,n_samples,model_id,seed
void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows);
std::string report_csv_string(const std::vector<ReportRow>& rows);

}  // namespace prvnet
