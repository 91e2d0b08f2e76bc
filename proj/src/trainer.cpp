#include "prvnet/trainer.hpp"

#include "prvnet/evaluator.hpp"
#include "prvnet/graph.hpp"
#include "prvnet/ops.hpp"
#include "prvnet/optim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace prvnet {

AnnealSchedule::AnnealSchedule(double beta_end, double anneal_frac,
                               std::int64_t total_updates) {
  if (beta_end < 0.0) {
    throw std::invalid_argument("beta_end must be non-negative, got " + std::to_string(beta_end));
  }
  if (anneal_frac < 0.0 || anneal_frac > 1.0) {
    throw std::invalid_argument("anneal_frac must be in [0, 1], got " +
                                std::to_string(anneal_frac));
  }
  if (total_updates < 1) {
    throw std::invalid_argument("total_updates must be positive, got " +
                                std::to_string(total_updates));
  }
  beta_end_ = beta_end;
  ramp_updates_ = std::llround(anneal_frac * static_cast<double>(total_updates));
}

double AnnealSchedule::beta_at(std::int64_t update) const {
  if (update < 0) throw std::invalid_argument("negative update index");
  if (ramp_updates_ <= 0 || update >= ramp_updates_) return beta_end_;
  return beta_end_ * static_cast<double>(update) / static_cast<double>(ramp_updates_);
}

std::string trace_csv_string(const std::vector<TraceRow>& rows) {
  std::string out = "epoch,beta,recon_loss,kl_loss,total_loss,val_nmse_db\n";
  char buf[256];
  for (const TraceRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g,%.10g,%.6f\n", r.epoch, r.beta,
                  r.recon_loss, r.kl_loss, r.total_loss, r.val_nmse_db);
    out += buf;
  }
  return out;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open trace file for writing: " + path);
  const std::string body = trace_csv_string(rows);
  os.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!os) throw std::runtime_error("failed while writing trace: " + path);
}

namespace {

void check_train_config(const Architecture& arch, const ChannelDataset& data,
                        const TrainConfig& cfg) {
  if (cfg.batch_size < 1) {
    throw std::invalid_argument("batch_size must be positive, got " +
                                std::to_string(cfg.batch_size));
  }
  if (cfg.epochs < 1) {
    throw std::invalid_argument("epochs must be positive, got " + std::to_string(cfg.epochs));
  }
  if (!(cfg.lr > 0.0f)) {
    throw std::invalid_argument("learning rate must be positive, got " + std::to_string(cfg.lr));
  }
  if (cfg.weight_decay < 0.0f) {
    throw std::invalid_argument("weight decay must be non-negative, got " +
                                std::to_string(cfg.weight_decay));
  }
  if (arch.n_a != data.n_a || arch.n_t != data.n_t) {
    throw std::invalid_argument("architecture grid [" + std::to_string(arch.n_a) + "x" +
                                std::to_string(arch.n_t) + "] does not match dataset [" +
                                std::to_string(data.n_a) + "x" + std::to_string(data.n_t) + "]");
  }
  if (data.n_train < 1) throw std::invalid_argument("dataset has no training samples");
  if (data.n_val < 1) throw std::invalid_argument("dataset has no validation samples");
}

Tensor gather_batch(const ChannelDataset& data, const std::vector<int>& order, int begin,
                    int count) {
  const std::int64_t per = data.input_dim();
  Tensor batch({count, 2, data.n_a, data.n_t});
  for (int s = 0; s < count; ++s) {
    const Tensor& src = data.samples[static_cast<size_t>(order[static_cast<size_t>(begin + s)])];
    for (std::int64_t i = 0; i < per; ++i) batch.at(s * per + i) = src.at(i);
  }
  return batch;
}

}  // namespace

TrainResult train_model(const Architecture& arch, const ChannelDataset& data,
                        const TrainConfig& cfg) {
  check_train_config(arch, data, cfg);
  const bool variational = arch.mode == ModelMode::variational;
  const int n_train = data.n_train;
  const int batch = std::min(cfg.batch_size, n_train);
  const std::int64_t updates_per_epoch = (n_train + batch - 1) / batch;
  const std::int64_t total_updates = updates_per_epoch * cfg.epochs;
  const AnnealSchedule schedule(variational ? cfg.beta_end : 0.0, cfg.anneal_frac,
                                total_updates);

  ModelParams model = ModelParams::init(arch, cfg.seed);
  std::vector<Var> params = model.parameters();
  std::vector<Tensor*> param_ptrs;
  std::vector<const Tensor*> const_param_ptrs;
  for (Var& v : params) {
    param_ptrs.push_back(&v.value());
    const_param_ptrs.push_back(&v.value());
  }
  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  adam_cfg.weight_decay = cfg.weight_decay;
  AdamState adam(const_param_ptrs, adam_cfg);

  TrainResult result;
  result.total_updates = total_updates;
  result.best_val_nmse_db = std::numeric_limits<double>::infinity();
  std::vector<Tensor> best_tensors;

  EvalOptions val_opt;
  val_opt.split = kSplitVal;

  std::vector<int> order(static_cast<size_t>(n_train));
  for (int i = 0; i < n_train; ++i) order[static_cast<size_t>(i)] = i;

  std::int64_t update = 0;
  double noise_power_sum = 0.0;
  std::int64_t noisy_updates = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle_rng = derive_rng(cfg.seed, StreamPurpose::shuffle,
                                 static_cast<std::uint64_t>(epoch));
    for (int i = n_train - 1; i > 0; --i) {
      const int j = static_cast<int>(shuffle_rng.next_below(static_cast<std::uint64_t>(i + 1)));
      std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
    }

    double recon_sum = 0.0, kl_sum = 0.0;
    std::int64_t n_seen = 0;
    double beta = 0.0;

    for (int start = 0; start < n_train; start += batch) {
      const int bk = std::min(batch, n_train - start);
      beta = schedule.beta_at(update);

      Tensor raw = gather_batch(data, order, start, bk);
      Var target = constant(raw);  // keeps the clean batch for the loss
      Var input = target;
      if (cfg.dropout > 0.0f) {
        Rng drop_rng = derive_rng(cfg.seed, StreamPurpose::dropout,
                                  static_cast<std::uint64_t>(update));
        input = constant(input_dropout(raw, cfg.dropout, drop_rng));
      }

      EncoderHeads heads = encode_graph(model, input);
      Var z;
      Var kl;
      if (variational) {
        Rng eps_rng = derive_rng(cfg.seed, StreamPurpose::epsilon,
                                 static_cast<std::uint64_t>(update));
        Tensor eps({bk, arch.m});
        for (std::int64_t i = 0; i < eps.numel(); ++i) {
          eps.at(i) = static_cast<float>(eps_rng.gaussian());
        }
        z = add(heads.mu, mul(constant(std::move(eps)), exp(heads.log_sigma)));
        kl = kl_graph(heads);
      } else {
        z = heads.mu;
      }

      if (cfg.train_snr_db.has_value()) {
        Rng noise_rng = derive_rng(cfg.seed, StreamPurpose::channel_noise,
                                   static_cast<std::uint64_t>(update));
        AwgnResult noisy = add_awgn(z.value(), *cfg.train_snr_db, noise_rng);
        Tensor delta(noisy.z.shape());
        for (std::int64_t i = 0; i < delta.numel(); ++i) {
          delta.at(i) = noisy.z.at(i) - z.value().at(i);
        }
        z = add(z, constant(std::move(delta)));
        noise_power_sum += noisy.noise_power;
        ++noisy_updates;
      }

      Var x_hat = decode_graph(model, z);
      Var recon = sum(square(sub(x_hat, target)));
      Var loss = variational ? scale(add(recon, scale(kl, static_cast<float>(beta))),
                                     1.0f / static_cast<float>(bk))
                             : scale(recon, 1.0f / static_cast<float>(bk));

      if (!std::isfinite(loss.value().scalar_value())) {
        throw std::runtime_error("training loss became non-finite at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(start / batch + 1) + " (beta=" +
                                 std::to_string(beta) + ")");
      }

      zero_grad(params);
      backward(loss);
      std::vector<const Tensor*> grad_ptrs;
      grad_ptrs.reserve(params.size());
      for (Var& v : params) grad_ptrs.push_back(&v.grad());
      adam_step(param_ptrs, grad_ptrs, adam);

      recon_sum += recon.value().scalar_value();
      if (variational) kl_sum += kl.value().scalar_value();
      n_seen += bk;
      ++update;
    }

    const double val = evaluate(model, data, val_opt).nmse_db;
    TraceRow row;
    row.epoch = epoch;
    row.beta = beta;
    row.recon_loss = recon_sum / static_cast<double>(n_seen);
    row.kl_loss = std::max(kl_sum / static_cast<double>(n_seen), 0.0);
    row.total_loss = row.recon_loss + row.beta * row.kl_loss;
    row.val_nmse_db = val;
    result.trace.push_back(row);

    if (std::isfinite(val) && val < result.best_val_nmse_db) {
      result.best_val_nmse_db = val;
      result.best_epoch = epoch;
      best_tensors.clear();
      for (const Var& v : params) best_tensors.push_back(v.value());
    }
  }

  if (best_tensors.empty()) {
    throw std::runtime_error("no epoch produced a finite validation score");
  }
  result.model = params_from_tensors(arch, std::move(best_tensors));
  result.mean_train_noise_power =
      noisy_updates > 0 ? noise_power_sum / static_cast<double>(noisy_updates) : 0.0;
  return result;
}

double select_beta_star(const std::vector<TraceRow>& trace) {
  double best_nmse = std::numeric_limits<double>::infinity();
  double best_beta = 0.0;
  bool found = false;
  for (const TraceRow& row : trace) {
    if (!std::isfinite(row.val_nmse_db)) continue;
    if (!found || row.val_nmse_db < best_nmse ||
        (row.val_nmse_db == best_nmse && row.beta < best_beta)) {
      best_nmse = row.val_nmse_db;
      best_beta = row.beta;
      found = true;
    }
  }
  if (!found) throw std::invalid_argument("no finite validation score in the trace");
  return best_beta;
}

AnnealOutcome anneal_and_retrain(const Architecture& arch, const ChannelDataset& data,
                                 TrainConfig cfg) {
  if (arch.mode != ModelMode::variational) {
    throw std::invalid_argument("anneal_and_retrain needs a variational architecture");
  }
  AnnealOutcome out;
  TrainConfig explore = cfg;
  explore.beta_end = 1.0;
  out.exploration = train_model(arch, data, explore);
  out.beta_star = select_beta_star(out.exploration.trace);
  TrainConfig final_cfg = cfg;
  final_cfg.beta_end = out.beta_star;
  out.final_run = train_model(arch, data, final_cfg);
  return out;
}

}  // namespace prvnet
