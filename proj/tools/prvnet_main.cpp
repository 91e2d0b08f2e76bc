#include <CLI11.hpp>

#include "prvnet/checkpoint.hpp"
#include "prvnet/config.hpp"
#include "prvnet/dataset.hpp"
#include "prvnet/manifest.hpp"
#include "prvnet/sweeps.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fs = std::filesystem;
using namespace prvnet;

namespace {

std::string out_root() {
  const char* env = std::getenv("PRVNET_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : ".";
}

void require_file(const std::string& path, const char* what) {
  if (!fs::exists(path))
    throw std::runtime_error(std::string(what) + " not found: " + path);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Validator for flags that accept "0.25" or "1/4".
std::string check_ratio(const std::string& s) {
  try {
    parse_ratio(s);
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

std::string check_ratio_list(const std::string& s) {
  try {
    parse_ratio_list(s);
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

void print_report(const std::vector<ReportRow>& rows) {
  std::printf("%-10s %-9s %-8s %-12s %-10s %-22s %s\n", "gamma", "scenario", "snr_db", "nmse_db",
              "n_samples", "model_id", "seed");
  for (const ReportRow& r : rows) {
    std::printf("%-10.6g %-9s %-8s %-12.6f %-10d %-22s %llu\n", r.gamma, r.scenario.c_str(),
                r.snr.c_str(), r.nmse_db, r.n_samples, r.model_id.c_str(),
                static_cast<unsigned long long>(r.seed));
  }
}

// Training-budget flags shared by train and sweep. Values land in the config
// only for flags actually given, preserving flags > file > defaults.
struct BudgetFlags {
  int epochs = 0;
  int batch = 0;
  double lr = 0.0;
  double weight_decay = 0.0;
  double beta_end = 0.0;
  double anneal_frac = 0.0;
  double dropout = 0.0;
  double train_snr = 0.0;
  std::uint64_t seed = 0;
  bool paper = false;

  void add_to(CLI::App* app) {
    app->add_option("--epochs", epochs, "training epochs");
    app->add_option("--batch", batch, "batch size");
    app->add_option("--lr", lr, "learning rate");
    app->add_option("--weight-decay", weight_decay, "decoupled weight decay");
    app->add_option("--beta-end", beta_end, "end value of the KL-weight ramp");
    app->add_option("--anneal-frac", anneal_frac, "fraction of updates spent ramping");
    app->add_option("--dropout", dropout, "input dropout rate");
    app->add_option("--train-snr", train_snr, "AWGN SNR (dB) on codewords during training");
    app->add_option("--seed", seed, "master seed for all random streams");
    app->add_flag("--paper-hyperparams", paper,
                  "published budget: lr 0.1, 1000 epochs, batch 128, weight decay 1e-4");
  }

  void apply(const CLI::App* app, ExperimentConfig& cfg) const {
    if (paper) apply_paper_hyperparams(cfg);
    if (app->count("--epochs")) cfg.epochs = epochs;
    if (app->count("--batch")) cfg.batch_size = batch;
    if (app->count("--lr")) cfg.lr = lr;
    if (app->count("--weight-decay")) cfg.weight_decay = weight_decay;
    if (app->count("--beta-end")) cfg.beta_end = beta_end;
    if (app->count("--anneal-frac")) cfg.anneal_frac = anneal_frac;
    if (app->count("--dropout")) cfg.dropout = dropout;
    if (app->count("--train-snr")) cfg.train_snr_db = train_snr;
    if (app->count("--seed")) cfg.seed = seed;
  }
};

ExperimentConfig base_config(const CLI::App* app, const std::string& config_path) {
  ExperimentConfig cfg;
  if (app->count("--config")) cfg = load_config_file(config_path, cfg);
  return cfg;
}

// ---------------------------------------------------------------- gen-data

void run_gen_data(const ExperimentConfig& cfg, const std::string& out_path) {
  ChannelDataset ds =
      build_dataset(cfg.scenario_enum(), cfg.multipath(), cfg.count, cfg.n_a, cfg.seed);
  const fs::path parent = fs::path(out_path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  save_dataset(ds, out_path);
  std::printf("dataset: %s\n", out_path.c_str());
  std::printf("splits: %d/%d/%d\n", ds.n_train, ds.n_val, ds.n_test);
  std::printf("hash: %s\n", hex_u64(fnv1a_file(out_path)).c_str());
}

// ------------------------------------------------------------------- train

void run_train(const ExperimentConfig& cfg, const std::string& data_path,
               const std::string& run_dir, bool single_phase, bool quiet) {
  require_file(data_path, "dataset");
  ChannelDataset data = load_dataset(data_path);
  const ModelMode mode = cfg.mode_enum();
  const Architecture arch = Architecture::for_gamma(cfg.gamma, data.n_a, data.n_t, mode);
  const TrainConfig tc = cfg.train_config();

  fs::create_directories(run_dir);
  save_config_file(run_dir + "/config.ini", cfg);

  RunManifest man;
  man.command = "train";
  man.config_text = config_to_text(cfg);
  man.dataset_path = data_path;
  man.dataset_hash = hex_u64(fnv1a_file(data_path));
  man.artifacts["config"] = run_dir + "/config.ini";

  if (!quiet) {
    std::printf("dataset: %s (%d samples, splits %d/%d/%d)\n", data_path.c_str(), data.count(),
                data.n_train, data.n_val, data.n_test);
  }
  const auto t0 = std::chrono::steady_clock::now();

  const bool two_phase =
      mode == ModelMode::variational && !cfg.beta_fixed.has_value() && !single_phase;
  if (two_phase) {
    AnnealOutcome out = anneal_and_retrain(arch, data, tc);
    save_checkpoint(out.exploration.model, run_dir + "/exploration.ckpt");
    write_trace_csv(run_dir + "/trace_exploration.csv", out.exploration.trace);
    save_checkpoint(out.final_run.model, run_dir + "/final.ckpt");
    write_trace_csv(run_dir + "/trace_final.csv", out.final_run.trace);
    man.beta_star = out.beta_star;
    man.artifacts["checkpoint"] = run_dir + "/final.ckpt";
    man.artifacts["checkpoint_exploration"] = run_dir + "/exploration.ckpt";
    man.artifacts["trace"] = run_dir + "/trace_final.csv";
    man.artifacts["trace_exploration"] = run_dir + "/trace_exploration.csv";
    if (!quiet) {
      std::printf("phase 1 (anneal to 1): best val NMSE %.6f dB (epoch %d)\n",
                  out.exploration.best_val_nmse_db, out.exploration.best_epoch);
      std::printf("beta* = %.10g\n", out.beta_star);
      std::printf("phase 2 (anneal to beta*): best val NMSE %.6f dB (epoch %d)\n",
                  out.final_run.best_val_nmse_db, out.final_run.best_epoch);
      std::printf("checkpoint: %s/final.ckpt\n", run_dir.c_str());
    }
  } else {
    TrainResult r = train_model(arch, data, tc);
    save_checkpoint(r.model, run_dir + "/model.ckpt");
    write_trace_csv(run_dir + "/trace.csv", r.trace);
    man.artifacts["checkpoint"] = run_dir + "/model.ckpt";
    man.artifacts["trace"] = run_dir + "/trace.csv";
    if (!quiet) {
      std::printf("trained %s: best val NMSE %.6f dB (epoch %d)\n", model_id(arch).c_str(),
                  r.best_val_nmse_db, r.best_epoch);
      std::printf("checkpoint: %s/model.ckpt\n", run_dir.c_str());
    }
  }
  man.wall_seconds = seconds_since(t0);
  save_manifest(run_dir + "/manifest.json", man);
  if (!quiet) std::printf("manifest: %s/manifest.json\n", run_dir.c_str());
}

// -------------------------------------------------------------------- eval

void run_eval(const ExperimentConfig& cfg, const std::string& ckpt_path,
              const std::string& data_path, const std::string& run_dir, bool svg) {
  require_file(ckpt_path, "checkpoint");
  require_file(data_path, "dataset");
  const ModelParams model = load_checkpoint(ckpt_path);
  const ChannelDataset data = load_dataset(data_path);
  const auto t0 = std::chrono::steady_clock::now();

  const bool do_snr_sweep = cfg.snr == "sweep";
  std::vector<ReportRow> rows;
  if (do_snr_sweep) {
    rows = snr_sweep(model, data, cfg.split_index(), cfg.seed);
  } else {
    EvalOptions opt;
    opt.split = cfg.split_index();
    opt.snr_db = cfg.snr_value();
    opt.sample_codeword = cfg.sample_codeword;
    opt.seed = cfg.seed;
    rows.push_back(evaluate_row(model, data, opt));
  }

  fs::create_directories(run_dir);
  save_config_file(run_dir + "/config.ini", cfg);
  write_report_csv(run_dir + "/report.csv", rows);

  RunManifest man;
  man.command = "eval";
  man.config_text = config_to_text(cfg);
  man.dataset_path = data_path;
  man.dataset_hash = hex_u64(fnv1a_file(data_path));
  man.inputs["checkpoint"] = ckpt_path;
  man.artifacts["config"] = run_dir + "/config.ini";
  man.artifacts["report"] = run_dir + "/report.csv";
  if (svg && do_snr_sweep) {
    write_text_file(run_dir + "/nmse_vs_snr.svg", nmse_vs_snr_svg(rows));
    man.artifacts["plot"] = run_dir + "/nmse_vs_snr.svg";
  }
  man.wall_seconds = seconds_since(t0);
  save_manifest(run_dir + "/manifest.json", man);

  print_report(rows);
  std::printf("report: %s/report.csv\n", run_dir.c_str());
}

// ------------------------------------------------------------------- sweep

std::string self_exe_path() {
  char buf[4096];
  const ssize_t n = readlink("/proc/self/exe", buf, sizeof buf - 1);
  if (n <= 0) throw std::runtime_error("cannot resolve own executable path");
  buf[n] = '\0';
  return buf;
}

pid_t spawn_child(const std::string& exe, const std::vector<std::string>& args,
                  const std::string& log_path) {
  const pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork failed");
  if (pid == 0) {
    const int fd = ::open(log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd >= 0) {
      dup2(fd, STDOUT_FILENO);
      dup2(fd, STDERR_FILENO);
      ::close(fd);
    }
    std::vector<char*> argv;
    argv.reserve(args.size() + 1);
    for (const std::string& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execv(exe.c_str(), argv.data());
    _exit(127);
  }
  return pid;
}

struct SweepArmSpec {
  std::string name;
  std::vector<std::string> extra_args;  // appended to the train invocation
  std::string checkpoint_file;          // file name inside the arm's run dir
};

// Trains every arm as a subprocess (up to cfg.parallel at once), evaluates
// finished arms in the parent, and persists the aggregated report and the
// manifest after every completion so interrupted sweeps keep finished rows.
int run_sweep(const ExperimentConfig& cfg, const std::string& data_path,
              const std::string& run_dir) {
  require_file(data_path, "dataset");
  const ChannelDataset data = load_dataset(data_path);
  if (cfg.parallel < 1) throw std::invalid_argument("sweep.parallel must be at least 1");

  fs::create_directories(run_dir + "/runs");
  save_config_file(run_dir + "/config.ini", cfg);

  std::vector<SweepArmSpec> arms;
  char gbuf[64];
  if (cfg.baseline_compare) {
    // Paired robustness comparison at one gamma: the annealed two-phase
    // variational model against the point-estimate baseline. Input dropout is
    // the baseline's regularizer, so the variational arm pins it to 0.
    std::snprintf(gbuf, sizeof gbuf, "%.17g", cfg.gamma);
    arms.push_back({"prvnet", {"--gamma", gbuf, "--dropout", "0"}, "final.ckpt"});
    arms.push_back({"ae", {"--gamma", gbuf, "--baseline", "point_estimate"}, "model.ckpt"});
  } else {
    for (double gamma : cfg.gammas) {
      std::snprintf(gbuf, sizeof gbuf, "%.17g", gamma);
      char name[80];
      std::snprintf(name, sizeof name, "cr-g%.6g", gamma);
      arms.push_back({name, {"--gamma", gbuf, "--single-phase"}, "model.ckpt"});
    }
  }

  RunManifest man;
  man.command = "sweep";
  man.config_text = config_to_text(cfg);
  man.dataset_path = data_path;
  man.dataset_hash = hex_u64(fnv1a_file(data_path));
  man.status = "incomplete";
  man.artifacts["config"] = run_dir + "/config.ini";
  save_manifest(run_dir + "/manifest.json", man);

  const auto t0 = std::chrono::steady_clock::now();
  const std::string exe = self_exe_path();
  std::vector<std::vector<ReportRow>> arm_rows(arms.size());
  std::vector<bool> arm_ok(arms.size(), false);

  // Rewrites report/manifest from the arms finished so far, in arm order.
  const auto persist = [&]() {
    std::vector<ReportRow> rows;
    for (size_t i = 0; i < arms.size(); ++i)
      rows.insert(rows.end(), arm_rows[i].begin(), arm_rows[i].end());
    if (!rows.empty()) {
      write_report_csv(run_dir + "/report.csv", rows);
      man.artifacts["report"] = run_dir + "/report.csv";
    }
    man.wall_seconds = seconds_since(t0);
    save_manifest(run_dir + "/manifest.json", man);
    return rows;
  };

  const auto on_arm_done = [&](size_t i, int exit_code) {
    const std::string arm_dir = run_dir + "/runs/" + arms[i].name;
    if (exit_code == 0) {
      const ModelParams model = load_checkpoint(arm_dir + "/" + arms[i].checkpoint_file);
      if (cfg.baseline_compare) {
        arm_rows[i] = snr_sweep(model, data, kSplitTest, cfg.seed);
      } else {
        EvalOptions clean;
        clean.split = kSplitTest;
        clean.seed = cfg.seed;
        arm_rows[i] = {evaluate_row(model, data, clean)};
      }
      arm_ok[i] = true;
      man.artifacts["run:" + arms[i].name] = arm_dir + "/manifest.json";
    } else {
      man.failures.push_back(arms[i].name + ": exit code " + std::to_string(exit_code) +
                             " (see " + arm_dir + "/log.txt)");
    }
    persist();
  };

  size_t next = 0;
  std::map<pid_t, size_t> running;
  const auto launch = [&]() {
    while (running.size() < static_cast<size_t>(cfg.parallel) && next < arms.size()) {
      const size_t i = next++;
      const std::string arm_dir = run_dir + "/runs/" + arms[i].name;
      fs::create_directories(arm_dir);
      std::vector<std::string> args = {exe,
                                       "train",
                                       "--config",
                                       run_dir + "/config.ini",
                                       "--data",
                                       data_path,
                                       "--out",
                                       arm_dir,
                                       "--quiet"};
      args.insert(args.end(), arms[i].extra_args.begin(), arms[i].extra_args.end());
      running[spawn_child(exe, args, arm_dir + "/log.txt")] = i;
    }
  };

  launch();
  while (!running.empty()) {
    int status = 0;
    const pid_t pid = waitpid(-1, &status, 0);
    if (pid < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("waitpid failed while supervising sweep arms");
    }
    const auto it = running.find(pid);
    if (it == running.end()) continue;
    const size_t i = it->second;
    running.erase(it);
    on_arm_done(i, WIFEXITED(status) ? WEXITSTATUS(status) : 128);
    launch();
  }

  if (cfg.baseline_compare && arm_ok[0]) {
    man.beta_star = load_manifest(run_dir + "/runs/prvnet/manifest.json").beta_star;
  }
  man.status = man.failures.empty() ? "complete" : "incomplete";
  const std::vector<ReportRow> rows = persist();

  if (!rows.empty()) {
    const std::string plot_path =
        run_dir + (cfg.baseline_compare ? "/nmse_vs_snr.svg" : "/nmse_vs_compression.svg");
    write_text_file(plot_path, cfg.baseline_compare ? nmse_vs_snr_svg(rows)
                                                    : nmse_vs_compression_svg(rows));
    man.artifacts["plot"] = plot_path;
    man.wall_seconds = seconds_since(t0);
    save_manifest(run_dir + "/manifest.json", man);
  }

  print_report(rows);
  for (const std::string& f : man.failures) std::printf("failed arm: %s\n", f.c_str());
  std::printf("report: %s/report.csv\n", run_dir.c_str());
  return man.failures.empty() ? 0 : 1;
}

// ---------------------------------------------------------- show-manifest

void run_show_manifest(const std::string& path) {
  std::string p = path;
  if (fs::is_directory(p)) p += "/manifest.json";
  require_file(p, "manifest");
  const RunManifest m = load_manifest(p);
  std::fputs(manifest_to_json(m).c_str(), stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PRVNet: variational CSI-feedback compression toolkit"};
  app.require_subcommand(1);

  // gen-data
  CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic CSI dataset");
  std::string gen_config, gen_out, gen_scenario;
  int gen_count = 0, gen_na = 0, gen_nsub = 0, gen_nt = 0, gen_paths = 0;
  std::uint64_t gen_seed = 0;
  gen->add_option("--config", gen_config, "config file (flat key=value text)");
  gen->add_option("--out", gen_out, "output dataset path")->required();
  gen->add_option("--count", gen_count, "number of samples");
  gen->add_option("--scenario", gen_scenario, "channel scenario")
      ->check(CLI::IsMember({"indoor", "outdoor"}));
  gen->add_option("--n-a", gen_na, "retained delay rows");
  gen->add_option("--n-subcarriers", gen_nsub, "OFDM subcarriers");
  gen->add_option("--n-t", gen_nt, "transmit antennas");
  gen->add_option("--paths", gen_paths, "multipath count (0: scenario preset)");
  gen->add_option("--seed", gen_seed, "master seed");

  // train
  CLI::App* train = app.add_subcommand("train", "train a model and write a checkpoint");
  std::string tr_config, tr_data, tr_gamma, tr_baseline, tr_out;
  double tr_beta_fixed = 0.0;
  bool tr_single = false, tr_quiet = false;
  BudgetFlags tr_budget;
  train->add_option("--config", tr_config, "config file (flat key=value text)");
  train->add_option("--data", tr_data, "dataset file")->required();
  train->add_option("--gamma", tr_gamma, "compression ratio (0.25 or 1/4)")
      ->check(check_ratio);
  train->add_option("--beta-fixed", tr_beta_fixed,
                    "hold this beta from the first update (single phase, no ramp)");
  train->add_option("--baseline", tr_baseline, "model family")
      ->check(CLI::IsMember({"point-estimate", "point_estimate", "variational"}));
  train->add_flag("--single-phase", tr_single, "skip the beta* retrain phase");
  train->add_flag("--quiet", tr_quiet, "suppress progress output");
  train->add_option("--out", tr_out, "run directory");
  tr_budget.add_to(train);

  // eval
  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint and write a report");
  std::string ev_config, ev_ckpt, ev_data, ev_split, ev_out;
  double ev_snr = 0.0;
  std::uint64_t ev_seed = 0;
  bool ev_clean = false, ev_sweep = false, ev_sample = false, ev_svg = false;
  eval->add_option("--config", ev_config, "config file (flat key=value text)");
  eval->add_option("--checkpoint", ev_ckpt, "model checkpoint")->required();
  eval->add_option("--data", ev_data, "dataset file")->required();
  CLI::Option* o_snr = eval->add_option("--snr", ev_snr, "feedback SNR in dB");
  CLI::Option* o_clean = eval->add_flag("--clean", ev_clean, "noise-free feedback");
  CLI::Option* o_sweep =
      eval->add_flag("--snr-sweep", ev_sweep, "clean row plus the 35/32/29/26/23 dB grid");
  o_clean->excludes(o_snr);
  o_sweep->excludes(o_snr);
  o_sweep->excludes(o_clean);
  eval->add_flag("--sample-codeword", ev_sample, "transmit mu + sigma*eps instead of mu");
  eval->add_option("--split", ev_split, "dataset split")
      ->check(CLI::IsMember({"train", "val", "test"}));
  eval->add_option("--seed", ev_seed, "evaluation noise seed");
  eval->add_flag("--svg", ev_svg, "also write an SVG plot for sweeps");
  eval->add_option("--out", ev_out, "run directory");

  // sweep
  CLI::App* sweep = app.add_subcommand("sweep", "train and evaluate a grid of models");
  std::string sw_config, sw_data, sw_gammas, sw_gamma, sw_out;
  int sw_parallel = 0;
  bool sw_baseline = false;
  BudgetFlags sw_budget;
  sweep->add_option("--config", sw_config, "config file (flat key=value text)");
  sweep->add_option("--data", sw_data, "dataset file")->required();
  sweep->add_option("--gammas", sw_gammas, "comma-separated compression ratios")
      ->check(check_ratio_list);
  sweep->add_option("--gamma", sw_gamma, "compression ratio for --baseline-compare")
      ->check(check_ratio);
  sweep->add_flag("--baseline-compare", sw_baseline,
                  "paired variational vs point-estimate robustness sweep");
  sweep->add_option("--parallel", sw_parallel, "concurrent training processes");
  sweep->add_option("--out", sw_out, "run directory");
  sw_budget.add_to(sweep);

  // show-manifest
  CLI::App* show = app.add_subcommand("show-manifest", "print a run manifest");
  std::string show_path;
  show->add_option("path", show_path, "manifest file or run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen) {
      ExperimentConfig cfg = base_config(gen, gen_config);
      if (gen->count("--count")) cfg.count = gen_count;
      if (gen->count("--scenario")) cfg.scenario = gen_scenario;
      if (gen->count("--n-a")) cfg.n_a = gen_na;
      if (gen->count("--n-subcarriers")) cfg.n_subcarriers = gen_nsub;
      if (gen->count("--n-t")) cfg.n_t = gen_nt;
      if (gen->count("--paths")) cfg.num_paths = gen_paths;
      if (gen->count("--seed")) cfg.seed = gen_seed;
      run_gen_data(cfg, gen_out);
    } else if (*train) {
      ExperimentConfig cfg = base_config(train, tr_config);
      tr_budget.apply(train, cfg);
      if (train->count("--gamma")) cfg.gamma = parse_ratio(tr_gamma);
      if (train->count("--beta-fixed")) cfg.beta_fixed = tr_beta_fixed;
      if (train->count("--baseline")) {
        cfg.mode = tr_baseline == "point-estimate" ? "point_estimate" : tr_baseline;
      }
      const std::string run_dir =
          train->count("--out") ? tr_out : out_root() + "/train-run";
      run_train(cfg, tr_data, run_dir, tr_single, tr_quiet);
    } else if (*eval) {
      ExperimentConfig cfg = base_config(eval, ev_config);
      if (eval->count("--snr")) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", ev_snr);
        cfg.snr = buf;
      }
      if (ev_clean) cfg.snr = "clean";
      if (ev_sweep) cfg.snr = "sweep";
      if (eval->count("--split")) cfg.split = ev_split;
      if (eval->count("--seed")) cfg.seed = ev_seed;
      if (ev_sample) cfg.sample_codeword = true;
      const std::string run_dir = eval->count("--out") ? ev_out : out_root() + "/eval-run";
      run_eval(cfg, ev_ckpt, ev_data, run_dir, ev_svg);
    } else if (*sweep) {
      ExperimentConfig cfg = base_config(sweep, sw_config);
      sw_budget.apply(sweep, cfg);
      if (sweep->count("--gammas")) cfg.gammas = parse_ratio_list(sw_gammas);
      if (sweep->count("--gamma")) cfg.gamma = parse_ratio(sw_gamma);
      if (sw_baseline) cfg.baseline_compare = true;
      if (sweep->count("--parallel")) cfg.parallel = sw_parallel;
      const std::string run_dir = sweep->count("--out") ? sw_out : out_root() + "/sweep-run";
      return run_sweep(cfg, sw_data, run_dir);
    } else if (*show) {
      run_show_manifest(show_path);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
