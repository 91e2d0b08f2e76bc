#include "prvnet/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prvnet {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double_strict(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw std::invalid_argument("config value for '" + key + "' is not a number: '" + text + "'");
  return v;
}

int parse_int_strict(const std::string& text, const std::string& key) {
  const double v = parse_double_strict(text, key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw std::invalid_argument("config value for '" + key + "' is not an integer: '" + text +
                                "'");
  return i;
}

std::uint64_t parse_u64_strict(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || t[0] == '-' || end != t.c_str() + t.size())
    throw std::invalid_argument("config value for '" + key +
                                "' is not an unsigned integer: '" + text + "'");
  return static_cast<std::uint64_t>(v);
}

bool parse_bool_strict(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw std::invalid_argument("config value for '" + key + "' is not a boolean: '" + text + "'");
}

std::optional<double> parse_opt_double(const std::string& text, const std::string& key) {
  if (trim(text) == "none") return std::nullopt;
  return parse_double_strict(text, key);
}

// Shortest decimal form that parses back to the same double.
std::string fmt_double(double v) {
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v.has_value() ? fmt_double(*v) : "none";
}

}  // namespace

double parse_ratio(const std::string& text) {
  const std::string t = trim(text);
  const size_t slash = t.find('/');
  if (slash == std::string::npos) return parse_double_strict(t, "ratio");
  const double num = parse_double_strict(t.substr(0, slash), "ratio numerator");
  const double den = parse_double_strict(t.substr(slash + 1), "ratio denominator");
  if (den == 0.0) throw std::invalid_argument("ratio denominator is zero: '" + text + "'");
  return num / den;
}

std::vector<double> parse_ratio_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, ',')) out.push_back(parse_ratio(item));
  if (out.empty()) throw std::invalid_argument("empty ratio list");
  return out;
}

ExperimentConfig config_from_text(const std::string& text, ExperimentConfig base) {
  ExperimentConfig& c = base;
  std::string section;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value, got '" + line + "'");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "dataset.scenario") c.scenario = value;
    else if (key == "dataset.count") c.count = parse_int_strict(value, key);
    else if (key == "dataset.n_a") c.n_a = parse_int_strict(value, key);
    else if (key == "dataset.n_subcarriers") c.n_subcarriers = parse_int_strict(value, key);
    else if (key == "dataset.n_t") c.n_t = parse_int_strict(value, key);
    else if (key == "dataset.num_paths") c.num_paths = parse_int_strict(value, key);
    else if (key == "model.gamma") c.gamma = parse_ratio(value);
    else if (key == "model.mode") c.mode = value;
    else if (key == "train.batch_size") c.batch_size = parse_int_strict(value, key);
    else if (key == "train.epochs") c.epochs = parse_int_strict(value, key);
    else if (key == "train.lr") c.lr = parse_double_strict(value, key);
    else if (key == "train.weight_decay") c.weight_decay = parse_double_strict(value, key);
    else if (key == "train.seed") c.seed = parse_u64_strict(value, key);
    else if (key == "train.beta_end") c.beta_end = parse_double_strict(value, key);
    else if (key == "train.anneal_frac") c.anneal_frac = parse_double_strict(value, key);
    else if (key == "train.dropout") c.dropout = parse_double_strict(value, key);
    else if (key == "train.train_snr_db") c.train_snr_db = parse_opt_double(value, key);
    else if (key == "train.beta_fixed") c.beta_fixed = parse_opt_double(value, key);
    else if (key == "eval.split") c.split = value;
    else if (key == "eval.snr") c.snr = value;
    else if (key == "eval.sample_codeword") c.sample_codeword = parse_bool_strict(value, key);
    else if (key == "sweep.gammas") c.gammas = parse_ratio_list(value);
    else if (key == "sweep.baseline_compare") c.baseline_compare = parse_bool_strict(value, key);
    else if (key == "sweep.parallel") c.parallel = parse_int_strict(value, key);
    else
      throw std::invalid_argument("unknown config key '" + key + "' (line " +
                                  std::to_string(lineno) + ")");
  }
  return c;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return config_from_text(ss.str(), std::move(base));
}

std::string config_to_text(const ExperimentConfig& c) {
  std::string out;
  out += "[dataset]\n";
  out += "scenario = " + c.scenario + "\n";
  out += "count = " + std::to_string(c.count) + "\n";
  out += "n_a = " + std::to_string(c.n_a) + "\n";
  out += "n_subcarriers = " + std::to_string(c.n_subcarriers) + "\n";
  out += "n_t = " + std::to_string(c.n_t) + "\n";
  out += "num_paths = " + std::to_string(c.num_paths) + "\n";
  out += "\n[model]\n";
  out += "gamma = " + fmt_double(c.gamma) + "\n";
  out += "mode = " + c.mode + "\n";
  out += "\n[train]\n";
  out += "batch_size = " + std::to_string(c.batch_size) + "\n";
  out += "epochs = " + std::to_string(c.epochs) + "\n";
  out += "lr = " + fmt_double(c.lr) + "\n";
  out += "weight_decay = " + fmt_double(c.weight_decay) + "\n";
  out += "seed = " + std::to_string(static_cast<unsigned long long>(c.seed)) + "\n";
  out += "beta_end = " + fmt_double(c.beta_end) + "\n";
  out += "anneal_frac = " + fmt_double(c.anneal_frac) + "\n";
  out += "dropout = " + fmt_double(c.dropout) + "\n";
  out += "train_snr_db = " + fmt_opt(c.train_snr_db) + "\n";
  out += "beta_fixed = " + fmt_opt(c.beta_fixed) + "\n";
  out += "\n[eval]\n";
  out += "split = " + c.split + "\n";
  out += "snr = " + c.snr + "\n";
  out += std::string("sample_codeword = ") + (c.sample_codeword ? "true" : "false") + "\n";
  out += "\n[sweep]\n";
  out += "gammas = ";
  for (size_t i = 0; i < c.gammas.size(); ++i)
    out += (i ? "," : "") + fmt_double(c.gammas[i]);
  out += "\n";
  out += std::string("baseline_compare = ") + (c.baseline_compare ? "true" : "false") + "\n";
  out += "parallel = " + std::to_string(c.parallel) + "\n";
  return out;
}

void save_config_file(const std::string& path, const ExperimentConfig& cfg) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open config file for writing: " + path);
  const std::string body = config_to_text(cfg);
  os.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!os) throw std::runtime_error("failed while writing config: " + path);
}

Scenario ExperimentConfig::scenario_enum() const { return scenario_from_string(scenario); }

ModelMode ExperimentConfig::mode_enum() const { return mode_from_string(mode); }

int ExperimentConfig::split_index() const {
  if (split == "train") return 0;
  if (split == "val") return 1;
  if (split == "test") return 2;
  throw std::invalid_argument("eval.split must be train, val, or test, got '" + split + "'");
}

std::optional<double> ExperimentConfig::snr_value() const {
  if (snr == "clean") return std::nullopt;
  if (snr == "sweep")
    throw std::invalid_argument("eval.snr is 'sweep'; there is no single SNR value");
  return parse_double_strict(snr, "eval.snr");
}

MultipathParams ExperimentConfig::multipath() const {
  MultipathParams p = scenario_params(scenario_enum(), n_subcarriers, n_t);
  if (num_paths < 0) throw std::invalid_argument("dataset.num_paths must be non-negative");
  if (num_paths > 0) p.num_paths = num_paths;
  return p;
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig tc;
  tc.batch_size = batch_size;
  tc.epochs = epochs;
  tc.lr = static_cast<float>(lr);
  tc.weight_decay = static_cast<float>(weight_decay);
  tc.seed = seed;
  tc.beta_end = beta_end;
  tc.anneal_frac = anneal_frac;
  tc.dropout = static_cast<float>(dropout);
  tc.train_snr_db = train_snr_db;
  if (beta_fixed.has_value()) {
    tc.beta_end = *beta_fixed;
    tc.anneal_frac = 0.0;  // hold the fixed value from the first update
  }
  return tc;
}

void apply_paper_hyperparams(ExperimentConfig& cfg) {
  cfg.lr = 0.1;
  cfg.epochs = 1000;
  cfg.batch_size = 128;
  cfg.weight_decay = 1e-4;
}

}  // namespace prvnet
