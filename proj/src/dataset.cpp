#include "prvnet/dataset.hpp"

#include "prvnet/rng.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace prvnet {

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}
void write_f32(std::ostream& os, float v) { os.write(reinterpret_cast<const char*>(&v), 4); }

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
float read_f32(std::istream& is) {
  float v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

nlohmann::json params_to_json(const MultipathParams& p) {
  return {
      {"n_subcarriers", p.n_subcarriers}, {"n_t", p.n_t},
      {"num_paths", p.num_paths},         {"gain_scale", p.gain_scale},
      {"delay_min", p.delay_min},         {"delay_max", p.delay_max},
      {"delay_jitter", p.delay_jitter},   {"sin_aod_max", p.sin_aod_max},
  };
}

MultipathParams params_from_json(const nlohmann::json& j) {
  MultipathParams p;
  p.n_subcarriers = j.at("n_subcarriers").get<int>();
  p.n_t = j.at("n_t").get<int>();
  p.num_paths = j.at("num_paths").get<int>();
  p.gain_scale = j.at("gain_scale").get<double>();
  p.delay_min = j.at("delay_min").get<int>();
  p.delay_max = j.at("delay_max").get<int>();
  p.delay_jitter = j.at("delay_jitter").get<double>();
  p.sin_aod_max = j.at("sin_aod_max").get<double>();
  return p;
}

}  // namespace

int ChannelDataset::split_begin(int split) const {
  switch (split) {
    case 0: return 0;
    case 1: return n_train;
    case 2: return n_train + n_val;
    default: throw std::invalid_argument("split index must be 0, 1, or 2");
  }
}

int ChannelDataset::split_size(int split) const {
  switch (split) {
    case 0: return n_train;
    case 1: return n_val;
    case 2: return n_test;
    default: throw std::invalid_argument("split index must be 0, 1, or 2");
  }
}

ChannelDataset build_dataset(Scenario scenario, const MultipathParams& params, int count, int n_a,
                             std::uint64_t seed) {
  if (count < 15)
    throw std::invalid_argument("build_dataset: count must be at least 15, got " +
                                std::to_string(count));
  if (n_a <= 0 || n_a > params.n_subcarriers)
    throw std::invalid_argument("build_dataset: n_a=" + std::to_string(n_a) +
                                " outside [1, n_subcarriers=" +
                                std::to_string(params.n_subcarriers) + "]");

  ChannelDataset ds;
  ds.n_a = n_a;
  ds.n_t = params.n_t;
  ds.n_train = count * 10 / 15;
  ds.n_val = count * 3 / 15;
  ds.n_test = count - ds.n_train - ds.n_val;
  ds.scenario = scenario;
  ds.params = params;
  ds.seed = seed;

  std::vector<Tensor> raw;
  raw.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s = derive_seed(seed, StreamPurpose::dataset, static_cast<std::uint64_t>(i));
    raw.push_back(to_angular_delay(generate_channel(params, s), n_a).values);
  }

  float lo = std::numeric_limits<float>::infinity();
  float hi = -std::numeric_limits<float>::infinity();
  for (int i = 0; i < ds.n_train; ++i) {
    lo = std::min(lo, raw[static_cast<size_t>(i)].arr().minCoeff());
    hi = std::max(hi, raw[static_cast<size_t>(i)].arr().maxCoeff());
  }
  if (!(lo < hi))
    throw std::invalid_argument("build_dataset: degenerate train split, min " +
                                std::to_string(lo) + " not below max " + std::to_string(hi));
  ds.norm = {lo, hi};

  ds.samples.reserve(raw.size());
  for (auto& t : raw) {
    AngularDelayCsi csi;
    csi.values = std::move(t);
    ds.samples.push_back(normalize(csi, ds.norm).values);
  }
  return ds;
}

void save_dataset(const ChannelDataset& ds, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os.write("PRVC", 4);
  write_u32(os, 1);
  write_u32(os, static_cast<std::uint32_t>(ds.count()));
  write_u32(os, static_cast<std::uint32_t>(ds.n_a));
  write_u32(os, static_cast<std::uint32_t>(ds.n_t));
  write_u32(os, static_cast<std::uint32_t>(ds.n_train));
  write_u32(os, static_cast<std::uint32_t>(ds.n_val));
  write_u32(os, static_cast<std::uint32_t>(ds.n_test));
  write_f32(os, ds.norm.min_v);
  write_f32(os, ds.norm.max_v);
  for (const auto& s : ds.samples)
    os.write(reinterpret_cast<const char*>(s.data()),
             static_cast<std::streamsize>(s.numel() * 4));
  if (!os) throw std::runtime_error("short write to '" + path + "'");
  os.close();

  nlohmann::json side = {
      {"format", "PRVC"},
      {"scenario", to_string(ds.scenario)},
      {"seed", ds.seed},
      {"params", params_to_json(ds.params)},
  };
  std::ofstream js(path + ".json", std::ios::trunc);
  if (!js) throw std::runtime_error("cannot open '" + path + ".json' for writing");
  js << side.dump(2) << "\n";
}

ChannelDataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open dataset '" + path + "'");
  char magic[4] = {};
  is.read(magic, 4);
  if (std::memcmp(magic, "PRVC", 4) != 0)
    throw std::runtime_error("'" + path + "' is not a PRVC dataset (bad magic)");
  const std::uint32_t version = read_u32(is);
  if (version != 1)
    throw std::runtime_error("dataset '" + path + "' has unsupported version " +
                             std::to_string(version));
  ChannelDataset ds;
  const std::uint32_t count = read_u32(is);
  ds.n_a = static_cast<int>(read_u32(is));
  ds.n_t = static_cast<int>(read_u32(is));
  ds.n_train = static_cast<int>(read_u32(is));
  ds.n_val = static_cast<int>(read_u32(is));
  ds.n_test = static_cast<int>(read_u32(is));
  ds.norm.min_v = read_f32(is);
  ds.norm.max_v = read_f32(is);
  if (!is) throw std::runtime_error("dataset '" + path + "' truncated in header");
  if (ds.n_train + ds.n_val + ds.n_test != static_cast<int>(count))
    throw std::runtime_error("dataset '" + path + "' split counts do not sum to count");

  const std::int64_t per = 2ll * ds.n_a * ds.n_t;
  ds.samples.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Tensor t({2, ds.n_a, ds.n_t});
    is.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(per * 4));
    if (!is)
      throw std::runtime_error("dataset '" + path + "' truncated at sample " + std::to_string(i));
    ds.samples.push_back(std::move(t));
  }

  std::ifstream js(path + ".json");
  if (!js)
    throw std::runtime_error("dataset sidecar '" + path +
                             ".json' missing; it carries the generation parameters");
  nlohmann::json side = nlohmann::json::parse(js);
  ds.scenario = scenario_from_string(side.at("scenario").get<std::string>());
  ds.seed = side.at("seed").get<std::uint64_t>();
  ds.params = params_from_json(side.at("params"));
  return ds;
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "' for hashing");
  std::uint64_t h = 1469598103934665603ull;
  char buf[65536];
  while (is) {
    is.read(buf, sizeof(buf));
    const std::streamsize n = is.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::string hex_u64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

}  // namespace prvnet
