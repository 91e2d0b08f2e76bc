#include "prvnet/checkpoint.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace prvnet {

namespace {

constexpr char kMagic[4] = {'P', 'R', 'V', 'W'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is, const std::string& what) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) {
    throw std::runtime_error("checkpoint truncated while reading " + what);
  }
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

}  // namespace

std::string arch_to_json_string(const Architecture& a) {
  nlohmann::json j;
  j["n_a"] = a.n_a;
  j["n_t"] = a.n_t;
  j["enc_ch1"] = a.enc_ch1;
  j["enc_ch2"] = a.enc_ch2;
  j["dec_ch1"] = a.dec_ch1;
  j["dec_ch2"] = a.dec_ch2;
  j["kernel"] = a.kernel;
  j["m"] = a.m;
  j["mode"] = to_string(a.mode);
  return j.dump();
}

Architecture arch_from_json_string(const std::string& s) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(s);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("architecture descriptor is not valid JSON: ") +
                             e.what());
  }
  Architecture a;
  try {
    a.n_a = j.at("n_a").get<int>();
    a.n_t = j.at("n_t").get<int>();
    a.enc_ch1 = j.at("enc_ch1").get<int>();
    a.enc_ch2 = j.at("enc_ch2").get<int>();
    a.dec_ch1 = j.at("dec_ch1").get<int>();
    a.dec_ch2 = j.at("dec_ch2").get<int>();
    a.kernel = j.at("kernel").get<int>();
    a.m = j.at("m").get<int>();
    a.mode = mode_from_string(j.at("mode").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("architecture descriptor missing field: ") + e.what());
  }
  return a;
}

void save_checkpoint(const ModelParams& p, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open checkpoint file for writing: " + tmp);
    os.write(kMagic, 4);
    write_u32(os, kVersion);
    const std::string arch_json = arch_to_json_string(p.arch);
    write_u32(os, static_cast<std::uint32_t>(arch_json.size()));
    os.write(arch_json.data(), static_cast<std::streamsize>(arch_json.size()));
    write_u32(os, static_cast<std::uint32_t>(p.arch.m));
    write_u32(os, p.arch.mode == ModelMode::variational ? 0u : 1u);
    for (const Var& v : p.parameters()) {
      const Tensor& t = v.value();
      os.write(reinterpret_cast<const char*>(t.data()),
               static_cast<std::streamsize>(t.numel() * sizeof(float)));
    }
    if (!os) throw std::runtime_error("failed while writing checkpoint: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move checkpoint into place: " + path);
  }
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint file: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("bad checkpoint magic in " + path);
  }
  const std::uint32_t version = read_u32(is, "version");
  if (version != kVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version) +
                             " in " + path);
  }
  const std::uint32_t json_len = read_u32(is, "descriptor length");
  std::string arch_json(json_len, '\0');
  if (!is.read(arch_json.data(), json_len)) {
    throw std::runtime_error("checkpoint truncated while reading the architecture descriptor");
  }
  const Architecture arch = arch_from_json_string(arch_json);
  const std::uint32_t header_m = read_u32(is, "codeword size");
  const std::uint32_t header_mode = read_u32(is, "mode flag");
  if (header_mode > 1) {
    throw std::runtime_error("bad checkpoint mode flag " + std::to_string(header_mode));
  }
  const ModelMode mode = header_mode == 0 ? ModelMode::variational : ModelMode::point_estimate;
  if (static_cast<int>(header_m) != arch.m || mode != arch.mode) {
    throw std::runtime_error("checkpoint header (m=" + std::to_string(header_m) + ", mode=" +
                             to_string(mode) + ") is inconsistent with its descriptor (m=" +
                             std::to_string(arch.m) + ", mode=" + to_string(arch.mode) + ")");
  }
  std::vector<Tensor> tensors;
  for (const ParamSpec& spec : parameter_layout(arch)) {
    Tensor t(spec.shape);
    if (!is.read(reinterpret_cast<char*>(t.data()),
                 static_cast<std::streamsize>(t.numel() * sizeof(float)))) {
      throw std::runtime_error("checkpoint truncated while reading parameter " + spec.name);
    }
    tensors.push_back(std::move(t));
  }
  if (is.peek() != std::char_traits<char>::eof()) {
    throw std::runtime_error("checkpoint has trailing bytes after the last parameter: " + path);
  }
  return params_from_tensors(arch, std::move(tensors));
}

}  // namespace prvnet
