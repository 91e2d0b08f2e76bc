#include "prvnet/manifest.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prvnet {

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["tool_version"] = m.tool_version;
  j["status"] = m.status;
  j["config"] = m.config_text;
  j["dataset_path"] = m.dataset_path;
  j["dataset_hash"] = m.dataset_hash;
  j["inputs"] = m.inputs;
  j["artifacts"] = m.artifacts;
  if (m.beta_star.has_value())
    j["beta_star"] = *m.beta_star;
  else
    j["beta_star"] = nullptr;
  j["failures"] = m.failures;
  j["wall_seconds"] = m.wall_seconds;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("manifest is not valid JSON: ") + e.what());
  }
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.status = j.at("status").get<std::string>();
    m.config_text = j.at("config").get<std::string>();
    m.dataset_path = j.at("dataset_path").get<std::string>();
    m.dataset_hash = j.at("dataset_hash").get<std::string>();
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
    if (!j.at("beta_star").is_null()) m.beta_star = j.at("beta_star").get<double>();
    m.failures = j.at("failures").get<std::vector<std::string>>();
    m.wall_seconds = j.at("wall_seconds").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("manifest field missing or mistyped: ") + e.what());
  }
  return m;
}

void save_manifest(const std::string& path, const RunManifest& m) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open manifest for writing: " + tmp);
    const std::string body = manifest_to_json(m);
    os.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!os) throw std::runtime_error("failed while writing manifest: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot move manifest into place: " + path);
  }
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open manifest: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return manifest_from_json(ss.str());
}

}  // namespace prvnet
