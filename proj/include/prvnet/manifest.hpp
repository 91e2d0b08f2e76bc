#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prvnet {

inline const std::string kToolVersion = "prvnet 1.0.0";

// Record of one tool run, written atomically at run end. command plus
// config_text plus the dataset file identified by dataset_hash are enough to
// re-execute the run and reproduce its reports byte for byte.
struct RunManifest {
  std::string command;
  std::string tool_version = kToolVersion;
  std::string status = "complete";  // complete | incomplete
  std::string config_text;          // resolved configuration snapshot
  std::string dataset_path;
  std::string dataset_hash;         // fnv1a-64 hex of the dataset file
  std::map<std::string, std::string> inputs;     // label -> path (e.g. checkpoint)
  std::map<std::string, std::string> artifacts;  // label -> path
  std::optional<double> beta_star;  // annealed training runs only
  std::vector<std::string> failures;  // per-arm errors from sweeps
  double wall_seconds = 0.0;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

// Writes to a temp file in the same directory, then renames into place.
void save_manifest(const std::string& path, const RunManifest& m);
RunManifest load_manifest(const std::string& path);

}  // namespace prvnet
