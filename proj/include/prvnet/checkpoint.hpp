#pragma once

#include "prvnet/model.hpp"

#include <string>

namespace prvnet {

// Binary model checkpoint (.prvw), little-endian:
//   "PRVW" | u32 version=1 | u32 json_len | json_len bytes (architecture
//   descriptor) | u32 m | u32 mode (0 variational, 1 point-estimate) |
//   parameter tensors as raw f32 in canonical layout order
// m and mode are duplicated outside the JSON blob so a reader can check the
// codeword contract without parsing JSON; load rejects files where the two
// disagree. Writes go to a temp file first and rename into place.
void save_checkpoint(const ModelParams& p, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

std::string arch_to_json_string(const Architecture& a);
Architecture arch_from_json_string(const std::string& s);

}  // namespace prvnet
