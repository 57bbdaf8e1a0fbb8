#pragma once

#include <memory>
#include <string>

#include "epaae/model.hpp"

namespace epaae {

// Binary model file: magic "EPAAE1\0", a length-prefixed UTF-8 JSON header
// carrying config + vocab, then one record per named tensor
// (u64 name length, name bytes, u64 rank, u64 dims, raw float32 values),
// everything little-endian. Reading stops at end of file.
void save_checkpoint(const Model& model, const std::string& path);
std::unique_ptr<Model> load_checkpoint(const std::string& path);

std::string config_to_json(const ModelConfig& config);
ModelConfig config_from_json(const std::string& json_text);

}  // namespace epaae
