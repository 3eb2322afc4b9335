#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "osil/diff/mlp.hpp"

namespace osil {

inline constexpr int kCheckpointVersion = 1;

// Network architecture + flat parameter values. Doubles survive the JSON
// round trip exactly (nlohmann emits shortest-round-trip literals).
nlohmann::json mlp_to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

// File helpers shared by all checkpoint/config/log writers. Writes go
// through a temp file + rename so a crash never leaves a torn file.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

// Wraps a payload with {"version": ..., "kind": ...} and checks both on load.
nlohmann::json versioned(const std::string& kind, nlohmann::json payload);
nlohmann::json check_versioned(const std::string& kind, const nlohmann::json& j);

}  // namespace osil
