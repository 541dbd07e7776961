#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "monoforge/trainloop.hpp"

namespace monoforge {

using Json = nlohmann::json;

/// TrainConfig <-> JSON with keys named after the struct fields. Parsing rejects
/// unknown keys and fills missing ones from the defaults.
Json config_to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const Json& j);

TrainConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const TrainConfig& cfg);

/// 16 hex digits of FNV-1a over the canonical JSON dump.
std::string config_hash(const TrainConfig& cfg);

/// One trace.jsonl line. Keys: step, lr, loss, mono_fraction, mono_count,
/// mono_per_feature, mean_bias, wall_ms.
Json trace_to_json(const TraceRecord& rec);
TraceRecord trace_from_json(const Json& j);
std::vector<TraceRecord> read_trace(const std::filesystem::path& path);

/// Writes text to `path` through a temporary file and rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace monoforge
