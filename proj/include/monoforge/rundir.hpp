#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "monoforge/config_io.hpp"
#include "monoforge/monosem.hpp"
#include "monoforge/trainloop.hpp"

namespace monoforge {

// File names inside a run directory.
inline constexpr const char* kConfigFile = "config.json";
inline constexpr const char* kTraceFile = "trace.jsonl";
inline constexpr const char* kCheckpointFile = "checkpoint.bin";
inline constexpr const char* kMonoReportFile = "mono_report.json";
inline constexpr const char* kStatusFile = "status.json";

struct RunStatus {
    std::string status;  // "done" or "diverged"
    std::string message;
    std::size_t steps = 0;
};

struct RunResult {
    std::filesystem::path dir;
    TrainConfig config;
    RunStatus status;
    std::optional<TraceRecord> final_record;
    bool reused = false;  // an identical finished run was already on disk
};

/// N=128, d=32, k/4, eps*2 and B=4096 applied to an existing config.
TrainConfig desk_scaled(const TrainConfig& cfg);

/// Trains into `dir` and writes config, trace, checkpoint, mono report and status.
/// A directory that already holds a finished run of the same config is reused.
RunResult execute_run(const TrainConfig& cfg, const std::filesystem::path& dir);

/// Directory name for a config under a sweep or output root.
std::string run_dir_name(const TrainConfig& cfg);

Json mono_report_to_json(const MonoReport& report);
RunStatus read_status(const std::filesystem::path& dir);

}  // namespace monoforge
