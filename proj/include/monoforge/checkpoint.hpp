#pragma once

#include <filesystem>

#include "monoforge/trainloop.hpp"

namespace monoforge {

inline constexpr int kCheckpointVersion = 1;

/// Layout: one line of JSON header (format, version, step, config, dims,
/// activation, optimizer hyperparameters, RNG state, array manifest with byte
/// offsets into the payload), a newline, then the payload: little-endian f64
/// arrays in row-major order, in manifest order.
void checkpoint_save(const TrainerState& state, const std::filesystem::path& path);

/// Throws CheckpointError on truncation, manifest/length mismatch or an unknown version.
TrainerState checkpoint_load(const std::filesystem::path& path);

}  // namespace monoforge
