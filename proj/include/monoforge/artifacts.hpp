#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "monoforge/config_io.hpp"
#include "monoforge/interp.hpp"

namespace monoforge {

// Poly maps larger than this (either side) are stored without the matrix.
inline constexpr std::size_t kPolyMapMatrixLimit = 256;

Json sfa_to_json(const SortedSFA& sfa, const MonoReport& report);
Json bias_profile_to_json(const ToyModel& m, const MonoReport& report);
Json amplitude_sweep_to_json(const AmplitudeSweep& s);
Json poly_map_to_json(const PolyLinearMap& map);
Json poly_diag_to_json(const PolyDiagnostics& diag);

/// Loads the run's checkpoint and writes sfa.json, bias_profile.json,
/// sweep_<i>.json for each requested feature, and, for decoder runs,
/// poly_map.json and poly_diag.json. Returns the written paths.
/// With no features given, every feature that has a monosemantic neuron is swept.
std::vector<std::filesystem::path> write_analysis(const std::filesystem::path& run_dir,
                                                  const std::vector<std::size_t>& features);

}  // namespace monoforge
