#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "monoforge/registry.hpp"
#include "monoforge/rundir.hpp"

namespace monoforge {

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kSummaryFile = "summary.csv";

struct SweepOptions {
    std::filesystem::path root;
    std::size_t parallelism = 1;
    std::uint64_t seed = 0;
    VariableValues extra;                    // secondary variables, e.g. lr for B3-GeLU
    std::optional<std::size_t> total_steps;  // overrides the batch default
    std::function<void(const std::string&)> log;
};

struct SweepEntry {
    std::size_t index = 0;
    double value = 0.0;
    std::uint64_t seed = 0;
    std::string run;     // directory name under root
    std::string status;  // pending, running, done, diverged, failed
    std::string message;
};

/// Parallelism after applying the MONOFORGE_THREADS cap (at least 1).
std::size_t effective_parallelism(std::size_t requested);

/// One independent run per value; seed of run i is options.seed ^ i. The
/// manifest lists every value with its final status. A failing run does not
/// stop the others.
std::vector<SweepEntry> run_sweep(const BatchSpec& spec, const std::vector<double>& values,
                                  const SweepOptions& options);

std::vector<SweepEntry> read_manifest(const std::filesystem::path& sweep_dir);

struct SummaryRow {
    std::string run;
    double variable_value = 0.0;
    double final_loss = 0.0;
    double mono_fraction = 0.0;
    double mono_per_feature = 0.0;
    double mean_bias = 0.0;
    std::size_t poly_count = 0;
};

/// Final trace record and positive-bias count of each finished run.
std::vector<SummaryRow> summarize_sweep(const std::filesystem::path& sweep_dir);

/// Writes summary.csv into the sweep directory and returns its path.
std::filesystem::path write_summary_csv(const std::filesystem::path& sweep_dir);

}  // namespace monoforge
