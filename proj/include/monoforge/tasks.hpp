#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "monoforge/features.hpp"

namespace monoforge {

enum class TaskKind { Decoder, ReProjector, AbsValue };

std::string to_string(TaskKind kind);
TaskKind parse_task_kind(const std::string& name);

/// A task with its fixed projections. `q` is present exactly for ReProjector.
struct TaskInstance {
    TaskKind kind = TaskKind::Decoder;
    Projection p;
    std::optional<Projection> q;

    std::size_t n_features() const { return p.cols(); }
    std::size_t input_dim() const { return p.rows(); }
    std::size_t output_dim() const;
};

/// Builds P (and Q for the re-projector) from independent streams of `seed`.
TaskInstance make_task(TaskKind kind, std::size_t n, std::size_t d, std::uint64_t seed);

/// Validates the kind/q pairing and projection shapes; throws DimensionError.
void validate_task(const TaskInstance& task);

struct SampleBatch {
    Matrix inputs;         // B x d
    Matrix targets;        // B x output_dim
    Matrix raw_features;   // B x N (f1 - f2 for AbsValue)
};

SampleBatch make_batch(const TaskInstance& task, const FeatureModel& fm, std::size_t batch,
                       Rng& rng);

/// Mean over rows of the squared Euclidean error.
double loss(const TaskInstance& task, const Matrix& targets, const Matrix& outputs);

/// d loss / d outputs = 2 (outputs - targets) / B.
Matrix loss_grad(const TaskInstance& task, const Matrix& targets, const Matrix& outputs);

}  // namespace monoforge
