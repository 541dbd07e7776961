#include "monoforge/tasks.hpp"

#include "monoforge/error.hpp"

namespace monoforge {

namespace {

constexpr std::uint64_t kStreamP = 11;
constexpr std::uint64_t kStreamQ = 12;

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(what) + ": shape mismatch (" +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()) + ")");
    }
}

}  // namespace

std::string to_string(TaskKind kind) {
    switch (kind) {
    case TaskKind::Decoder: return "decoder";
    case TaskKind::ReProjector: return "reprojector";
    case TaskKind::AbsValue: return "abs";
    }
    return "unknown";
}

TaskKind parse_task_kind(const std::string& name) {
    if (name == "decoder") return TaskKind::Decoder;
    if (name == "reprojector") return TaskKind::ReProjector;
    if (name == "abs") return TaskKind::AbsValue;
    throw ConfigError("unknown task kind '" + name + "'");
}

std::size_t TaskInstance::output_dim() const {
    return kind == TaskKind::ReProjector ? input_dim() : n_features();
}

TaskInstance make_task(TaskKind kind, std::size_t n, std::size_t d, std::uint64_t seed) {
    TaskInstance task;
    task.kind = kind;
    task.p = make_projection(n, d, derive_seed(seed, kStreamP));
    if (kind == TaskKind::ReProjector) {
        task.q = make_projection(n, d, derive_seed(seed, kStreamQ));
    }
    return task;
}

void validate_task(const TaskInstance& task) {
    if (task.q.has_value() != (task.kind == TaskKind::ReProjector)) {
        throw DimensionError("second projection must be present exactly for the re-projector");
    }
    if (task.q && (task.q->rows() != task.p.rows() || task.q->cols() != task.p.cols())) {
        throw DimensionError("re-projector projections differ in shape");
    }
}

SampleBatch make_batch(const TaskInstance& task, const FeatureModel& fm, std::size_t batch,
                       Rng& rng) {
    validate_task(task);
    if (fm.n_features != task.n_features()) {
        throw DimensionError("feature model has " + std::to_string(fm.n_features) +
                             " features, task expects " + std::to_string(task.n_features()));
    }
    SampleBatch out;
    switch (task.kind) {
    case TaskKind::Decoder: {
        out.raw_features = sample_features(fm, batch, rng).features;
        out.targets = out.raw_features;
        break;
    }
    case TaskKind::ReProjector: {
        out.raw_features = sample_features(fm, batch, rng).features;
        out.targets.noalias() = out.raw_features * task.q->matrix.transpose();
        break;
    }
    case TaskKind::AbsValue: {
        const Matrix first = sample_features(fm, batch, rng).features;
        const Matrix second = sample_features(fm, batch, rng).features;
        out.raw_features = first - second;
        out.targets = out.raw_features.cwiseAbs();
        break;
    }
    }
    out.inputs.noalias() = out.raw_features * task.p.matrix.transpose();
    return out;
}

double loss(const TaskInstance& /*task*/, const Matrix& targets, const Matrix& outputs) {
    require_same_shape(targets, outputs, "loss");
    if (targets.rows() == 0) {
        return 0.0;
    }
    return (outputs - targets).squaredNorm() / static_cast<double>(targets.rows());
}

Matrix loss_grad(const TaskInstance& /*task*/, const Matrix& targets, const Matrix& outputs) {
    require_same_shape(targets, outputs, "loss_grad");
    if (targets.rows() == 0) {
        return Matrix::Zero(targets.rows(), targets.cols());
    }
    return (2.0 / static_cast<double>(targets.rows())) * (outputs - targets);
}

}  // namespace monoforge
