#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "monoforge/linalg.hpp"
#include "monoforge/model.hpp"
#include "monoforge/tasks.hpp"

namespace monoforge {

inline constexpr double kDefaultDelta = 1e-10;
inline constexpr double kMonoThreshold = 0.999;
inline constexpr double kMostlyMonoThreshold = 0.9;

enum class ProbeKind { Standard, SignedPair };

/// Entry (i, j) is neuron i's activation on the unit-strength probe of feature j.
/// SignedPair entries hold h_i(F_j) + h_i(-F_j).
struct ActivationMatrix {
    Matrix values;  // k x N
    ProbeKind probe_kind = ProbeKind::Standard;
};

ActivationMatrix probe_activations(const ToyModel& m, const TaskInstance& task);

/// Same probe with an explicit kind, regardless of task.
ActivationMatrix probe_activations(const ToyModel& m, const Projection& p, ProbeKind kind);

struct MonoReport {
    std::vector<double> r;
    std::vector<bool> is_mono;      // r > 0.999
    std::vector<bool> mostly_mono;  // 0.9 < r <= 0.999
    std::vector<std::size_t> argmax_feature;
    std::size_t n_features = 0;
    std::size_t features_covered = 0;  // features with >= 1 monosemantic neuron
    double delta = kDefaultDelta;

    std::size_t n_neurons() const { return r.size(); }
    std::size_t mono_count() const;
    double mono_fraction() const;
    double mono_per_feature() const;
};

/// r_i = max_j a(i,j) / (delta + sum_j max(0, a(i,j))).
MonoReport compute_r(const ActivationMatrix& a, double delta = kDefaultDelta);

/// Fraction of neurons with r strictly below each threshold.
std::vector<double> cdf_of_r(const MonoReport& report, std::span<const double> thresholds);

/// Monosemantic-neuron count per feature (by argmax feature).
std::vector<std::size_t> neurons_per_feature(const MonoReport& report, std::size_t n_features);

}  // namespace monoforge
