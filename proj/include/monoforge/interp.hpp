#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "monoforge/linalg.hpp"
#include "monoforge/model.hpp"
#include "monoforge/monosem.hpp"
#include "monoforge/tasks.hpp"

namespace monoforge {

inline constexpr std::size_t kDefaultAmplitudeGrid = 101;
inline constexpr double kDefaultKinkTolerance = 0.05;
inline constexpr double kPolyBiasProxy = 0.05;
inline constexpr std::size_t kDefaultDriftWindow = 10;

/// Single-feature activations with neurons ordered by descending r and features
/// grouped by their most-activating neuron.
struct SortedSFA {
    Matrix matrix;  // matrix(i, j) = raw(neuron_order[i], feature_order[j])
    std::vector<std::size_t> neuron_order;
    std::vector<std::size_t> feature_order;
};

SortedSFA sort_sfa(const ActivationMatrix& a, const MonoReport& report);

/// Stable order of neurons by descending r.
std::vector<std::size_t> neuron_order_by_r(const MonoReport& report);

std::vector<double> bias_profile(const ToyModel& m, const MonoReport& report);

std::size_t count_polysemantic_by_bias(const ToyModel& m, double threshold = kPolyBiasProxy);

struct AmplitudeSweep {
    std::size_t feature_index = 0;
    std::vector<double> amplitudes;
    std::vector<double> y_full;
    std::vector<double> y_mono;
    std::vector<double> y_poly;
    std::vector<double> kinks;       // breakpoints of y_full
    std::vector<double> mono_kinks;  // breakpoints of y_mono
};

/// Output coordinate `feature` for inputs P (a e_feature), a on a uniform grid
/// over [0, 1], for the full model and its bias-sign split. Decoder only.
AmplitudeSweep amplitude_sweep(const ToyModel& m, const TaskInstance& task, std::size_t feature,
                               std::size_t grid = kDefaultAmplitudeGrid,
                               double kink_tol = kDefaultKinkTolerance);

/// Breakpoints of a sampled piecewise-linear curve: positions where the second
/// difference exceeds tol * h * max|slope|; runs of detections merge at their peak.
std::vector<double> detect_kinks(std::span<const double> xs, std::span<const double> ys,
                                 double tol = kDefaultKinkTolerance);

/// First grid amplitude at which ys exceeds `threshold`; 2.0 if it never does.
double onset_amplitude(std::span<const double> xs, std::span<const double> ys,
                       double threshold = 1e-9);

struct PolyLinearMap {
    Matrix matrix;  // out x N
    std::vector<double> singular_values;  // descending
    std::size_t n_positive = 0;
};

/// W2[:, pos] W1[pos, :] P over positive-bias neurons. Decoder only.
PolyLinearMap poly_linear_map(const ToyModel& m, const TaskInstance& task);

/// Singular values of an arbitrary matrix, descending.
std::vector<double> singular_values(const Matrix& a);

struct PolyDiagnostics {
    std::vector<double> intercept;
    std::vector<double> slope;
    std::vector<double> slope_drift;
    Vector bias_inner;            // W2[:, pos] * relu(b[pos]), one entry per output
    double bias_projection = 0.0;  // max |bias_inner|
};

PolyDiagnostics poly_diagnostics(const ToyModel& m, const TaskInstance& task,
                                 std::size_t grid = kDefaultAmplitudeGrid,
                                 std::size_t window = kDefaultDriftWindow);

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

std::vector<double> uniform_grid(std::size_t points);

}  // namespace monoforge
