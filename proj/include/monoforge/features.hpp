#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "monoforge/linalg.hpp"
#include "monoforge/rng.hpp"

namespace monoforge {

enum class FrequencyKind { Uniform, PowerLaw };

/// Per-feature activation probabilities eps_i.
struct FeatureModel {
    std::size_t n_features = 0;
    std::vector<double> frequencies;
    FrequencyKind kind = FrequencyKind::Uniform;
    double exponent = 0.0;  // PowerLaw only
    double mean_eps = 0.0;

    double expected_active() const;
};

FeatureModel make_uniform(std::size_t n, double eps);

/// eps_i = c * i^-exponent (1-based i) with c fixed so that mean(eps) == mean_eps.
/// Throws std::invalid_argument if the normalization pushes eps_1 above 1.
FeatureModel make_power_law(std::size_t n, double exponent, double mean_eps);

/// Fixed d x N projection with entries +-1/sqrt(d).
struct Projection {
    Matrix matrix;
    std::uint64_t seed = 0;

    std::size_t rows() const { return static_cast<std::size_t>(matrix.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(matrix.cols()); }
};

Projection make_projection(std::size_t n, std::size_t d, std::uint64_t seed);

struct FeatureBatch {
    Matrix features;  // B x N, rows are feature vectors
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> active_mask;
};

/// Each coordinate is zero with probability 1 - eps_i, otherwise uniform on (0, 1).
FeatureBatch sample_features(const FeatureModel& fm, std::size_t batch, Rng& rng);

}  // namespace monoforge
