#include "monoforge/features.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "monoforge/error.hpp"

namespace monoforge {

double FeatureModel::expected_active() const {
    return std::accumulate(frequencies.begin(), frequencies.end(), 0.0);
}

FeatureModel make_uniform(std::size_t n, double eps) {
    if (n == 0) {
        throw std::invalid_argument("feature count must be positive");
    }
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw std::invalid_argument("uniform frequency must lie in [0, 1]");
    }
    FeatureModel fm;
    fm.n_features = n;
    fm.frequencies.assign(n, eps);
    fm.kind = FrequencyKind::Uniform;
    fm.mean_eps = eps;
    return fm;
}

FeatureModel make_power_law(std::size_t n, double exponent, double mean_eps) {
    if (n == 0) {
        throw std::invalid_argument("feature count must be positive");
    }
    if (!(exponent > 0.0)) {
        throw std::invalid_argument("power-law exponent must be positive");
    }
    if (!(mean_eps > 0.0 && mean_eps <= 1.0)) {
        throw std::invalid_argument("power-law mean frequency must lie in (0, 1]");
    }
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        raw[i] = std::pow(static_cast<double>(i + 1), -exponent);
    }
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    const double scale = mean_eps * static_cast<double>(n) / total;
    if (scale * raw[0] > 1.0) {
        throw std::invalid_argument("power-law normalization gives eps_1 = " +
                                    std::to_string(scale * raw[0]) + " > 1");
    }
    FeatureModel fm;
    fm.n_features = n;
    fm.frequencies.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        fm.frequencies[i] = scale * raw[i];
    }
    fm.kind = FrequencyKind::PowerLaw;
    fm.exponent = exponent;
    fm.mean_eps = mean_eps;
    return fm;
}

Projection make_projection(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (d == 0 || d > n) {
        throw DimensionError("projection needs 1 <= d <= n (d=" + std::to_string(d) +
                             ", n=" + std::to_string(n) + ")");
    }
    Rng rng(seed);
    const double magnitude = 1.0 / std::sqrt(static_cast<double>(d));
    Projection p;
    p.seed = seed;
    p.matrix.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
    for (Eigen::Index r = 0; r < p.matrix.rows(); ++r) {
        for (Eigen::Index c = 0; c < p.matrix.cols(); ++c) {
            p.matrix(r, c) = rng.sign() * magnitude;
        }
    }
    return p;
}

FeatureBatch sample_features(const FeatureModel& fm, std::size_t batch, Rng& rng) {
    if (batch == 0) {
        throw std::invalid_argument("batch size must be at least 1");
    }
    const auto rows = static_cast<Eigen::Index>(batch);
    const auto cols = static_cast<Eigen::Index>(fm.n_features);
    FeatureBatch out;
    out.features = Matrix::Zero(rows, cols);
    out.active_mask.setConstant(rows, cols, false);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            if (rng.bernoulli(fm.frequencies[static_cast<std::size_t>(c)])) {
                out.features(r, c) = rng.uniform();
                out.active_mask(r, c) = true;
            }
        }
    }
    return out;
}

}  // namespace monoforge
