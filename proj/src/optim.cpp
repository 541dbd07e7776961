#include "monoforge/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "monoforge/error.hpp"

namespace monoforge {

LambState LambState::for_sizes(const std::vector<std::size_t>& sizes) {
    LambState s;
    for (const std::size_t n : sizes) {
        s.m.push_back(Vector::Zero(static_cast<Eigen::Index>(n)));
        s.v.push_back(Vector::Zero(static_cast<Eigen::Index>(n)));
    }
    return s;
}

void lamb_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, LambState& state, double lr,
               std::span<const double> weight_decay) {
    if (params.size() != grads.size() || params.size() != state.m.size() ||
        params.size() != state.v.size()) {
        throw DimensionError("lamb_step: tensor count mismatch");
    }
    if (!weight_decay.empty() && weight_decay.size() != params.size()) {
        throw DimensionError("lamb_step: one weight decay coefficient per tensor expected");
    }
    if (!(lr >= 0.0)) {
        throw std::invalid_argument("lamb_step: learning rate must be non-negative");
    }
    for (std::size_t t = 0; t < params.size(); ++t) {
        const auto n = static_cast<Eigen::Index>(params[t].size());
        if (grads[t].size() != params[t].size() || state.m[t].size() != n ||
            state.v[t].size() != n) {
            throw DimensionError("lamb_step: shape mismatch in tensor " + std::to_string(t));
        }
        for (const double g : grads[t]) {
            if (!std::isfinite(g)) {
                throw NonFiniteError("lamb_step: non-finite gradient in tensor " +
                                     std::to_string(t));
            }
        }
    }

    state.step_count += 1;
    const double step = static_cast<double>(state.step_count);
    const double correction1 = 1.0 - std::pow(state.beta1, step);
    const double correction2 = 1.0 - std::pow(state.beta2, step);

    for (std::size_t t = 0; t < params.size(); ++t) {
        Eigen::Map<Vector> w(params[t].data(), static_cast<Eigen::Index>(params[t].size()));
        Eigen::Map<const Vector> g(grads[t].data(), static_cast<Eigen::Index>(grads[t].size()));
        Vector& m = state.m[t];
        Vector& v = state.v[t];

        m = state.beta1 * m + (1.0 - state.beta1) * g;
        v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
        Vector update =
            (m / correction1).array() / ((v / correction2).array().sqrt() + state.eps_adam);
        if (!weight_decay.empty() && weight_decay[t] != 0.0) {
            update += weight_decay[t] * w;
        }

        const double w_norm = w.norm();
        const double u_norm = update.norm();
        const double trust = (w_norm > 0.0 && u_norm > 0.0) ? w_norm / u_norm : 1.0;
        w -= (lr * trust) * update;
    }
}

double cosine_lr(const Schedule& s, std::size_t t) {
    if (s.t_max == 0) {
        return s.eta_max;
    }
    const double progress =
        static_cast<double>(std::min(t, s.t_max)) / static_cast<double>(s.t_max);
    if (progress == 0.5) {
        return s.eta_max / 2.0;  // cos(pi/2) is not exactly zero in floating point
    }
    return s.eta_max * (1.0 + std::cos(std::numbers::pi * progress)) / 2.0;
}

void validate(const RegConfig& reg) {
    if (!(reg.bias_decay_rate >= 0.0 && reg.bias_decay_rate < 1.0)) {
        throw std::invalid_argument("bias decay rate must lie in [0, 1)");
    }
    if (!(reg.decay_active_fraction >= 0.0 && reg.decay_active_fraction <= 1.0)) {
        throw std::invalid_argument("decay active fraction must lie in [0, 1]");
    }
    if (!(reg.l1_coeff >= 0.0)) {
        throw std::invalid_argument("L1 coefficient must be non-negative");
    }
}

bool bias_decay_active(std::size_t t, std::size_t total_steps, double fraction) {
    return static_cast<double>(t) < fraction * static_cast<double>(total_steps);
}

Vector apply_bias_decay(const Vector& bias, double lambda, std::size_t t,
                        std::size_t total_steps, double fraction) {
    if (!(lambda >= 0.0 && lambda < 1.0)) {
        throw std::invalid_argument("bias decay rate must lie in [0, 1)");
    }
    if (lambda == 0.0 || !bias_decay_active(t, total_steps, fraction)) {
        return bias;
    }
    return (1.0 - lambda) * bias;
}

std::pair<double, Matrix> l1_penalty(const Matrix& hidden, double alpha) {
    if (!(alpha >= 0.0)) {
        throw std::invalid_argument("L1 coefficient must be non-negative");
    }
    if (alpha == 0.0 || hidden.rows() == 0) {
        return {0.0, Matrix::Zero(hidden.rows(), hidden.cols())};
    }
    const double rows = static_cast<double>(hidden.rows());
    const double value = alpha * hidden.cwiseAbs().sum() / rows;
    Matrix grad = hidden.unaryExpr([](double h) {
        return h > 0.0 ? 1.0 : (h < 0.0 ? -1.0 : 0.0);
    }) * (alpha / rows);
    return {value, std::move(grad)};
}

std::size_t batch_size_for(std::size_t k) {
    if (k == 0) {
        throw std::invalid_argument("batch_size_for: k must be positive");
    }
    return std::max<std::size_t>(1, (std::size_t{1} << 23) / k);
}

}  // namespace monoforge
