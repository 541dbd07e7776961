#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "monoforge/linalg.hpp"

namespace monoforge {

/// Moment buffers for LAMB, one entry per parameter tensor (flattened).
struct LambState {
    std::vector<Vector> m;
    std::vector<Vector> v;
    std::size_t step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_adam = 1e-6;

    /// Zeroed buffers for tensors of the given element counts.
    static LambState for_sizes(const std::vector<std::size_t>& sizes);
};

/// One LAMB update on every tensor. Per tensor: Adam direction with bias
/// correction, scaled by the trust ratio ||w|| / ||u|| (1 if either is zero).
/// Throws NonFiniteError if any gradient is NaN or infinite; nothing is modified then.
/// `weight_decay`, when non-empty, holds one coefficient per tensor that is added
/// to the update direction as decay * w before the trust ratio (LAMB-style decay).
void lamb_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, LambState& state, double lr,
               std::span<const double> weight_decay = {});

struct Schedule {
    double eta_max = 0.0;
    std::size_t t_max = 512;
};

/// eta_max * (1 + cos(pi * min(t, t_max) / t_max)) / 2.
double cosine_lr(const Schedule& s, std::size_t t);

/// Where the bias decay acts: a multiplicative shrink after the optimizer step
/// (Decoupled), or as a decay term inside the LAMB update (Lamb).
enum class BiasDecayMode { Decoupled, Lamb };

struct RegConfig {
    double bias_decay_rate = 0.0;         // lambda
    BiasDecayMode decay_mode = BiasDecayMode::Lamb;
    double decay_active_fraction = 0.5;
    double l1_coeff = 0.0;                // alpha
};

void validate(const RegConfig& reg);

/// (1 - lambda) * bias while t < fraction * total_steps, otherwise unchanged.
Vector apply_bias_decay(const Vector& bias, double lambda, std::size_t t,
                        std::size_t total_steps, double fraction);

bool bias_decay_active(std::size_t t, std::size_t total_steps, double fraction);

/// alpha * mean_rows(sum_i |h_i|) and its gradient alpha * sign(h) / B.
std::pair<double, Matrix> l1_penalty(const Matrix& hidden, double alpha);

/// floor(2^23 / k), at least 1.
std::size_t batch_size_for(std::size_t k);

}  // namespace monoforge
