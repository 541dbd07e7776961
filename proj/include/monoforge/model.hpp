#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "monoforge/linalg.hpp"

namespace monoforge {

enum class Activation { ReLU, GeLU };

std::string to_string(Activation act);
Activation parse_activation(const std::string& name);

double activate(Activation act, double x);
double activate_derivative(Activation act, double x);

struct ModelDims {
    std::size_t input = 0;   // d
    std::size_t hidden = 0;  // k
    std::size_t output = 0;  // N or d
};

/// e = W1 x + b, h = act(e), y = W2 h.
struct ToyModel {
    Matrix w1;    // k x d
    Vector bias;  // k
    Matrix w2;    // out x k
    Activation activation = Activation::ReLU;
    // 1.0 where a connection exists, 0.0 where it is pruned.
    std::optional<Matrix> mask1;  // k x d
    std::optional<Matrix> mask2;  // out x k

    ModelDims dims() const;
    std::size_t n_neurons() const { return static_cast<std::size_t>(bias.size()); }
};

struct InitConfig {
    double bias_offset = 0.0;
    double bias_jitter = 0.01;
    double weight_scale_multiplier = 1.0;
    std::uint64_t seed = 0;
};

/// W1 = +-mult/sqrt(d), W2 = +-mult/sqrt(k), bias = U[-jitter, jitter] + offset.
ToyModel init_model(ModelDims dims, Activation act, const InitConfig& cfg);

struct ForwardTrace {
    Matrix inputs;          // B x d
    Matrix pre_activation;  // B x k
    Matrix hidden;          // B x k
    Matrix output;          // B x out
};

ForwardTrace forward(const ToyModel& m, const Matrix& inputs);

struct ParamGrads {
    Matrix w1;
    Vector bias;
    Matrix w2;
};

/// Gradients given dL/dy; `extra_hidden_grad` (B x k) is added to dL/dh, e.g.
/// from an activation penalty. Masked entries receive exactly zero.
ParamGrads backward(const ToyModel& m, const ForwardTrace& trace, const Matrix& grad_output,
                    const Matrix* extra_hidden_grad = nullptr);

/// Independent Bernoulli(density) connectivity for both layers.
std::pair<Matrix, Matrix> make_er_masks(ModelDims dims, double density, std::uint64_t seed);

/// Zeroes masked weights in place and attaches the masks.
void apply_masks(ToyModel& m, Matrix mask1, Matrix mask2);

/// Splits into (bias <= 0, bias > 0) neuron subsets. Outputs add up to the full model.
std::pair<ToyModel, ToyModel> split_by_bias_sign(const ToyModel& m);

/// Sub-model over the listed neurons, in the given order.
ToyModel select_neurons(const ToyModel& m, const std::vector<std::size_t>& neurons);

bool all_finite(const ToyModel& m);

}  // namespace monoforge
