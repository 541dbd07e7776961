#include "monoforge/model.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "monoforge/error.hpp"
#include "monoforge/rng.hpp"

namespace monoforge {

namespace {

constexpr std::uint64_t kStreamW1 = 21;
constexpr std::uint64_t kStreamW2 = 22;
constexpr std::uint64_t kStreamBias = 23;
constexpr std::uint64_t kStreamMask1 = 24;
constexpr std::uint64_t kStreamMask2 = 25;

Matrix random_sign_matrix(Eigen::Index rows, Eigen::Index cols, double magnitude,
                          std::uint64_t seed) {
    Rng rng(seed);
    Matrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            out(r, c) = rng.sign() * magnitude;
        }
    }
    return out;
}

Matrix bernoulli_matrix(Eigen::Index rows, Eigen::Index cols, double p, std::uint64_t seed) {
    Rng rng(seed);
    Matrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            out(r, c) = rng.bernoulli(p) ? 1.0 : 0.0;
        }
    }
    return out;
}

}  // namespace

std::string to_string(Activation act) {
    return act == Activation::ReLU ? "relu" : "gelu";
}

Activation parse_activation(const std::string& name) {
    if (name == "relu") return Activation::ReLU;
    if (name == "gelu") return Activation::GeLU;
    throw ConfigError("unknown activation '" + name + "'");
}

double activate(Activation act, double x) {
    if (act == Activation::ReLU) {
        return x > 0.0 ? x : 0.0;
    }
    return 0.5 * x * std::erfc(-x / std::numbers::sqrt2);
}

double activate_derivative(Activation act, double x) {
    if (act == Activation::ReLU) {
        return x > 0.0 ? 1.0 : 0.0;
    }
    const double cdf = 0.5 * std::erfc(-x / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
    return cdf + x * pdf;
}

ModelDims ToyModel::dims() const {
    return {static_cast<std::size_t>(w1.cols()), static_cast<std::size_t>(w1.rows()),
            static_cast<std::size_t>(w2.rows())};
}

ToyModel init_model(ModelDims dims, Activation act, const InitConfig& cfg) {
    if (dims.input == 0 || dims.hidden == 0 || dims.output == 0) {
        throw DimensionError("model dimensions must be positive");
    }
    if (!(cfg.bias_jitter >= 0.0)) {
        throw std::invalid_argument("bias_jitter must be non-negative");
    }
    const auto d = static_cast<Eigen::Index>(dims.input);
    const auto k = static_cast<Eigen::Index>(dims.hidden);
    const auto out = static_cast<Eigen::Index>(dims.output);

    ToyModel m;
    m.activation = act;
    m.w1 = random_sign_matrix(k, d, cfg.weight_scale_multiplier / std::sqrt(double(d)),
                              derive_seed(cfg.seed, kStreamW1));
    m.w2 = random_sign_matrix(out, k, cfg.weight_scale_multiplier / std::sqrt(double(k)),
                              derive_seed(cfg.seed, kStreamW2));
    Rng rng(derive_seed(cfg.seed, kStreamBias));
    m.bias.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        m.bias(i) = cfg.bias_offset + cfg.bias_jitter * (2.0 * rng.uniform() - 1.0);
    }
    return m;
}

ForwardTrace forward(const ToyModel& m, const Matrix& inputs) {
    if (inputs.cols() != m.w1.cols()) {
        throw DimensionError("forward: input width " + std::to_string(inputs.cols()) +
                             " != model input dim " + std::to_string(m.w1.cols()));
    }
    ForwardTrace t;
    t.inputs = inputs;
    t.pre_activation.noalias() = inputs * m.w1.transpose();
    t.pre_activation.rowwise() += m.bias.transpose();
    if (m.activation == Activation::ReLU) {
        t.hidden = t.pre_activation.cwiseMax(0.0);
    } else {
        t.hidden = t.pre_activation.unaryExpr([](double x) { return activate(Activation::GeLU, x); });
    }
    t.output.noalias() = t.hidden * m.w2.transpose();
    return t;
}

ParamGrads backward(const ToyModel& m, const ForwardTrace& trace, const Matrix& grad_output,
                    const Matrix* extra_hidden_grad) {
    if (grad_output.rows() != trace.hidden.rows() || grad_output.cols() != m.w2.rows()) {
        throw DimensionError("backward: grad_output shape does not match trace");
    }
    if (trace.pre_activation.cols() != m.w1.rows() || trace.inputs.cols() != m.w1.cols()) {
        throw DimensionError("backward: trace does not match model");
    }
    ParamGrads g;
    g.w2.noalias() = grad_output.transpose() * trace.hidden;

    Matrix grad_pre;
    grad_pre.noalias() = grad_output * m.w2;
    if (extra_hidden_grad != nullptr) {
        if (extra_hidden_grad->rows() != grad_pre.rows() ||
            extra_hidden_grad->cols() != grad_pre.cols()) {
            throw DimensionError("backward: hidden gradient shape mismatch");
        }
        grad_pre += *extra_hidden_grad;
    }
    if (m.activation == Activation::ReLU) {
        grad_pre = (trace.pre_activation.array() > 0.0).select(grad_pre, 0.0);
    } else {
        grad_pre.array() *= trace.pre_activation.unaryExpr(
            [](double x) { return activate_derivative(Activation::GeLU, x); }).array();
    }

    g.w1.noalias() = grad_pre.transpose() * trace.inputs;
    g.bias = grad_pre.colwise().sum().transpose();

    if (m.mask1) {
        g.w1.array() *= m.mask1->array();
    }
    if (m.mask2) {
        g.w2.array() *= m.mask2->array();
    }
    return g;
}

std::pair<Matrix, Matrix> make_er_masks(ModelDims dims, double density, std::uint64_t seed) {
    if (!(density > 0.0 && density <= 1.0)) {
        throw std::invalid_argument("connection density must lie in (0, 1]");
    }
    const auto d = static_cast<Eigen::Index>(dims.input);
    const auto k = static_cast<Eigen::Index>(dims.hidden);
    const auto out = static_cast<Eigen::Index>(dims.output);
    return {bernoulli_matrix(k, d, density, derive_seed(seed, kStreamMask1)),
            bernoulli_matrix(out, k, density, derive_seed(seed, kStreamMask2))};
}

void apply_masks(ToyModel& m, Matrix mask1, Matrix mask2) {
    if (mask1.rows() != m.w1.rows() || mask1.cols() != m.w1.cols() ||
        mask2.rows() != m.w2.rows() || mask2.cols() != m.w2.cols()) {
        throw DimensionError("mask shapes do not match model");
    }
    m.w1.array() *= mask1.array();
    m.w2.array() *= mask2.array();
    m.mask1 = std::move(mask1);
    m.mask2 = std::move(mask2);
}

ToyModel select_neurons(const ToyModel& m, const std::vector<std::size_t>& neurons) {
    const auto n = static_cast<Eigen::Index>(neurons.size());
    ToyModel sub;
    sub.activation = m.activation;
    sub.w1.resize(n, m.w1.cols());
    sub.bias.resize(n);
    sub.w2.resize(m.w2.rows(), n);
    if (m.mask1) sub.mask1 = Matrix(n, m.w1.cols());
    if (m.mask2) sub.mask2 = Matrix(m.w2.rows(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto src = static_cast<Eigen::Index>(neurons[static_cast<std::size_t>(i)]);
        if (src >= m.bias.size()) {
            throw DimensionError("neuron index out of range");
        }
        sub.w1.row(i) = m.w1.row(src);
        sub.bias(i) = m.bias(src);
        sub.w2.col(i) = m.w2.col(src);
        if (m.mask1) sub.mask1->row(i) = m.mask1->row(src);
        if (m.mask2) sub.mask2->col(i) = m.mask2->col(src);
    }
    return sub;
}

std::pair<ToyModel, ToyModel> split_by_bias_sign(const ToyModel& m) {
    std::vector<std::size_t> negative;
    std::vector<std::size_t> positive;
    for (Eigen::Index i = 0; i < m.bias.size(); ++i) {
        (m.bias(i) > 0.0 ? positive : negative).push_back(static_cast<std::size_t>(i));
    }
    return {select_neurons(m, negative), select_neurons(m, positive)};
}

bool all_finite(const ToyModel& m) {
    return m.w1.allFinite() && m.bias.allFinite() && m.w2.allFinite();
}

}  // namespace monoforge
