#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "monoforge/trainloop.hpp"

namespace monoforge {

enum class SweepVariable { LearningRate, DecayRate, BiasOffset, Epsilon, K, L1 };

std::string to_string(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string& name);

/// One row of the batch table. Fields left empty are the ones swept.
struct BatchSpec {
    std::string key;   // unique lookup key
    std::string name;  // batch label as printed in the table (may repeat)
    TaskKind task = TaskKind::Decoder;
    Activation activation = Activation::ReLU;
    FrequencyKind distribution = FrequencyKind::Uniform;
    std::size_t n_features = 0;
    std::size_t d = 0;
    std::optional<std::size_t> k;
    std::optional<double> eps;
    std::optional<double> lr;
    std::optional<double> decay;
    std::optional<double> bias_offset;
    std::optional<double> l1;
    std::vector<SweepVariable> variables;  // first entry is what `sweep --values` sets
    bool desk = false;
    std::size_t batch_size = 0;  // 0: 2^23 / k
    std::string notes;

    bool is_variable(SweepVariable v) const;
};

/// Table rows followed by their desk-scale variants (key suffix "-desk").
const std::vector<BatchSpec>& registry();

/// Throws ConfigError for unknown keys.
const BatchSpec& find_batch(std::string_view key);

/// Desk-scale counterpart: N=128, d=32, k/4, eps*2 (keeps N*eps/d), B=4096.
BatchSpec desk_variant(const BatchSpec& spec);

using VariableValues = std::map<SweepVariable, double>;

/// Config for one run of the batch with the primary variable set to `value`.
/// `extra` supplies secondary variables; every variable must end up set.
TrainConfig make_config(const BatchSpec& spec, double value, const VariableValues& extra = {});

/// CSV rendering of the full-scale rows, in table order. Used by the golden test.
std::string registry_table_csv();

}  // namespace monoforge
