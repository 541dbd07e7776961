#include "monoforge/registry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "monoforge/error.hpp"

namespace monoforge {

std::string to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::LearningRate: return "lr";
        case SweepVariable::DecayRate: return "decay";
        case SweepVariable::BiasOffset: return "bias_offset";
        case SweepVariable::Epsilon: return "eps";
        case SweepVariable::K: return "k";
        case SweepVariable::L1: return "l1";
    }
    return "?";
}

SweepVariable parse_sweep_variable(const std::string& name) {
    for (auto v : {SweepVariable::LearningRate, SweepVariable::DecayRate, SweepVariable::BiasOffset,
                   SweepVariable::Epsilon, SweepVariable::K, SweepVariable::L1}) {
        if (to_string(v) == name) return v;
    }
    throw ConfigError("unknown sweep variable '" + name + "'");
}

bool BatchSpec::is_variable(SweepVariable v) const {
    return std::find(variables.begin(), variables.end(), v) != variables.end();
}

namespace {

using V = SweepVariable;
constexpr auto Uni = FrequencyKind::Uniform;
constexpr auto Pow = FrequencyKind::PowerLaw;

struct Row {
    const char* key;
    const char* name;
    TaskKind task;
    Activation act;
    FrequencyKind dist;
    std::optional<std::size_t> k;
    std::optional<double> eps;
    std::optional<double> lr;
    std::optional<double> decay;
    std::optional<double> b0;
    std::optional<double> l1;
    std::vector<V> vars;
    const char* notes;
};

std::vector<BatchSpec> table_rows() {
    const auto D = TaskKind::Decoder;
    const auto R = TaskKind::ReProjector;
    const auto A = TaskKind::AbsValue;
    const auto relu = Activation::ReLU;
    const auto gelu = Activation::GeLU;
    const std::nullopt_t var = std::nullopt;
    const std::vector<Row> rows = {
        {"LR1", "LR1", D, relu, Uni, 1024, 1.0 / 64, var, 0.0, 0.0, 0.0, {V::LearningRate}, ""},
        {"LR2", "LR2", D, relu, Pow, 1024, 1.0 / 64, var, 0.0, 0.0, 0.0, {V::LearningRate},
         "power-law with mean 1/64 over N=512 gives a top frequency above 1; not trainable"},
        {"LR3", "LR3", D, relu, Uni, 1024, 1.0 / 64, var, 0.03, -1.0, 0.0, {V::LearningRate}, ""},
        {"B1", "B1", D, relu, Uni, 1024, 1.0 / 16, 0.003, 0.03, var, 0.0, {V::BiasOffset}, ""},
        {"B2", "B2", D, relu, Uni, 1024, 1.0 / 32, 0.003, 0.003, var, 0.0, {V::BiasOffset}, ""},
        {"B3", "B3", D, relu, Uni, 1024, 1.0 / 64, 0.003, 0.003, var, 0.0, {V::BiasOffset}, ""},
        {"B4", "B4", D, relu, Uni, 1024, 1.0 / 128, 0.003, 0.003, var, 0.0, {V::BiasOffset}, ""},
        {"B5", "B5", D, relu, Uni, 1024, 1.0 / 256, 0.003, 0.003, var, 0.0, {V::BiasOffset}, ""},
        {"LR4", "LR4", D, relu, Pow, 1024, 1.0 / 64, var, 0.03, -1.0, 0.0, {V::LearningRate},
         "power-law with mean 1/64 over N=512 gives a top frequency above 1; not trainable"},
        {"B3-GeLU", "B3", D, gelu, Uni, 1024, 1.0 / 64, var, 0.03, var, 0.0,
         {V::BiasOffset, V::LearningRate},
         "second row labelled B3 in the table; bias offset is swept at a fixed lr given separately"},
        {"E1", "E1", D, relu, Uni, 1024, var, 0.003, 0.03, -1.0, 0.0, {V::Epsilon}, ""},
        {"E2", "E2", D, relu, Uni, 1024, var, 0.003, 0.01, -1.0, 0.0, {V::Epsilon}, ""},
        {"E3", "E3", D, relu, Uni, 1024, var, 0.003, 0.003, -1.0, 0.0, {V::Epsilon}, ""},
        {"E4", "E4", D, relu, Uni, 1024, var, 0.003, 0.001, -1.0, 0.0, {V::Epsilon}, ""},
        {"K0", "K0", D, relu, Uni, var, 1.0 / 64, 0.007, 0.0, 0.0, 0.0, {V::K}, ""},
        {"K1", "K1", D, relu, Uni, var, 1.0 / 64, 0.007, 0.03, -1.0, 0.0, {V::K}, ""},
        {"K2", "K2", D, relu, Pow, var, 1.0 / 64, 0.007, 0.03, -1.0, 0.0, {V::K},
         "power-law with mean 1/64 over N=512 gives a top frequency above 1; not trainable"},
        {"RG1", "RG1", D, relu, Uni, 1024, 1.0 / 64, 0.005, 0.03, -1.0, var, {V::L1},
         "k missing from the table; 1024 assumed as in the other decoder batches"},
        {"RP1", "RP1", R, relu, Uni, 1024, 1.0 / 64, var, 0.03, -1.0, 0.0, {V::LearningRate},
         "k missing from the table; 1024 assumed as in the other decoder batches"},
        {"LR5", "LR5", A, relu, Uni, 2048, 1.0 / 64, var, 0.03, -1.0, 0.0, {V::LearningRate}, ""},
        {"D1", "D1", A, relu, Uni, 2048, 1.0 / 64, 0.007, var, -1.0, 0.0, {V::DecayRate}, ""},
    };
    std::vector<BatchSpec> out;
    for (const Row& r : rows) {
        BatchSpec s;
        s.key = r.key;
        s.name = r.name;
        s.task = r.task;
        s.activation = r.act;
        s.distribution = r.dist;
        s.n_features = 512;
        s.d = 64;
        s.k = r.k;
        s.eps = r.eps;
        s.lr = r.lr;
        s.decay = r.decay;
        s.bias_offset = r.b0;
        s.l1 = r.l1;
        s.variables = r.vars;
        s.notes = r.notes;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<BatchSpec> build_registry() {
    std::vector<BatchSpec> all = table_rows();
    const std::size_t n = all.size();
    for (std::size_t i = 0; i < n; ++i) {
        all.push_back(desk_variant(all[i]));
    }
    return all;
}

std::string fmt_opt(const std::optional<double>& v) {
    if (!v) return "Variable";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, *v);
    return std::string(buf, res.ptr);
}

std::string fmt_eps(const std::optional<double>& v) {
    if (!v) return "Variable";
    const double inv = 1.0 / *v;
    if (std::abs(inv - std::round(inv)) < 1e-9) {
        return "1/" + std::to_string(static_cast<long long>(std::llround(inv)));
    }
    return fmt_opt(v);
}

}  // namespace

BatchSpec desk_variant(const BatchSpec& spec) {
    BatchSpec s = spec;
    s.key = spec.key + "-desk";
    s.desk = true;
    s.n_features = 128;
    s.d = 32;
    if (s.k) s.k = *s.k / 4;
    if (s.eps) s.eps = *s.eps * 2.0;
    s.batch_size = 4096;
    return s;
}

const std::vector<BatchSpec>& registry() {
    static const std::vector<BatchSpec> all = build_registry();
    return all;
}

const BatchSpec& find_batch(std::string_view key) {
    for (const auto& s : registry()) {
        if (s.key == key) return s;
    }
    throw ConfigError("unknown batch '" + std::string(key) + "'");
}

TrainConfig make_config(const BatchSpec& spec, double value, const VariableValues& extra) {
    if (spec.variables.empty()) {
        throw ConfigError("batch " + spec.key + " has no variable");
    }
    VariableValues vals = extra;
    vals[spec.variables.front()] = value;
    for (const auto& [var, _] : vals) {
        if (!spec.is_variable(var)) {
            throw ConfigError("batch " + spec.key + " does not vary " + to_string(var));
        }
    }
    auto pick = [&](SweepVariable var, const std::optional<double>& fixed) {
        if (fixed) return *fixed;
        const auto it = vals.find(var);
        if (it == vals.end()) {
            throw ConfigError("batch " + spec.key + " needs a value for " + to_string(var));
        }
        return it->second;
    };

    TrainConfig cfg;
    cfg.task = spec.task;
    cfg.activation = spec.activation;
    cfg.n_features = spec.n_features;
    cfg.d = spec.d;
    cfg.features.kind = spec.distribution;
    cfg.features.eps = pick(SweepVariable::Epsilon, spec.eps);
    const double k = pick(SweepVariable::K,
                          spec.k ? std::optional<double>(static_cast<double>(*spec.k)) : std::nullopt);
    if (k < 1.0 || k != std::floor(k)) {
        throw ConfigError("k must be a positive integer");
    }
    cfg.k = static_cast<std::size_t>(k);
    cfg.lr = pick(SweepVariable::LearningRate, spec.lr);
    cfg.reg.bias_decay_rate = pick(SweepVariable::DecayRate, spec.decay);
    cfg.init.bias_offset = pick(SweepVariable::BiasOffset, spec.bias_offset);
    cfg.reg.l1_coeff = pick(SweepVariable::L1, spec.l1);
    cfg.batch_size = spec.batch_size;
    validate(cfg);
    return cfg;
}

std::string registry_table_csv() {
    std::ostringstream os;
    os << "batch,task,activation,distribution,N,d,k,eps,lr,decay,bias_offset,l1\n";
    for (const auto& s : registry()) {
        if (s.desk) continue;
        os << s.name << ',' << to_string(s.task) << ',' << to_string(s.activation) << ','
           << (s.distribution == FrequencyKind::Uniform ? "uniform" : "power_law") << ','
           << s.n_features << ',' << s.d << ','
           << (s.k ? std::to_string(*s.k) : std::string("Variable")) << ',' << fmt_eps(s.eps) << ','
           << fmt_opt(s.lr) << ',' << fmt_opt(s.decay) << ',' << fmt_opt(s.bias_offset) << ','
           << fmt_opt(s.l1) << '\n';
    }
    return os.str();
}

}  // namespace monoforge
