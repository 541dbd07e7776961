#include "monoforge/config_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "monoforge/error.hpp"

namespace monoforge {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError(where + " must be a JSON object");
    }
    for (const auto& item : j.items()) {
        if (allowed.count(item.key()) == 0) {
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

template <typename T>
void read_if(const Json& j, const char* key, T& out) {
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

std::string dist_name(FrequencyKind kind) {
    return kind == FrequencyKind::Uniform ? "uniform" : "power_law";
}

FrequencyKind parse_dist(const std::string& name) {
    if (name == "uniform") return FrequencyKind::Uniform;
    if (name == "power_law") return FrequencyKind::PowerLaw;
    throw ConfigError("unknown feature distribution '" + name + "'");
}

std::string decay_mode_name(BiasDecayMode mode) {
    return mode == BiasDecayMode::Decoupled ? "decoupled" : "lamb";
}

BiasDecayMode parse_decay_mode(const std::string& name) {
    if (name == "decoupled") return BiasDecayMode::Decoupled;
    if (name == "lamb") return BiasDecayMode::Lamb;
    throw ConfigError("unknown decay_mode '" + name + "'");
}

}  // namespace

Json config_to_json(const TrainConfig& cfg) {
    Json j;
    j["task"] = to_string(cfg.task);
    j["n_features"] = cfg.n_features;
    j["d"] = cfg.d;
    j["k"] = cfg.k;
    j["features"] = {{"kind", dist_name(cfg.features.kind)},
                     {"eps", cfg.features.eps},
                     {"exponent", cfg.features.exponent}};
    j["activation"] = to_string(cfg.activation);
    j["lr"] = cfg.lr;
    j["total_steps"] = cfg.total_steps;
    j["schedule_t_max"] = cfg.schedule_t_max;
    j["batch_size"] = cfg.batch_size;
    j["init"] = {{"bias_offset", cfg.init.bias_offset},
                 {"bias_jitter", cfg.init.bias_jitter},
                 {"weight_scale_multiplier", cfg.init.weight_scale_multiplier},
                 {"seed", cfg.init.seed}};
    j["reg"] = {{"bias_decay_rate", cfg.reg.bias_decay_rate},
                {"decay_mode", decay_mode_name(cfg.reg.decay_mode)},
                {"decay_active_fraction", cfg.reg.decay_active_fraction},
                {"l1_coeff", cfg.reg.l1_coeff}};
    j["connectivity_density"] = cfg.connectivity_density;
    j["eval_every"] = cfg.eval_every;
    j["seed"] = cfg.seed;
    return j;
}

TrainConfig config_from_json(const Json& j) {
    reject_unknown(j,
                   {"task", "n_features", "d", "k", "features", "activation", "lr", "total_steps",
                    "schedule_t_max", "batch_size", "init", "reg", "connectivity_density",
                    "eval_every", "seed"},
                   "config");
    TrainConfig cfg;
    if (j.contains("task")) cfg.task = parse_task_kind(j.at("task").get<std::string>());
    read_if(j, "n_features", cfg.n_features);
    read_if(j, "d", cfg.d);
    read_if(j, "k", cfg.k);
    if (j.contains("features")) {
        const Json& f = j.at("features");
        reject_unknown(f, {"kind", "eps", "exponent"}, "features");
        if (f.contains("kind")) cfg.features.kind = parse_dist(f.at("kind").get<std::string>());
        read_if(f, "eps", cfg.features.eps);
        read_if(f, "exponent", cfg.features.exponent);
    }
    if (j.contains("activation")) {
        cfg.activation = parse_activation(j.at("activation").get<std::string>());
    }
    read_if(j, "lr", cfg.lr);
    read_if(j, "total_steps", cfg.total_steps);
    read_if(j, "schedule_t_max", cfg.schedule_t_max);
    read_if(j, "batch_size", cfg.batch_size);
    if (j.contains("init")) {
        const Json& i = j.at("init");
        reject_unknown(i, {"bias_offset", "bias_jitter", "weight_scale_multiplier", "seed"}, "init");
        read_if(i, "bias_offset", cfg.init.bias_offset);
        read_if(i, "bias_jitter", cfg.init.bias_jitter);
        read_if(i, "weight_scale_multiplier", cfg.init.weight_scale_multiplier);
        read_if(i, "seed", cfg.init.seed);
    }
    if (j.contains("reg")) {
        const Json& r = j.at("reg");
        reject_unknown(r, {"bias_decay_rate", "decay_mode", "decay_active_fraction", "l1_coeff"},
                       "reg");
        read_if(r, "bias_decay_rate", cfg.reg.bias_decay_rate);
        if (r.contains("decay_mode")) {
            cfg.reg.decay_mode = parse_decay_mode(r.at("decay_mode").get<std::string>());
        }
        read_if(r, "decay_active_fraction", cfg.reg.decay_active_fraction);
        read_if(r, "l1_coeff", cfg.reg.l1_coeff);
    }
    read_if(j, "connectivity_density", cfg.connectivity_density);
    read_if(j, "eval_every", cfg.eval_every);
    read_if(j, "seed", cfg.seed);
    validate(cfg);
    return cfg;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

TrainConfig load_config(const std::filesystem::path& path) {
    Json j;
    try {
        j = Json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void save_config(const std::filesystem::path& path, const TrainConfig& cfg) {
    write_text_atomic(path, config_to_json(cfg).dump(2) + "\n");
}

std::string config_hash(const TrainConfig& cfg) {
    const std::string text = config_to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Json trace_to_json(const TraceRecord& rec) {
    return Json{{"step", rec.step},
                {"lr", rec.lr},
                {"loss", rec.loss},
                {"mono_fraction", rec.mono_fraction},
                {"mono_count", rec.mono_count},
                {"mono_per_feature", rec.mono_per_feature},
                {"mean_bias", rec.mean_bias},
                {"wall_ms", rec.wall_ms}};
}

TraceRecord trace_from_json(const Json& j) {
    reject_unknown(j,
                   {"step", "lr", "loss", "mono_fraction", "mono_count", "mono_per_feature",
                    "mean_bias", "wall_ms"},
                   "trace record");
    TraceRecord rec;
    rec.step = j.at("step").get<std::size_t>();
    rec.lr = j.at("lr").get<double>();
    rec.loss = j.at("loss").get<double>();
    rec.mono_fraction = j.at("mono_fraction").get<double>();
    rec.mono_count = j.at("mono_count").get<std::size_t>();
    rec.mono_per_feature = j.at("mono_per_feature").get<double>();
    rec.mean_bias = j.at("mean_bias").get<double>();
    rec.wall_ms = j.at("wall_ms").get<double>();
    return rec;
}

std::vector<TraceRecord> read_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::vector<TraceRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(trace_from_json(Json::parse(line)));
    }
    return out;
}

}  // namespace monoforge
