#include "monoforge/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "monoforge/config_io.hpp"
#include "monoforge/error.hpp"

namespace monoforge {

namespace {

constexpr const char* kFormat = "monoforge-checkpoint";

std::uint64_t to_little(std::uint64_t x) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t y = 0;
        for (int i = 0; i < 8; ++i) {
            y = (y << 8) | ((x >> (8 * i)) & 0xFF);
        }
        return y;
    }
    return x;
}

class PayloadWriter {
public:
    void add(const std::string& name, const Matrix& m) {
        Json entry{{"name", name},
                   {"rows", m.rows()},
                   {"cols", m.cols()},
                   {"offset", bytes_.size()},
                   {"bytes", m.size() * 8}};
        manifest_.push_back(entry);
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(m(r, c)));
                char raw[8];
                std::memcpy(raw, &bits, 8);
                bytes_.insert(bytes_.end(), raw, raw + 8);
            }
        }
    }
    void add(const std::string& name, const Vector& v) { add(name, Matrix(v.transpose())); }

    const Json& manifest() const { return manifest_; }
    const std::vector<char>& bytes() const { return bytes_; }

private:
    Json manifest_ = Json::array();
    std::vector<char> bytes_;
};

class PayloadReader {
public:
    PayloadReader(const Json& manifest, std::string payload)
        : manifest_(manifest), payload_(std::move(payload)) {
        std::size_t expected = 0;
        for (const auto& e : manifest_) {
            const auto rows = e.at("rows").get<std::size_t>();
            const auto cols = e.at("cols").get<std::size_t>();
            const auto offset = e.at("offset").get<std::size_t>();
            const auto bytes = e.at("bytes").get<std::size_t>();
            if (bytes != rows * cols * 8 || offset != expected) {
                throw CheckpointError("checkpoint manifest inconsistent at array '" +
                                      e.at("name").get<std::string>() + "'");
            }
            expected += bytes;
        }
        if (payload_.size() < expected) {
            throw CheckpointError("checkpoint payload truncated: " + std::to_string(payload_.size()) +
                                  " of " + std::to_string(expected) + " bytes");
        }
        if (payload_.size() > expected) {
            throw CheckpointError("checkpoint payload longer than its manifest");
        }
    }

    bool has(const std::string& name) const { return find(name) != nullptr; }

    Matrix matrix(const std::string& name) const {
        const Json* e = find(name);
        if (e == nullptr) {
            throw CheckpointError("checkpoint lacks array '" + name + "'");
        }
        const auto rows = e->at("rows").get<Eigen::Index>();
        const auto cols = e->at("cols").get<Eigen::Index>();
        std::size_t pos = e->at("offset").get<std::size_t>();
        Matrix m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                std::uint64_t bits = 0;
                std::memcpy(&bits, payload_.data() + pos, 8);
                m(r, c) = std::bit_cast<double>(to_little(bits));
                pos += 8;
            }
        }
        return m;
    }

    Matrix matrix(const std::string& name, Eigen::Index rows, Eigen::Index cols) const {
        Matrix m = matrix(name);
        if (m.rows() != rows || m.cols() != cols) {
            throw CheckpointError("checkpoint array '" + name + "' has unexpected shape");
        }
        return m;
    }

    Vector vector(const std::string& name, Eigen::Index size) const {
        const Matrix m = matrix(name, 1, size);
        return m.row(0).transpose();
    }

private:
    const Json* find(const std::string& name) const {
        for (const auto& e : manifest_) {
            if (e.at("name").get<std::string>() == name) {
                return &e;
            }
        }
        return nullptr;
    }

    const Json& manifest_;
    std::string payload_;
};

/// LAMB buffers are flat over Eigen's column-major storage; store them with
/// the parameter's shape so the payload stays row-major.
Matrix as_param_shape(const Vector& flat, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<const Matrix>(flat.data(), rows, cols);
}

Vector from_param_shape(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

}  // namespace

void checkpoint_save(const TrainerState& state, const std::filesystem::path& path) {
    const ToyModel& m = state.model;
    if (state.lamb.m.size() != 3 || state.lamb.v.size() != 3) {
        throw CheckpointError("optimizer state must hold three tensors");
    }
    PayloadWriter payload;
    payload.add("p", state.task.p.matrix);
    if (state.task.q) payload.add("q", state.task.q->matrix);
    payload.add("w1", m.w1);
    payload.add("bias", m.bias);
    payload.add("w2", m.w2);
    if (m.mask1) payload.add("mask1", *m.mask1);
    if (m.mask2) payload.add("mask2", *m.mask2);
    const std::array<std::pair<Eigen::Index, Eigen::Index>, 3> shapes{
        std::pair{m.w1.rows(), m.w1.cols()}, std::pair{Eigen::Index{1}, m.bias.size()},
        std::pair{m.w2.rows(), m.w2.cols()}};
    const std::array<const char*, 3> names{"w1", "bias", "w2"};
    for (std::size_t t = 0; t < 3; ++t) {
        payload.add(std::string("lamb_m_") + names[t],
                    as_param_shape(state.lamb.m[t], shapes[t].first, shapes[t].second));
        payload.add(std::string("lamb_v_") + names[t],
                    as_param_shape(state.lamb.v[t], shapes[t].first, shapes[t].second));
    }

    const ModelDims dims = m.dims();
    Json header;
    header["format"] = kFormat;
    header["version"] = kCheckpointVersion;
    header["step"] = state.step;
    header["config"] = config_to_json(state.config);
    header["dims"] = {{"n_features", state.task.n_features()},
                      {"d", dims.input},
                      {"k", dims.hidden},
                      {"out", dims.output}};
    header["activation"] = to_string(m.activation);
    header["task"] = to_string(state.task.kind);
    header["projection_seeds"] = {{"p", state.task.p.seed},
                                  {"q", state.task.q ? state.task.q->seed : 0}};
    header["hyperparameters"] = {{"beta1", state.lamb.beta1},
                                 {"beta2", state.lamb.beta2},
                                 {"eps_adam", state.lamb.eps_adam},
                                 {"lamb_step_count", state.lamb.step_count}};
    header["rng_state"] = state.rng.serialize();
    header["arrays"] = payload.manifest();
    header["payload_bytes"] = payload.bytes().size();

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw CheckpointError("cannot write " + tmp.string());
        }
        out << header.dump() << '\n';
        out.write(payload.bytes().data(), static_cast<std::streamsize>(payload.bytes().size()));
        if (!out) {
            throw CheckpointError("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

TrainerState checkpoint_load(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text(path);
    } catch (const std::exception& e) {
        throw CheckpointError(e.what());
    }
    const auto newline = text.find('\n');
    if (newline == std::string::npos) {
        throw CheckpointError("checkpoint header is not terminated");
    }
    Json header;
    try {
        header = Json::parse(text.substr(0, newline));
    } catch (const nlohmann::json::parse_error& e) {
        throw CheckpointError(std::string("checkpoint header is not valid JSON: ") + e.what());
    }

    try {
        if (header.value("format", std::string{}) != kFormat) {
            throw CheckpointError("not a monoforge checkpoint");
        }
        const int version = header.at("version").get<int>();
        if (version != kCheckpointVersion) {
            throw CheckpointError("unsupported checkpoint version " + std::to_string(version) +
                                  " (expected " + std::to_string(kCheckpointVersion) + ")");
        }
        std::string payload = text.substr(newline + 1);
        if (payload.size() != header.at("payload_bytes").get<std::size_t>()) {
            throw CheckpointError("checkpoint payload is " + std::to_string(payload.size()) +
                                  " bytes, header declares " +
                                  std::to_string(header.at("payload_bytes").get<std::size_t>()));
        }
        const PayloadReader reader(header.at("arrays"), std::move(payload));

        TrainerState s;
        s.config = config_from_json(header.at("config"));
        s.step = header.at("step").get<std::size_t>();
        const auto& dims = header.at("dims");
        const auto n = dims.at("n_features").get<Eigen::Index>();
        const auto d = dims.at("d").get<Eigen::Index>();
        const auto k = dims.at("k").get<Eigen::Index>();
        const auto out = dims.at("out").get<Eigen::Index>();

        s.task.kind = parse_task_kind(header.at("task").get<std::string>());
        s.task.p.matrix = reader.matrix("p", d, n);
        s.task.p.seed = header.at("projection_seeds").at("p").get<std::uint64_t>();
        if (reader.has("q")) {
            s.task.q = Projection{reader.matrix("q", d, n),
                                  header.at("projection_seeds").at("q").get<std::uint64_t>()};
        }
        s.model.activation = parse_activation(header.at("activation").get<std::string>());
        s.model.w1 = reader.matrix("w1", k, d);
        s.model.bias = reader.vector("bias", k);
        s.model.w2 = reader.matrix("w2", out, k);
        if (reader.has("mask1")) s.model.mask1 = reader.matrix("mask1", k, d);
        if (reader.has("mask2")) s.model.mask2 = reader.matrix("mask2", out, k);

        const auto& hp = header.at("hyperparameters");
        s.lamb.beta1 = hp.at("beta1").get<double>();
        s.lamb.beta2 = hp.at("beta2").get<double>();
        s.lamb.eps_adam = hp.at("eps_adam").get<double>();
        s.lamb.step_count = hp.at("lamb_step_count").get<std::size_t>();
        const std::array<std::pair<Eigen::Index, Eigen::Index>, 3> shapes{
            std::pair{k, d}, std::pair{Eigen::Index{1}, k}, std::pair{out, k}};
        const std::array<const char*, 3> names{"w1", "bias", "w2"};
        for (std::size_t t = 0; t < 3; ++t) {
            s.lamb.m.push_back(from_param_shape(
                reader.matrix(std::string("lamb_m_") + names[t], shapes[t].first, shapes[t].second)));
            s.lamb.v.push_back(from_param_shape(
                reader.matrix(std::string("lamb_v_") + names[t], shapes[t].first, shapes[t].second)));
        }
        s.rng = Rng::deserialize(header.at("rng_state").get<std::string>());
        validate_task(s.task);
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("malformed checkpoint header: ") + e.what());
    } catch (const DimensionError& e) {
        throw CheckpointError(std::string("inconsistent checkpoint: ") + e.what());
    } catch (const ConfigError& e) {
        throw CheckpointError(std::string("bad config in checkpoint: ") + e.what());
    }
}

}  // namespace monoforge
