#include "monoforge/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

#include "monoforge/checkpoint.hpp"
#include "monoforge/error.hpp"
#include "monoforge/interp.hpp"

namespace monoforge {

namespace fs = std::filesystem;

std::size_t effective_parallelism(std::size_t requested) {
    std::size_t p = std::max<std::size_t>(1, requested);
    if (const char* env = std::getenv("MONOFORGE_THREADS")) {
        char* end = nullptr;
        const unsigned long long cap = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0) {
            p = std::min<std::size_t>(p, cap);
        }
    }
    return p;
}

namespace {

Json entry_to_json(const SweepEntry& e) {
    return Json{{"index", e.index}, {"value", e.value},     {"seed", e.seed},
                {"run", e.run},     {"status", e.status},   {"message", e.message}};
}

SweepEntry entry_from_json(const Json& j) {
    SweepEntry e;
    e.index = j.at("index").get<std::size_t>();
    e.value = j.at("value").get<double>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.run = j.at("run").get<std::string>();
    e.status = j.at("status").get<std::string>();
    e.message = j.value("message", std::string{});
    return e;
}

class Manifest {
public:
    Manifest(fs::path path, Json header, std::vector<SweepEntry> entries)
        : path_(std::move(path)), header_(std::move(header)), entries_(std::move(entries)) {
        flush_locked();
    }

    void update(std::size_t i, const std::string& status, const std::string& message) {
        std::lock_guard lock(mu_);
        entries_[i].status = status;
        entries_[i].message = message;
        flush_locked();
    }

    std::vector<SweepEntry> entries() const {
        std::lock_guard lock(mu_);
        return entries_;
    }

private:
    void flush_locked() {
        Json j = header_;
        j["runs"] = Json::array();
        for (const auto& e : entries_) j["runs"].push_back(entry_to_json(e));
        write_text_atomic(path_, j.dump(2) + "\n");
    }

    fs::path path_;
    Json header_;
    std::vector<SweepEntry> entries_;
    mutable std::mutex mu_;
};

std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::vector<SweepEntry> run_sweep(const BatchSpec& spec, const std::vector<double>& values,
                                  const SweepOptions& options) {
    if (values.empty()) {
        throw ConfigError("sweep needs at least one value");
    }
    fs::create_directories(options.root);

    // Build every config up front so a bad value fails before any training.
    std::vector<TrainConfig> configs;
    std::vector<SweepEntry> entries;
    for (std::size_t i = 0; i < values.size(); ++i) {
        TrainConfig cfg = make_config(spec, values[i], options.extra);
        if (options.total_steps) cfg.total_steps = *options.total_steps;
        cfg.seed = options.seed ^ static_cast<std::uint64_t>(i);
        validate(cfg);
        SweepEntry e;
        e.index = i;
        e.value = values[i];
        e.seed = cfg.seed;
        e.run = run_dir_name(cfg);
        e.status = "pending";
        configs.push_back(cfg);
        entries.push_back(e);
    }

    Json header{{"batch", spec.key},
                {"variable", to_string(spec.variables.front())},
                {"sweep_seed", options.seed}};
    Json extra = Json::object();
    for (const auto& [var, v] : options.extra) extra[to_string(var)] = v;
    header["extra"] = extra;
    Manifest manifest(options.root / kManifestFile, header, entries);

    std::atomic<std::size_t> next{0};
    std::mutex log_mu;
    auto log = [&](const std::string& msg) {
        if (!options.log) return;
        std::lock_guard lock(log_mu);
        options.log(msg);
    };
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            manifest.update(i, "running", "");
            try {
                const RunResult r = execute_run(configs[i], options.root / entries[i].run);
                manifest.update(i, r.status.status, r.status.message);
                log(entries[i].run + " " + r.status.status + (r.reused ? " (reused)" : ""));
            } catch (const std::exception& ex) {
                manifest.update(i, "failed", ex.what());
                log(entries[i].run + " failed: " + ex.what());
            }
        }
    };

    const std::size_t n_threads = std::min(effective_parallelism(options.parallelism), configs.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return manifest.entries();
}

std::vector<SweepEntry> read_manifest(const fs::path& sweep_dir) {
    const Json j = Json::parse(read_text(sweep_dir / kManifestFile));
    std::vector<SweepEntry> out;
    for (const auto& e : j.at("runs")) out.push_back(entry_from_json(e));
    return out;
}

std::vector<SummaryRow> summarize_sweep(const fs::path& sweep_dir) {
    std::vector<SummaryRow> rows;
    for (const SweepEntry& e : read_manifest(sweep_dir)) {
        if (e.status != "done" && e.status != "diverged") continue;
        const fs::path dir = sweep_dir / e.run;
        const auto trace = read_trace(dir / kTraceFile);
        if (trace.empty()) continue;
        const TraceRecord& last = trace.back();
        SummaryRow row;
        row.run = e.run;
        row.variable_value = e.value;
        row.final_loss = last.loss;
        row.mono_fraction = last.mono_fraction;
        row.mono_per_feature = last.mono_per_feature;
        row.mean_bias = last.mean_bias;
        row.poly_count = count_polysemantic_by_bias(checkpoint_load(dir / kCheckpointFile).model);
        rows.push_back(row);
    }
    return rows;
}

fs::path write_summary_csv(const fs::path& sweep_dir) {
    std::ostringstream os;
    os << "run,variable_value,final_loss,mono_fraction,mono_per_feature,mean_bias,poly_count\n";
    for (const SummaryRow& r : summarize_sweep(sweep_dir)) {
        os << r.run << ',' << shortest(r.variable_value) << ',' << shortest(r.final_loss) << ','
           << shortest(r.mono_fraction) << ',' << shortest(r.mono_per_feature) << ','
           << shortest(r.mean_bias) << ',' << r.poly_count << '\n';
    }
    const fs::path out = sweep_dir / kSummaryFile;
    write_text_atomic(out, os.str());
    return out;
}

}  // namespace monoforge
