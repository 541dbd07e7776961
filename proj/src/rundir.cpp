#include "monoforge/rundir.hpp"

#include <fstream>

#include "monoforge/checkpoint.hpp"
#include "monoforge/error.hpp"

namespace monoforge {

namespace fs = std::filesystem;

TrainConfig desk_scaled(const TrainConfig& cfg) {
    TrainConfig out = cfg;
    out.n_features = 128;
    out.d = 32;
    out.k = std::max<std::size_t>(1, cfg.k / 4);
    out.features.eps = cfg.features.eps * 2.0;
    out.batch_size = 4096;
    validate(out);
    return out;
}

std::string run_dir_name(const TrainConfig& cfg) {
    return "run-" + config_hash(cfg);
}

Json mono_report_to_json(const MonoReport& report) {
    Json j;
    j["r"] = report.r;
    j["is_mono"] = report.is_mono;
    j["argmax_feature"] = report.argmax_feature;
    j["delta"] = report.delta;
    j["features_covered"] = report.features_covered;
    return j;
}

RunStatus read_status(const fs::path& dir) {
    const Json j = Json::parse(read_text(dir / kStatusFile));
    return RunStatus{j.at("status").get<std::string>(), j.value("message", std::string{}),
                     j.value("steps", std::size_t{0})};
}

namespace {

bool finished_run_matches(const fs::path& dir, const TrainConfig& cfg) {
    if (!fs::exists(dir / kStatusFile) || !fs::exists(dir / kConfigFile)) {
        return false;
    }
    try {
        return config_hash(load_config(dir / kConfigFile)) == config_hash(cfg);
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace

RunResult execute_run(const TrainConfig& cfg, const fs::path& dir) {
    validate(cfg);
    RunResult res;
    res.dir = dir;
    res.config = cfg;

    if (finished_run_matches(dir, cfg)) {
        res.reused = true;
        res.status = read_status(dir);
        const auto trace = read_trace(dir / kTraceFile);
        if (!trace.empty()) res.final_record = trace.back();
        return res;
    }

    fs::create_directories(dir);
    save_config(dir / kConfigFile, cfg);

    // Stream the trace so a long run can be watched from outside.
    const fs::path trace_tmp = dir / (std::string(kTraceFile) + ".tmp");
    std::ofstream trace_out(trace_tmp, std::ios::trunc);
    if (!trace_out) {
        throw std::runtime_error("cannot write " + trace_tmp.string());
    }
    const TrainResult tr = train(cfg, [&](const TraceRecord& rec) {
        trace_out << trace_to_json(rec).dump() << '\n';
        trace_out.flush();
    });
    trace_out.close();
    fs::rename(trace_tmp, dir / kTraceFile);

    checkpoint_save(tr.final_state, dir / kCheckpointFile);
    const MonoReport report = compute_r(probe_activations(tr.model, tr.final_state.task));
    write_text_atomic(dir / kMonoReportFile, mono_report_to_json(report).dump() + "\n");

    res.status.status = tr.diverged ? "diverged" : "done";
    res.status.message = tr.message;
    res.status.steps = tr.final_state.step;
    if (!tr.trace.empty()) res.final_record = tr.trace.back();
    const Json status{{"status", res.status.status},
                      {"message", res.status.message},
                      {"steps", res.status.steps}};
    write_text_atomic(dir / kStatusFile, status.dump(2) + "\n");
    return res;
}

}  // namespace monoforge
