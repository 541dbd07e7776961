#include "monoforge/artifacts.hpp"

#include <set>

#include "monoforge/checkpoint.hpp"
#include "monoforge/rundir.hpp"

namespace monoforge {

namespace fs = std::filesystem;

namespace {

Json matrix_rows(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
        rows.push_back(row);
    }
    return rows;
}

std::vector<double> to_std(const Vector& v) {
    return {v.data(), v.data() + v.size()};
}

}  // namespace

Json sfa_to_json(const SortedSFA& sfa, const MonoReport& report) {
    std::vector<double> r_sorted;
    for (std::size_t i : sfa.neuron_order) r_sorted.push_back(report.r[i]);
    return Json{{"neuron_order", sfa.neuron_order},
                {"feature_order", sfa.feature_order},
                {"r_sorted", r_sorted},
                {"matrix", matrix_rows(sfa.matrix)}};
}

Json bias_profile_to_json(const ToyModel& m, const MonoReport& report) {
    std::vector<double> r_sorted;
    const auto order = neuron_order_by_r(report);
    for (std::size_t i : order) r_sorted.push_back(report.r[i]);
    return Json{{"neuron_order", order},
                {"r_sorted", r_sorted},
                {"bias_sorted", bias_profile(m, report)},
                {"poly_count", count_polysemantic_by_bias(m)},
                {"poly_threshold", kPolyBiasProxy}};
}

Json amplitude_sweep_to_json(const AmplitudeSweep& s) {
    return Json{{"feature", s.feature_index}, {"amplitudes", s.amplitudes},
                {"y_full", s.y_full},         {"y_mono", s.y_mono},
                {"y_poly", s.y_poly},         {"kinks", s.kinks},
                {"mono_kinks", s.mono_kinks}, {"onset", onset_amplitude(s.amplitudes, s.y_mono)}};
}

Json poly_map_to_json(const PolyLinearMap& map) {
    Json j{{"rows", map.matrix.rows()},
           {"cols", map.matrix.cols()},
           {"n_positive", map.n_positive},
           {"singular_values", map.singular_values}};
    const auto limit = static_cast<Eigen::Index>(kPolyMapMatrixLimit);
    if (map.matrix.rows() <= limit && map.matrix.cols() <= limit) {
        j["matrix"] = matrix_rows(map.matrix);
    }
    return j;
}

Json poly_diag_to_json(const PolyDiagnostics& diag) {
    return Json{{"intercept", diag.intercept},
                {"slope", diag.slope},
                {"slope_drift", diag.slope_drift},
                {"bias_inner", to_std(diag.bias_inner)},
                {"bias_projection", diag.bias_projection}};
}

std::vector<fs::path> write_analysis(const fs::path& run_dir, const std::vector<std::size_t>& features) {
    const TrainerState s = checkpoint_load(run_dir / kCheckpointFile);
    const ActivationMatrix acts = probe_activations(s.model, s.task);
    const MonoReport report = compute_r(acts);
    std::vector<fs::path> written;
    auto emit = [&](const std::string& name, const Json& j) {
        const fs::path p = run_dir / name;
        write_text_atomic(p, j.dump() + "\n");
        written.push_back(p);
    };

    emit(kMonoReportFile, mono_report_to_json(report));
    emit("sfa.json", sfa_to_json(sort_sfa(acts, report), report));
    emit("bias_profile.json", bias_profile_to_json(s.model, report));

    if (s.task.kind == TaskKind::Decoder) {
        std::vector<std::size_t> chosen = features;
        if (chosen.empty()) {
            std::set<std::size_t> covered;
            for (std::size_t i = 0; i < report.n_neurons(); ++i) {
                if (report.is_mono[i]) covered.insert(report.argmax_feature[i]);
            }
            chosen.assign(covered.begin(), covered.end());
        }
        for (std::size_t f : chosen) {
            emit("sweep_" + std::to_string(f) + ".json",
                 amplitude_sweep_to_json(amplitude_sweep(s.model, s.task, f)));
        }
        emit("poly_map.json", poly_map_to_json(poly_linear_map(s.model, s.task)));
        emit("poly_diag.json", poly_diag_to_json(poly_diagnostics(s.model, s.task)));
    }
    return written;
}

}  // namespace monoforge
