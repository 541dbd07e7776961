#include "monoforge/monosem.hpp"

#include <algorithm>
#include <stdexcept>

#include "monoforge/error.hpp"

namespace monoforge {

std::size_t MonoReport::mono_count() const {
    return static_cast<std::size_t>(std::count(is_mono.begin(), is_mono.end(), true));
}

double MonoReport::mono_fraction() const {
    return r.empty() ? 0.0 : static_cast<double>(mono_count()) / static_cast<double>(r.size());
}

double MonoReport::mono_per_feature() const {
    return n_features == 0 ? 0.0
                           : static_cast<double>(features_covered) / static_cast<double>(n_features);
}

ActivationMatrix probe_activations(const ToyModel& m, const Projection& p, ProbeKind kind) {
    if (p.rows() != static_cast<std::size_t>(m.w1.cols())) {
        throw DimensionError("probe: projection output dim does not match model input dim");
    }
    // Row j of P^T is P e_j, the unit probe of feature j.
    const Matrix probes = p.matrix.transpose();
    ActivationMatrix a;
    a.probe_kind = kind;
    a.values = forward(m, probes).hidden.transpose();
    if (kind == ProbeKind::SignedPair) {
        a.values += forward(m, -probes).hidden.transpose();
    }
    return a;
}

ActivationMatrix probe_activations(const ToyModel& m, const TaskInstance& task) {
    const ProbeKind kind =
        task.kind == TaskKind::AbsValue ? ProbeKind::SignedPair : ProbeKind::Standard;
    return probe_activations(m, task.p, kind);
}

MonoReport compute_r(const ActivationMatrix& a, double delta) {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("compute_r: delta must be positive");
    }
    const Eigen::Index k = a.values.rows();
    const Eigen::Index n = a.values.cols();
    MonoReport rep;
    rep.delta = delta;
    rep.n_features = static_cast<std::size_t>(n);
    rep.r.resize(static_cast<std::size_t>(k));
    rep.is_mono.resize(static_cast<std::size_t>(k));
    rep.mostly_mono.resize(static_cast<std::size_t>(k));
    rep.argmax_feature.resize(static_cast<std::size_t>(k));

    for (Eigen::Index i = 0; i < k; ++i) {
        const auto row = static_cast<std::size_t>(i);
        if (n == 0) {
            rep.r[row] = 0.0;
            continue;
        }
        double best = a.values(i, 0);
        Eigen::Index best_j = 0;
        double positive_sum = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = a.values(i, j);
            if (v > best) {
                best = v;
                best_j = j;
            }
            positive_sum += std::max(0.0, v);
        }
        const double r = best / (delta + positive_sum);
        rep.r[row] = r;
        rep.argmax_feature[row] = static_cast<std::size_t>(best_j);
        rep.is_mono[row] = r > kMonoThreshold;
        rep.mostly_mono[row] = r > kMostlyMonoThreshold && r <= kMonoThreshold;
    }
    const auto hist = neurons_per_feature(rep, rep.n_features);
    rep.features_covered =
        static_cast<std::size_t>(std::count_if(hist.begin(), hist.end(), [](auto c) { return c > 0; }));
    return rep;
}

std::vector<double> cdf_of_r(const MonoReport& report, std::span<const double> thresholds) {
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
        throw std::invalid_argument("cdf_of_r: thresholds must be sorted ascending");
    }
    std::vector<double> sorted = report.r;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(thresholds.size());
    const double total = static_cast<double>(sorted.size());
    for (const double t : thresholds) {
        const auto below = std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
        out.push_back(total == 0.0 ? 0.0 : static_cast<double>(below) / total);
    }
    return out;
}

std::vector<std::size_t> neurons_per_feature(const MonoReport& report, std::size_t n_features) {
    std::vector<std::size_t> hist(n_features, 0);
    for (std::size_t i = 0; i < report.r.size(); ++i) {
        if (report.is_mono[i] && report.argmax_feature[i] < n_features) {
            hist[report.argmax_feature[i]] += 1;
        }
    }
    return hist;
}

}  // namespace monoforge
