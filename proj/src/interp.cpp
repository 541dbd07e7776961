#include "monoforge/interp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "monoforge/error.hpp"

namespace monoforge {

namespace {

void require_decoder(const TaskInstance& task, const char* what) {
    if (task.kind != TaskKind::Decoder) {
        throw std::invalid_argument(std::string(what) + " requires the decoder task");
    }
}

/// Row-stacked probe inputs: block f holds a * P e_f for every grid amplitude.
Matrix sweep_inputs(const Projection& p, std::size_t feature, std::span<const double> amps) {
    Matrix inputs(static_cast<Eigen::Index>(amps.size()), p.matrix.rows());
    const auto col = p.matrix.col(static_cast<Eigen::Index>(feature));
    for (std::size_t i = 0; i < amps.size(); ++i) {
        inputs.row(static_cast<Eigen::Index>(i)) = amps[i] * col.transpose();
    }
    return inputs;
}

std::vector<double> column(const Matrix& m, std::size_t c) {
    std::vector<double> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out[static_cast<std::size_t>(r)] = m(r, static_cast<Eigen::Index>(c));
    }
    return out;
}

}  // namespace

std::vector<double> uniform_grid(std::size_t points) {
    if (points < 2) {
        throw std::invalid_argument("amplitude grid needs at least 2 points");
    }
    std::vector<double> xs(points);
    for (std::size_t i = 0; i < points; ++i) {
        xs[i] = static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return xs;
}

std::vector<std::size_t> neuron_order_by_r(const MonoReport& report) {
    std::vector<std::size_t> order(report.r.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return report.r[a] > report.r[b]; });
    return order;
}

SortedSFA sort_sfa(const ActivationMatrix& a, const MonoReport& report) {
    const Eigen::Index k = a.values.rows();
    const Eigen::Index n = a.values.cols();
    if (static_cast<std::size_t>(k) != report.r.size()) {
        throw DimensionError("sort_sfa: report and activation matrix disagree on neuron count");
    }
    SortedSFA out;
    out.neuron_order = neuron_order_by_r(report);
    std::vector<std::size_t> position(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < out.neuron_order.size(); ++i) {
        position[out.neuron_order[i]] = i;
    }

    std::vector<std::size_t> strongest(static_cast<std::size_t>(n), 0);
    for (Eigen::Index j = 0; j < n && k > 0; ++j) {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < k; ++i) {
            if (a.values(i, j) > a.values(best, j)) {
                best = i;
            }
        }
        strongest[static_cast<std::size_t>(j)] = static_cast<std::size_t>(best);
    }

    out.feature_order.resize(static_cast<std::size_t>(n));
    std::iota(out.feature_order.begin(), out.feature_order.end(), std::size_t{0});
    std::stable_sort(out.feature_order.begin(), out.feature_order.end(),
                     [&](std::size_t f, std::size_t g) {
                         if (k == 0) return false;
                         const std::size_t pf = position[strongest[f]];
                         const std::size_t pg = position[strongest[g]];
                         if (pf != pg) return pf < pg;
                         return a.values(static_cast<Eigen::Index>(strongest[f]),
                                         static_cast<Eigen::Index>(f)) >
                                a.values(static_cast<Eigen::Index>(strongest[g]),
                                         static_cast<Eigen::Index>(g));
                     });

    out.matrix.resize(k, n);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out.matrix(i, j) =
                a.values(static_cast<Eigen::Index>(out.neuron_order[static_cast<std::size_t>(i)]),
                         static_cast<Eigen::Index>(out.feature_order[static_cast<std::size_t>(j)]));
        }
    }
    return out;
}

std::vector<double> bias_profile(const ToyModel& m, const MonoReport& report) {
    if (static_cast<std::size_t>(m.bias.size()) != report.r.size()) {
        throw DimensionError("bias_profile: report and model disagree on neuron count");
    }
    std::vector<double> out;
    out.reserve(report.r.size());
    for (const std::size_t i : neuron_order_by_r(report)) {
        out.push_back(m.bias(static_cast<Eigen::Index>(i)));
    }
    return out;
}

std::size_t count_polysemantic_by_bias(const ToyModel& m, double threshold) {
    return static_cast<std::size_t>((m.bias.array() > threshold).count());
}

std::vector<double> detect_kinks(std::span<const double> xs, std::span<const double> ys,
                                 double tol) {
    if (xs.size() != ys.size()) {
        throw DimensionError("detect_kinks: xs and ys differ in length");
    }
    if (xs.size() < 5) {
        throw std::invalid_argument("detect_kinks: need at least 5 samples");
    }
    const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    if (!(h > 0.0)) {
        throw std::invalid_argument("detect_kinks: grid must be ascending");
    }
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (std::abs((xs[i] - xs[i - 1]) - h) > 1e-9 * h) {
            throw std::invalid_argument("detect_kinks: grid must be uniform");
        }
    }
    double max_slope = 0.0;
    for (std::size_t i = 1; i < ys.size(); ++i) {
        max_slope = std::max(max_slope, std::abs(ys[i] - ys[i - 1]) / h);
    }
    const double threshold = tol * h * max_slope;

    std::vector<double> kinks;
    std::size_t i = 1;
    while (i + 1 < ys.size()) {
        const auto second = [&](std::size_t j) { return std::abs(ys[j + 1] - 2.0 * ys[j] + ys[j - 1]); };
        if (second(i) > threshold && threshold > 0.0) {
            std::size_t peak = i;
            std::size_t j = i;
            while (j + 1 < ys.size() && second(j) > threshold) {
                if (second(j) > second(peak)) {
                    peak = j;
                }
                ++j;
            }
            kinks.push_back(xs[peak]);
            i = j;
        } else {
            ++i;
        }
    }
    return kinks;
}

double onset_amplitude(std::span<const double> xs, std::span<const double> ys, double threshold) {
    for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
        if (ys[i] > threshold) {
            return xs[i];
        }
    }
    return 2.0;
}

AmplitudeSweep amplitude_sweep(const ToyModel& m, const TaskInstance& task, std::size_t feature,
                               std::size_t grid, double kink_tol) {
    require_decoder(task, "amplitude_sweep");
    if (feature >= task.n_features()) {
        throw std::out_of_range("amplitude_sweep: feature " + std::to_string(feature) +
                                " out of range");
    }
    AmplitudeSweep s;
    s.feature_index = feature;
    s.amplitudes = uniform_grid(grid);
    const Matrix inputs = sweep_inputs(task.p, feature, s.amplitudes);
    const auto [mono, poly] = split_by_bias_sign(m);
    s.y_full = column(forward(m, inputs).output, feature);
    s.y_mono = column(forward(mono, inputs).output, feature);
    s.y_poly = column(forward(poly, inputs).output, feature);
    if (grid >= 5) {
        s.kinks = detect_kinks(s.amplitudes, s.y_full, kink_tol);
        s.mono_kinks = detect_kinks(s.amplitudes, s.y_mono, kink_tol);
    }
    return s;
}

std::vector<double> singular_values(const Matrix& a) {
    if (a.size() == 0) {
        return {};
    }
    Eigen::JacobiSVD<Matrix> svd(a);
    const Vector sv = svd.singularValues();
    return {sv.data(), sv.data() + sv.size()};
}

PolyLinearMap poly_linear_map(const ToyModel& m, const TaskInstance& task) {
    require_decoder(task, "poly_linear_map");
    const ToyModel poly = split_by_bias_sign(m).second;
    PolyLinearMap out;
    out.n_positive = poly.n_neurons();
    if (out.n_positive == 0) {
        out.matrix = Matrix::Zero(m.w2.rows(), task.p.matrix.cols());
    } else {
        out.matrix.noalias() = poly.w2 * (poly.w1 * task.p.matrix);
    }
    out.singular_values = singular_values(out.matrix);
    return out;
}

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw std::invalid_argument("fit_line: need two or more paired samples");
    }
    const double n = static_cast<double>(xs.size());
    const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
        sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
    }
    LineFit fit;
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = mean_y - fit.slope * mean_x;
    return fit;
}

PolyDiagnostics poly_diagnostics(const ToyModel& m, const TaskInstance& task, std::size_t grid,
                                 std::size_t window) {
    require_decoder(task, "poly_diagnostics");
    if (window < 2 || window > grid) {
        throw std::invalid_argument("poly_diagnostics: window must lie in [2, grid]");
    }
    const ToyModel poly = split_by_bias_sign(m).second;
    const std::vector<double> amps = uniform_grid(grid);
    const std::size_t n = task.n_features();

    PolyDiagnostics out;
    out.intercept.resize(n);
    out.slope.resize(n);
    out.slope_drift.resize(n);
    for (std::size_t f = 0; f < n; ++f) {
        const std::vector<double> ys =
            column(forward(poly, sweep_inputs(task.p, f, amps)).output, f);
        const LineFit fit = fit_line(amps, ys);
        out.intercept[f] = fit.intercept;
        out.slope[f] = fit.slope;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t start = 0; start + window <= grid; ++start) {
            const LineFit local = fit_line(std::span(amps).subspan(start, window),
                                           std::span(ys).subspan(start, window));
            lo = std::min(lo, local.slope);
            hi = std::max(hi, local.slope);
        }
        out.slope_drift[f] = hi - lo;
    }
    if (poly.n_neurons() == 0) {
        out.bias_inner = Vector::Zero(m.w2.rows());
    } else {
        out.bias_inner = poly.w2 * poly.bias.cwiseMax(0.0);
    }
    out.bias_projection = out.bias_inner.size() == 0 ? 0.0 : out.bias_inner.cwiseAbs().maxCoeff();
    return out;
}

}  // namespace monoforge
