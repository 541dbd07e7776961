#include <doctest.h>

#include <algorithm>
#include <vector>

#include "monoforge/model.hpp"
#include "monoforge/monosem.hpp"
#include "monoforge/tasks.hpp"

using namespace monoforge;

namespace {

ActivationMatrix rows(std::initializer_list<std::initializer_list<double>> values) {
    ActivationMatrix a;
    const auto k = static_cast<Eigen::Index>(values.size());
    const auto n = static_cast<Eigen::Index>(values.begin()->size());
    a.values = Matrix(k, n);
    Eigen::Index i = 0;
    for (const auto& row : values) {
        Eigen::Index j = 0;
        for (double v : row) a.values(i, j++) = v;
        ++i;
    }
    return a;
}

}  // namespace

TEST_CASE("compute_r: examples from the definition") {
    const MonoReport rep = compute_r(rows({{2.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {1.0, 1.0, 0.0}, {1.0, -0.4, 0.0}}));
    CHECK(rep.r[0] == 2.0 / (2.0 + 1e-10));
    CHECK(rep.is_mono[0]);
    CHECK(rep.r[1] == 0.0);
    CHECK_FALSE(rep.is_mono[1]);
    CHECK(rep.r[2] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rep.r[3] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.is_mono[3]);
    CHECK(rep.argmax_feature[2] == 0);  // tie goes to the lowest index
    CHECK(rep.features_covered == 1);
    CHECK(rep.mono_count() == 2);
    CHECK(rep.mono_fraction() == 0.5);
    CHECK(rep.mono_per_feature() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("compute_r: all-negative rows give r <= 0 and are not monosemantic") {
    const MonoReport rep = compute_r(rows({{-0.1, -0.3}}));
    CHECK(rep.r[0] < 0.0);
    CHECK_FALSE(rep.is_mono[0]);
    CHECK_FALSE(rep.mostly_mono[0]);
}

TEST_CASE("compute_r: mostly-mono band is disjoint from mono") {
    const MonoReport rep = compute_r(rows({{1.0, 0.05}, {1.0, 0.0005}, {1.0, 0.5}}));
    CHECK(rep.mostly_mono[0]);
    CHECK_FALSE(rep.is_mono[0]);
    CHECK(rep.is_mono[1]);
    CHECK_FALSE(rep.mostly_mono[1]);
    CHECK_FALSE(rep.mostly_mono[2]);
    CHECK_THROWS(compute_r(rows({{1.0}}), 0.0));
}

TEST_CASE("compute_r: scale invariance and permutation equivariance") {
    Rng rng(3);
    ActivationMatrix a;
    a.values = Matrix(12, 9);
    for (Eigen::Index i = 0; i < a.values.size(); ++i) a.values(i) = rng.uniform();
    const MonoReport base = compute_r(a);
    for (double c : {0.5, 2.0, 10.0}) {
        ActivationMatrix s = a;
        s.values *= c;
        const MonoReport rs = compute_r(s);
        for (std::size_t i = 0; i < base.r.size(); ++i) CHECK(std::abs(rs.r[i] - base.r[i]) < 1e-8);
    }
    ActivationMatrix p = a;
    p.values = a.values.rowwise().reverse();
    const MonoReport rp = compute_r(p);
    std::vector<double> x = base.r, y = rp.r;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(y[i]).epsilon(1e-15));
    for (double r : base.r) {
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
    }
}

TEST_CASE("cdf_of_r: strict inequality and counting") {
    MonoReport rep;
    rep.r = {0.2, 0.8, 1.0};
    const double th[] = {0.5, 0.9};
    const auto c = cdf_of_r(rep, th);
    CHECK(c[0] == doctest::Approx(1.0 / 3.0));
    CHECK(c[1] == doctest::Approx(2.0 / 3.0));
    const double big[] = {1.5};
    CHECK(cdf_of_r(rep, big)[0] == 1.0);
    MonoReport dead;
    dead.r = {0.0, 0.0};
    const double zero[] = {0.0};
    CHECK(cdf_of_r(dead, zero)[0] == 0.0);
    const double unsorted[] = {0.9, 0.5};
    CHECK_THROWS(cdf_of_r(rep, unsorted));
}

TEST_CASE("neurons_per_feature: histogram identities") {
    const MonoReport none = compute_r(rows({{1.0, 1.0}, {0.0, 0.0}}));
    const auto h0 = neurons_per_feature(none, 2);
    CHECK(h0 == std::vector<std::size_t>{0, 0});
    const MonoReport two = compute_r(rows({{0, 0, 0, 3.0}, {0, 0, 0, 1.0}, {1.0, 0, 0, 0}, {0.5, 0.5, 0, 0}}));
    const auto h = neurons_per_feature(two, 4);
    CHECK(h[3] == 2);
    CHECK(h[0] == 1);
    std::size_t sum = 0;
    for (auto c : h) sum += c;
    CHECK(sum == two.mono_count());
}

TEST_CASE("probe_activations: dead model, constructed neuron, signed pair") {
    const TaskInstance dec = make_task(TaskKind::Decoder, 6, 3, 2);
    const ToyModel dead = init_model({3, 4, 6}, Activation::ReLU, InitConfig{-1.0, 0.0, 0.0, 1});
    CHECK(probe_activations(dead, dec).values.isZero(0.0));

    // One neuron reading feature 0's column, scaled so that e = 1.
    ToyModel m = init_model({3, 1, 6}, Activation::ReLU, InitConfig{0.0, 0.0, 1.0, 1});
    const Vector col = dec.p.matrix.col(0);
    m.w1.row(0) = col.transpose() / col.squaredNorm();
    m.bias(0) = 0.0;
    const ActivationMatrix a = probe_activations(m, dec);
    CHECK(a.values(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.probe_kind == ProbeKind::Standard);

    const TaskInstance abs = make_task(TaskKind::AbsValue, 6, 3, 2);
    ToyModel even = init_model({3, 2, 6}, Activation::GeLU, InitConfig{0.0, 0.0, 1.0, 1});
    even.w1.row(0).setZero();
    even.bias(0) = 0.3;
    const ActivationMatrix pair = probe_activations(even, abs);
    const ActivationMatrix standard = probe_activations(even, abs.p, ProbeKind::Standard);
    CHECK(pair.probe_kind == ProbeKind::SignedPair);
    for (Eigen::Index j = 0; j < 6; ++j) CHECK(pair.values(0, j) == 2.0 * standard.values(0, j));
    // Odd part cancels for the other neuron only when its response is odd; check the definition.
    const ActivationMatrix neg = probe_activations(even, Projection{-abs.p.matrix, 0}, ProbeKind::Standard);
    CHECK((pair.values - standard.values - neg.values).cwiseAbs().maxCoeff() < 1e-15);
}
