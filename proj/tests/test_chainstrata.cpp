#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polylab/chainstrata.hpp"
#include "polylab/errors.hpp"
#include "polylab/rng.hpp"

using namespace polylab;
using namespace polylab::chainstrata;

namespace {

ChainMapSpec scalar_chain(const Polynomial& outer,
                          std::function<double(double)> inner,
                          std::function<double(double)> dinner) {
    ChainMapSpec spec;
    spec.n = 1;
    spec.N = 1;
    spec.P = {outer};
    spec.F = [inner](const Vec& x) {
        Vec y(1);
        y[0] = inner(x[0]);
        return y;
    };
    spec.dF = [dinner](const Vec& x) {
        Mat J(1, 1);
        J(0, 0) = dinner(x[0]);
        return J;
    };
    return spec;
}

ChainMapSpec identity_chain(int n, const std::vector<Polynomial>& P) {
    ChainMapSpec spec;
    spec.n = n;
    spec.N = n;
    spec.P = P;
    spec.F = [](const Vec& x) { return x; };
    spec.dF = [n](const Vec&) { return Mat::Identity(n, n); };
    return spec;
}

std::vector<Vec> scalar_targets(std::initializer_list<double> vals) {
    std::vector<Vec> out;
    for (double v : vals) {
        Vec b(1);
        b[0] = v;
        out.push_back(b);
    }
    return out;
}

StratumSample umbrella_sheet() {
    const int d = 3;
    auto X = Polynomial::variable(0, d);
    auto Y = Polynomial::variable(1, d);
    auto Z = Polynomial::variable(2, d);
    StratumSample s;
    s.equations = {Y * Y - Z * X * X};
    s.inequalities = {X * X};
    s.dimension = 2;
    s.name = "umbrella sheet";
    return s;
}

} // namespace

TEST_CASE("geometric multiplicity of x -> x^2 at 0 is two") {
    Polynomial u2(1);
    u2.add_term({2}, 1.0);
    auto spec = scalar_chain(
        u2, [](double x) { return x; }, [](double) { return 1.0; });
    const auto est = geometric_multiplicity(spec, 0.4,
                                            scalar_targets({0.01, -0.01, 0.04}));
    CHECK(est.value == 2);
}

TEST_CASE("geometric multiplicity of x -> x^3 at 0 is one") {
    Polynomial u3(1);
    u3.add_term({3}, 1.0);
    auto spec = scalar_chain(
        u3, [](double x) { return x; }, [](double) { return 1.0; });
    const auto est = geometric_multiplicity(spec, 0.4,
                                            scalar_targets({0.001, -0.001}));
    CHECK(est.value == 1);
}

TEST_CASE("pleat map reaches multiplicity three near the cusp") {
    // P(x, y) = (x, y^3 - x y), inner identity on R^2
    const int d = 2;
    auto X = Polynomial::variable(0, d);
    auto Y = Polynomial::variable(1, d);
    auto spec = identity_chain(2, {X, Y * Y * Y - X * Y});
    std::vector<Vec> targets;
    for (double a : {0.02, 0.04}) {
        const double bump = 2.0 * std::pow(a / 3.0, 1.5);
        Vec b(2);
        b << a, 0.5 * bump;
        targets.push_back(b);
        b << a, -0.5 * bump;
        targets.push_back(b);
    }
    const auto est = geometric_multiplicity(spec, 0.6, targets, 300);
    CHECK(est.value == 3);
}

TEST_CASE("linearize_compare on the three-dimensional level-line model") {
    // P = (x^2 + y^2, x y): level sets are four vertical lines; F is a
    // transverse affine embedding of R^2 into R^3
    const int N = 3;
    auto X = Polynomial::variable(0, N);
    auto Y = Polynomial::variable(1, N);
    ChainMapSpec spec;
    spec.n = 2;
    spec.N = 3;
    spec.P = {X * X + Y * Y, X * Y};
    spec.F = [](const Vec& u) {
        Vec y(3);
        y << u[0], u[1], 0.3 + 0.2 * u[0] - 0.1 * u[1];
        return y;
    };
    spec.dF = [](const Vec&) {
        Mat J(3, 2);
        J << 1, 0, 0, 1, 0.2, -0.1;
        return J;
    };
    const auto cmp = linearize_compare(spec, {1e-2, 1e-5}, 0.5);
    CHECK(cmp.count_f == 4);
    CHECK(cmp.count_linear == 4);
    CHECK(cmp.equal);
    CHECK(cmp.bezout_bound == 4);
    CHECK(cmp.count_linear <= cmp.bezout_bound);
    CHECK(cmp.homotopy_constant);
    REQUIRE(cmp.homotopy_counts.size() == 5);
    for (int c : cmp.homotopy_counts) CHECK(c == 4);
}

TEST_CASE("linearize_compare with a genuinely nonlinear inner map") {
    const int N = 3;
    auto X = Polynomial::variable(0, N);
    auto Y = Polynomial::variable(1, N);
    ChainMapSpec spec;
    spec.n = 2;
    spec.N = 3;
    spec.P = {X * X + Y * Y, X * Y};
    spec.F = [](const Vec& u) {
        Vec y(3);
        y << u[0] + 0.3 * u[0] * u[1], u[1] - 0.2 * u[0] * u[0],
            0.3 + 0.2 * u[0];
        return y;
    };
    spec.dF = [](const Vec& u) {
        Mat J(3, 2);
        J << 1 + 0.3 * u[1], 0.3 * u[0], -0.4 * u[0], 1, 0.2, 0;
        return J;
    };
    const auto cmp = linearize_compare(spec, {1e-2, 1e-5}, 0.5);
    CHECK(cmp.count_f == cmp.count_linear);
    CHECK(cmp.homotopy_constant);
    CHECK(cmp.count_f == 4);
}

TEST_CASE("linear maps compare trivially; monotone cubic counts one") {
    Polynomial id1 = Polynomial::variable(0, 1);
    auto spec = scalar_chain(
        id1, [](double x) { return x + x * x * x; },
        [](double x) { return 1.0 + 3.0 * x * x; });
    const auto cmp = linearize_compare(spec, {1e-3}, 0.5);
    CHECK(cmp.count_f == 1);
    CHECK(cmp.count_linear == 1);
    CHECK(cmp.equal);
}

TEST_CASE("cone membership") {
    ConeSpec cone;
    cone.n = 2;
    cone.m = 2;
    cone.delta = 0.1;
    CHECK(cone_membership(cone, {0.05, 0.001}));  // 0.001 < 0.05^2 = 0.0025
    CHECK_FALSE(cone_membership(cone, {0.05, 0.01}));
    CHECK_FALSE(cone_membership(cone, {0.0, 0.001})); // strict lower bounds
    CHECK_FALSE(cone_membership(cone, {0.05, 0.0}));
    CHECK_FALSE(cone_membership(cone, {0.2, 0.001})); // |a_1| >= delta
}

TEST_CASE("cone refinement: member of the finer cone lies in the coarser") {
    auto g = rng::stream(61, "cone");
    ConeSpec coarse{3, 1, 0.2, false};
    ConeSpec fine{3, 2, 0.05, false};
    int hits = 0;
    for (int t = 0; t < 500; ++t) {
        // sample inside the fine cone directly
        std::vector<double> a(3);
        a[0] = rng::uniform(g, 1e-6, fine.delta);
        double running = a[0];
        for (int j = 1; j < 3; ++j) {
            const double bound = std::pow(running, fine.m);
            a[j] = rng::uniform(g, bound * 1e-6, bound * 0.999) *
                   (rng::uniform(g, -1.0, 1.0) > 0 ? 1.0 : -1.0);
            running *= std::abs(a[j]);
        }
        if (cone_membership(fine, a)) {
            ++hits;
            CHECK(cone_membership(coarse, a));
        }
    }
    CHECK(hits > 400);
}

TEST_CASE("limiting set of the triangular product map") {
    const int n = 3;
    auto x1 = Polynomial::variable(0, n);
    auto x2 = Polynomial::variable(1, n);
    auto x3 = Polynomial::variable(2, n);
    const std::vector<Polynomial> P{x1, x1 * x2, x1 * x2 * x3};
    const std::vector<double> ladder{0.1, 0.03, 0.01, 3e-3};

    ConeSpec full{3, 2, 0.1, false};
    const auto good = limiting_set_sample(P, full, ladder, 120);
    CHECK(good.local_dimension == 0);

    ConeSpec defective{3, 2, 0.1, true};
    const auto bad = limiting_set_sample(P, defective, ladder, 120);
    CHECK(bad.local_dimension == 1);
}

TEST_CASE("limiting set of a linear bijection is a point") {
    const int n = 2;
    auto x = Polynomial::variable(0, n);
    auto y = Polynomial::variable(1, n);
    const std::vector<Polynomial> P{x + y, x - y};
    ConeSpec cone{2, 1, 0.1, false};
    const auto rep = limiting_set_sample(P, cone, {0.1, 0.02, 4e-3}, 120);
    CHECK(rep.local_dimension == 0);
    for (const auto& q : rep.cloud) CHECK(q.norm() <= 0.2);
}

TEST_CASE("a-regularity fails on the coarse umbrella partition") {
    const int d = 3;
    auto X = Polynomial::variable(0, d);
    auto Y = Polynomial::variable(1, d);
    StratumSample axis;
    axis.equations = {X, Y};
    axis.dimension = 1;
    axis.name = "z-axis";

    Vec origin = Vec::Zero(3);
    Vec dir(3);
    dir << 1.0, 0.0, 0.0;
    const auto res = a_regularity_test(umbrella_sheet(), axis, origin,
                                       radial_generator(origin, dir));
    CHECK(res.verdict == Verdict::FAIL);
    CHECK(!res.witness_sequence.empty());
    CHECK(res.offending_angle > 1e-2);
    // the witness sequence is the (x_n, 0, 0) family
    for (const auto& w : res.witness_sequence) {
        CHECK(std::abs(w[1]) <= 1e-12);
        CHECK(std::abs(w[2]) <= 1e-12);
    }
}

TEST_CASE("a-regularity passes after the refinement") {
    const int d = 3;
    auto X = Polynomial::variable(0, d);
    auto Y = Polynomial::variable(1, d);
    auto Z = Polynomial::variable(2, d);
    StratumSample punctured;
    punctured.equations = {X, Y};
    punctured.inequalities = {Z};
    punctured.dimension = 1;
    punctured.name = "punctured z-axis";

    Vec p(3);
    p << 0.0, 0.0, 0.5;
    const double sq = std::sqrt(0.5);
    auto gen = path_generator(
        [sq](double t) {
            Vec v(3);
            v << t, t * sq, 0.5;
            return v;
        },
        0.4, 0.6);
    const auto res = a_regularity_test(umbrella_sheet(), punctured, p, gen);
    CHECK(res.verdict == Verdict::PASS);
}

TEST_CASE("a-regularity passes trivially for an affine plane over a line") {
    const int d = 3;
    auto Y = Polynomial::variable(1, d);
    auto Z = Polynomial::variable(2, d);
    StratumSample plane;
    plane.equations = {Z};
    plane.dimension = 2;
    StratumSample line;
    line.equations = {Y, Z};
    line.dimension = 1;
    Vec origin = Vec::Zero(3);
    Vec dir(3);
    dir << 0.3, 1.0, 0.0;
    const auto res =
        a_regularity_test(plane, line, origin, radial_generator(origin, dir));
    CHECK(res.verdict == Verdict::PASS);
}

TEST_CASE("thom map fails the rank precheck") {
    const int d = 2;
    auto X = Polynomial::variable(0, d);
    auto Y = Polynomial::variable(1, d);
    StratumSample off_line;
    off_line.inequalities = {X * X};
    off_line.dimension = 2;
    StratumSample line;
    line.equations = {X};
    line.dimension = 1;
    Vec origin = Vec::Zero(2);
    Vec dir(2);
    dir << 1.0, 0.3;
    const auto res = ap_regularity_test(off_line, line, {X, X * Y}, origin,
                                        radial_generator(origin, dir));
    CHECK(res.verdict == Verdict::FAIL);
    CHECK(res.precheck_failed);
    CHECK(res.d_small == 1);
    CHECK(res.d_big == 0);
}

TEST_CASE("grinberg variety passes the precheck but fails a_P") {
    const int d = 4; // (x, y, z, t)
    auto X = Polynomial::variable(0, d);
    auto Y = Polynomial::variable(1, d);
    auto Z = Polynomial::variable(2, d);
    auto T = Polynomial::variable(3, d);
    StratumSample big;
    big.equations = {X * X - T * T * Y - Z};
    big.inequalities = {T * T};
    big.dimension = 3;
    StratumSample small;
    small.equations = {X, Z, T};
    small.dimension = 1;
    Vec p(4);
    p << 0.0, 0.7, 0.0, 0.0;
    const double a = 0.7;
    auto gen = path_generator(
        [a](double s) {
            Vec v(4);
            v << s * s, a + s * s, -a * s * s, s;
            return v;
        },
        0.5, 0.6);
    const auto res = ap_regularity_test(big, small, {Z, T}, p, gen);
    CHECK_FALSE(res.precheck_failed);
    CHECK(res.d_small == 1);
    CHECK(res.d_big == 1);
    CHECK(res.verdict == Verdict::FAIL);
    CHECK(!res.witness_sequence.empty());
}

TEST_CASE("umbrella under the vertical projection fails the rank precheck") {
    // The level sets of (x, y) on the punctured axis are 1-dimensional but
    // 0-dimensional on the sheet, so no a_P relation can hold there.
    const int d = 3;
    auto X = Polynomial::variable(0, d);
    auto Y = Polynomial::variable(1, d);
    auto Z = Polynomial::variable(2, d);
    StratumSample punctured;
    punctured.equations = {X, Y};
    punctured.inequalities = {Z};
    punctured.dimension = 1;
    Vec p(3);
    p << 0.0, 0.0, 0.5;
    const double sq = std::sqrt(0.5);
    auto gen = path_generator(
        [sq](double t) {
            Vec v(3);
            v << t, t * sq, 0.5;
            return v;
        },
        0.4, 0.6);
    const auto res =
        ap_regularity_test(umbrella_sheet(), punctured, {X, Y}, p, gen);
    CHECK(res.precheck_failed);
    CHECK(res.verdict == Verdict::FAIL);
    CHECK(res.d_small == 1);
    CHECK(res.d_big == 0);
}

TEST_CASE("projection onto strata respects the inequalities") {
    auto sheet = umbrella_sheet();
    Vec on_axis(3);
    on_axis << 0.0, 0.0, 0.3; // violates x != 0
    CHECK_FALSE(project_to_stratum(sheet, on_axis).has_value());
    Vec near_sheet(3);
    near_sheet << 0.4, 0.21, 0.25; // y^2 ~ z x^2 at (0.4, 0.2, 0.25)
    const auto proj = project_to_stratum(sheet, near_sheet);
    REQUIRE(proj.has_value());
    const double resid =
        (*proj)[1] * (*proj)[1] - (*proj)[2] * (*proj)[0] * (*proj)[0];
    CHECK(std::abs(resid) <= 1e-9);
}
