#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polylab/errors.hpp"
#include "polylab/normalforms.hpp"
#include "polylab/rng.hpp"

using namespace polylab;
using namespace polylab::normalforms;

namespace {

// Smu with m = n = 1, mu = 1, P(u) = u + 1: the defining relation
// integrates to y^2/(1+y) = x/(1+x), solvable in closed form.
Smu resonant_saddle() {
    Smu s;
    s.m = 1;
    s.n = 1;
    s.mu = 1;
    s.sign = 1;
    s.weierstrass = {1.0};
    s.lambda_top = 0.0;
    return s;
}

double resonant_saddle_oracle(double x) {
    const double c = x / (1.0 + x);
    return 0.5 * (c + std::sqrt(c * c + 4.0 * c));
}

Dc half_pi_node() {
    Dc d;
    d.mu = 1;
    d.sign = 1;
    d.weierstrass = {1.0}; // Q(u) = u^2 + 1
    d.lambda_top = 0.0;
    return d;
}

} // namespace

TEST_CASE("S0 correspondence is the power law") {
    S0 s{0.5};
    CHECK(correspondence(s, 0.25) == doctest::Approx(0.5));
    CHECK(correspondence_derivative(s, 0.25) ==
          doctest::Approx(0.5 * std::pow(0.25, -0.5)));
    CHECK_THROWS_AS(correspondence(S0{0.5}, -1.0), PreconditionError);
}

TEST_CASE("Dc constant is pi/2 for Q = u^2 + 1") {
    const auto d = half_pi_node();
    const double C = correspondence(d, 1.0);
    CHECK(std::abs(C - M_PI / 2.0) <= 1e-8);
    CHECK(correspondence(d, 0.4) == doctest::Approx(0.4 * C));
    CHECK(correspondence_derivative(d, -0.3) == doctest::Approx(C));
}

TEST_CASE("Dh at x = 1 is the empty integral") {
    Dh h;
    h.mu = 1;
    h.sign = 1;
    h.weierstrass = {1.0};
    h.lambda_top = 0.0;
    CHECK(correspondence(h, 1.0) == doctest::Approx(1.0));
    // derivative from the defining relation: y' = y / Q(x)
    const double x = 0.6;
    const double y = correspondence(h, x);
    CHECK(correspondence_derivative(h, x) ==
          doctest::Approx(y / (x * x + 1.0)));
}

TEST_CASE("Smu correspondence matches the closed-form oracle") {
    const auto s = resonant_saddle();
    for (double x : {0.1, 0.3, 0.7, 1.3}) {
        CHECK(correspondence(s, x) ==
              doctest::Approx(resonant_saddle_oracle(x)).epsilon(1e-9));
    }
    // implicit derivative against a central difference of the oracle
    const double x = 0.5, h = 1e-6;
    const double fd =
        (resonant_saddle_oracle(x + h) - resonant_saddle_oracle(x - h)) / (2 * h);
    CHECK(correspondence_derivative(s, x) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("quadrature refuses poles on the integration range") {
    Dc d;
    d.mu = 1;
    d.sign = 1;
    d.weierstrass = {-0.25}; // Q(u) = u^2 - 0.25, poles at +-0.5
    d.lambda_top = 0.0;
    try {
        correspondence(d, 1.0);
        FAIL("expected a pole error");
    } catch (const DomainError& e) {
        CHECK(e.code() == "pole");
        CHECK(std::abs(std::abs(e.data().at("pole")) - 0.5) <= 1e-6);
    }
}

TEST_CASE("pfaffian residual vanishes on S0 graphs") {
    for (double lambda : {0.5, 1.7, std::sqrt(2.0)}) {
        S0 s{lambda};
        for (double x = 0.1; x <= 0.9; x += 0.1) {
            CHECK(std::abs(pfaffian_residual(s, x, 1e-5)) <= 1e-8);
        }
    }
}

TEST_CASE("pfaffian residual vanishes for Dc and the negative control fails") {
    const auto d = half_pi_node();
    CHECK(std::abs(pfaffian_residual(d, 0.5, 1e-5)) <= 1e-9);

    // wrong graph y = x^{lambda + 0.1} under the S0 lambda form
    const double lambda = 0.8;
    S0 s{lambda};
    const double x = 0.5;
    const double h = 1e-5;
    auto wrong = [&](double t) { return std::pow(t, lambda + 0.1); };
    const auto w = pfaffian_form(s, x, wrong(x));
    const double residual = w.P + w.Q * (wrong(x + h) - wrong(x - h)) / (2 * h);
    CHECK(std::abs(residual) > 1e-3);
}

TEST_CASE("pfaffian residual decays at least linearly in h") {
    const auto s = resonant_saddle();
    const auto d = half_pi_node();
    auto g = rng::stream(41, "residual");
    for (int t = 0; t < 10; ++t) {
        const double x = rng::uniform(g, 0.2, 0.8);
        const double base_s = std::abs(pfaffian_residual(s, x, 1e-2));
        const double base_d = std::abs(pfaffian_residual(d, x, 1e-2));
        for (double h : {1e-3, 1e-4}) {
            CHECK(std::abs(pfaffian_residual(s, x, h)) <=
                  (base_s + 1e-9) * (h / 1e-2) * 10.0);
            CHECK(std::abs(pfaffian_residual(d, x, h)) <=
                  (base_d + 1e-9) * (h / 1e-2) * 10.0);
        }
    }
}

TEST_CASE("S0 flow keeps x y^lambda constant") {
    // integrate xdot = l1 x, ydot = -l2 y with RK4 and track u = x y^l
    const double l1 = 0.7, l2 = 1.3;
    const double lambda = l1 / l2;
    double x = 0.8, y = 1.1;
    const double u0 = x * std::pow(y, lambda);
    const double dt = 1e-3;
    for (int step = 0; step < 5000; ++step) {
        auto fx = [&](double xv) { return l1 * xv; };
        auto fy = [&](double yv) { return -l2 * yv; };
        const double k1x = fx(x), k1y = fy(y);
        const double k2x = fx(x + 0.5 * dt * k1x), k2y = fy(y + 0.5 * dt * k1y);
        const double k3x = fx(x + 0.5 * dt * k2x), k3y = fy(y + 0.5 * dt * k2y);
        const double k4x = fx(x + dt * k3x), k4y = fy(y + dt * k3y);
        x += dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
        y += dt / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    }
    CHECK(std::abs(x * std::pow(y, lambda) - u0) <= 1e-8);
}

TEST_CASE("two saddles with identity connectors compose to x^4") {
    PolycycleModel model;
    model.vertices = {S0{2.0}, S0{2.0}};
    model.connectors = {affine_connector(1.0, 0.0), affine_connector(1.0, 0.0)};
    for (double x : {0.2, 0.5, 0.8}) {
        const auto r = compose_polycycle(model, x);
        CHECK(r.value == doctest::Approx(std::pow(x, 4.0)).epsilon(1e-12));
        CHECK(r.derivative ==
              doctest::Approx(4.0 * std::pow(x, 3.0)).epsilon(1e-12));
    }
}

TEST_CASE("doubling connector gives 4x^4 with one interior fixed point") {
    PolycycleModel model;
    model.vertices = {S0{2.0}, S0{2.0}};
    model.connectors = {affine_connector(2.0, 0.0), affine_connector(1.0, 0.0)};
    const auto r = compose_polycycle(model, 0.3);
    CHECK(r.value == doctest::Approx(4.0 * std::pow(0.3, 4.0)).epsilon(1e-12));

    // unique interior fixed point at (1/4)^{1/3}
    const auto report = count_limit_cycles(model, {0.0}, 1e-4, 0.99);
    REQUIRE(report.counts.size() == 1);
    CHECK(report.counts[0] == 1);
    CHECK(report.roots[0][0].x ==
          doctest::Approx(std::pow(0.25, 1.0 / 3.0)).epsilon(1e-6));
}

TEST_CASE("single saddle with lambda 1 composes to the identity") {
    PolycycleModel model;
    model.vertices = {S0{1.0}};
    model.connectors = {affine_connector(1.0, 0.0)};
    for (double x : {0.1, 0.4, 0.9})
        CHECK(compose_polycycle(model, x).value == doctest::Approx(x));
    // displaced identity has no solutions
    const auto report = count_limit_cycles(model, {1e-3}, 1e-4, 0.99);
    CHECK(report.counts[0] == 0);
}

TEST_CASE("limit-cycle count for the 4x^4 model is stable across the cascade") {
    PolycycleModel model;
    model.vertices = {S0{2.0}, S0{2.0}};
    model.connectors = {affine_connector(2.0, 0.0), affine_connector(1.0, 0.0)};
    const auto report = count_limit_cycles(model, {1e-3, 1e-4}, 1e-4, 0.99);
    CHECK(report.counts[0] == 1);
    CHECK(report.counts[1] == 1);
    CHECK(report.stable);
    CHECK(report.roots[0][0].regular);
}

TEST_CASE("contraction has no displaced solutions") {
    PolycycleModel model; // Delta(x) = x^4 < x on (0,1)
    model.vertices = {S0{2.0}, S0{2.0}};
    model.connectors = {affine_connector(1.0, 0.0), affine_connector(1.0, 0.0)};
    const auto report = count_limit_cycles(model, {1e-3}, 1e-4, 0.9);
    CHECK(report.counts[0] == 0);
}

TEST_CASE("cascade must decrease by the configured ratio") {
    PolycycleModel model;
    model.vertices = {S0{2.0}};
    model.connectors = {affine_connector(1.0, 0.0)};
    CHECK_THROWS_AS(count_limit_cycles(model, {1e-3, 5e-4}, 1e-4, 0.9),
                    PreconditionError);
}

TEST_CASE("stage escape names the stage") {
    PolycycleModel model;
    model.vertices = {S0{2.0}, S0{2.0}};
    model.connectors = {affine_connector(1.0, -2.0), // pushes x negative
                        affine_connector(1.0, 0.0)};
    try {
        compose_polycycle(model, 0.5);
        FAIL("expected stage escape");
    } catch (const DomainError& e) {
        CHECK(e.code() == "stage_escape");
        CHECK(e.data().at("stage") == 1.0);
    }
}

TEST_CASE("validation rejects malformed specs") {
    CHECK_THROWS_AS(correspondence(S0{-1.0}, 0.5), PreconditionError);
    Smu bad = resonant_saddle();
    bad.m = 2;
    bad.n = 4; // not coprime
    CHECK_THROWS_AS(correspondence(bad, 0.5), PreconditionError);
    Dc short_list;
    short_list.mu = 2;
    short_list.weierstrass = {1.0}; // needs length 2
    CHECK_THROWS_AS(correspondence(short_list, 0.5), PreconditionError);
}
