#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "polylab/abelint.hpp"
#include "polylab/errors.hpp"

using namespace polylab;
using namespace polylab::abelint;

namespace {

// H = (x^2 + y^2)/2 with the perturbation P = (1 - x^2) y, Q = 0;
// I(h) = -pi r^2 (1 - r^2/4) with r^2 = 2h.
HamiltonianProblem circle_problem() {
    HamiltonianProblem prob;
    prob.H = Polynomial(2);
    prob.H.add_term({2, 0}, 0.5);
    prob.H.add_term({0, 2}, 0.5);
    prob.P = Polynomial(2);
    prob.P.add_term({0, 1}, 1.0);
    prob.P.add_term({2, 1}, -1.0);
    prob.Q = Polynomial(2);
    prob.working_box = 4.0;
    return prob;
}

double circle_formula(double h) {
    const double r2 = 2.0 * h;
    return -M_PI * r2 * (1.0 - r2 / 4.0);
}

Vec seed_at(double x, double y) {
    Vec s(2);
    s << x, y;
    return s;
}

double polyline_length(const Oval& oval) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < oval.points.size(); ++i)
        acc += (oval.points[i + 1] - oval.points[i]).norm();
    return acc;
}

} // namespace

TEST_CASE("tracing the unit-circle level") {
    const auto prob = circle_problem();
    const auto oval = trace_oval(prob, 0.5, seed_at(0.9, 0.1));
    CHECK(std::abs(polyline_length(oval) - 2.0 * M_PI) <= 1e-5);
    // H residual along the polyline
    for (const auto& p : oval.points) {
        const double H = 0.5 * (p[0] * p[0] + p[1] * p[1]);
        CHECK(std::abs(H - 0.5) <= 1e-9);
    }
    CHECK(polygon_area(oval) > 0.0); // counterclockwise
}

TEST_CASE("degenerate level at the center is refused") {
    const auto prob = circle_problem();
    CHECK_THROWS_AS(trace_oval(prob, 0.0, seed_at(1e-9, 0.0)), DomainError);
}

TEST_CASE("two-well Hamiltonian has disjoint ovals at the same energy") {
    // H = y^2/2 + x^4/4 - x^2/2: wells at x = +-1 with H = -1/4
    HamiltonianProblem prob;
    prob.H = Polynomial(2);
    prob.H.add_term({0, 2}, 0.5);
    prob.H.add_term({4, 0}, 0.25);
    prob.H.add_term({2, 0}, -0.5);
    prob.P = Polynomial(2);
    prob.P.add_term({0, 1}, 1.0);
    prob.Q = Polynomial(2);

    const double h = -0.1;
    const auto left = trace_oval(prob, h, seed_at(-1.0, 0.1));
    const auto right = trace_oval(prob, h, seed_at(1.0, 0.1));
    double lmax = -1e9, rmin = 1e9;
    for (const auto& p : left.points) lmax = std::max(lmax, p[0]);
    for (const auto& p : right.points) rmin = std::min(rmin, p[0]);
    CHECK(lmax < 0.0);
    CHECK(rmin > 0.0);
}

TEST_CASE("abelian integral matches the closed-form circle values") {
    const auto prob = circle_problem();
    for (double h : {0.3, 0.5, 1.0, 1.7}) {
        const auto oval = trace_oval(prob, h, seed_at(std::sqrt(2 * h), 0.0));
        CHECK(std::abs(abelian_integral(prob, oval) - circle_formula(h)) <=
              1e-6 * std::max(1.0, std::abs(circle_formula(h))));
    }
}

TEST_CASE("zero perturbation integrates to zero") {
    auto prob = circle_problem();
    prob.P = Polynomial(2);
    prob.Q = Polynomial(2);
    const auto oval = trace_oval(prob, 0.5, seed_at(1.0, 0.0));
    CHECK(abelian_integral(prob, oval) == 0.0);
}

TEST_CASE("loop integral of y dx over the unit circle is -pi") {
    auto prob = circle_problem();
    prob.P = Polynomial(2);
    prob.P.add_term({0, 1}, 1.0); // P = y, Q = 0
    prob.Q = Polynomial(2);
    const auto oval = trace_oval(prob, 0.5, seed_at(1.0, 0.0));
    CHECK(std::abs(abelian_integral(prob, oval) + M_PI) <= 1e-6);
}

TEST_CASE("orientation reversal negates the integral") {
    const auto prob = circle_problem();
    auto oval = trace_oval(prob, 0.8, seed_at(std::sqrt(1.6), 0.0));
    const double fwd = abelian_integral(prob, oval);
    Oval reversed = oval;
    std::reverse(reversed.points.begin(), reversed.points.end());
    CHECK(std::abs(abelian_integral(prob, reversed) + fwd) <=
          1e-12 * std::abs(fwd));
}

TEST_CASE("green identity: loop of y dx equals minus the enclosed area") {
    auto prob = circle_problem();
    prob.P = Polynomial(2);
    prob.P.add_term({0, 1}, 1.0);
    prob.Q = Polynomial(2);
    for (double h : {0.4, 0.9}) {
        const auto oval =
            trace_oval(prob, h, seed_at(std::sqrt(2 * h), 0.0), 1e-3);
        CHECK(std::abs(abelian_integral(prob, oval) + polygon_area(oval)) <=
              1e-6);
    }
}

TEST_CASE("halving the step moves the integral by at most 1e-6 relative") {
    const auto prob = circle_problem();
    const auto coarse = trace_oval(prob, 0.5, seed_at(1.0, 0.0), 2e-3);
    const auto fine = trace_oval(prob, 0.5, seed_at(1.0, 0.0), 1e-3);
    const double a = abelian_integral(prob, coarse);
    const double b = abelian_integral(prob, fine);
    CHECK(std::abs(a - b) <= 1e-6 * std::abs(b));
}

TEST_CASE("count_zeros finds the zero of I(h) at h = 2") {
    const auto prob = circle_problem();
    std::vector<double> grid;
    for (int i = 0; i <= 12; ++i) grid.push_back(0.5 + i * 0.25);
    const auto rep = count_zeros(prob, grid, seed_at(1.0, 0.0), 1e-8);
    REQUIRE(rep.zeros.size() == 1);
    CHECK(std::abs(rep.zeros[0] - 2.0) <= 1e-6);
    CHECK_FALSE(rep.identically_zero);
}

TEST_CASE("exact forms are flagged as identically zero") {
    auto prob = circle_problem();
    // P dx + Q dy = d(x^2 y + y^3): exact, so I(h) == 0
    prob.P = Polynomial(2);
    prob.P.add_term({1, 1}, 2.0); // dW/dx with W = x^2 y + y^3
    prob.Q = Polynomial(2);
    prob.Q.add_term({2, 0}, 1.0);
    prob.Q.add_term({0, 2}, 3.0);
    std::vector<double> grid{0.3, 0.6, 0.9, 1.2};
    const auto rep = count_zeros(prob, grid, seed_at(std::sqrt(0.6), 0.0), 1e-8);
    CHECK(rep.identically_zero);
    CHECK(rep.zeros.empty());
}

TEST_CASE("constant-sign integrals produce no zeros") {
    auto prob = circle_problem();
    prob.P = Polynomial(2);
    prob.P.add_term({0, 1}, 1.0); // I(h) = -area < 0 for every h
    prob.Q = Polynomial(2);
    std::vector<double> grid{0.3, 0.6, 0.9};
    const auto rep = count_zeros(prob, grid, seed_at(std::sqrt(0.6), 0.0), 1e-8);
    CHECK(rep.zeros.empty());
    CHECK_FALSE(rep.identically_zero);
}
