#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polylab/errors.hpp"
#include "polylab/perturb.hpp"
#include "polylab/rng.hpp"

using namespace polylab;
using namespace polylab::perturb;

namespace {

IntervalMap square_map() {
    IntervalMap m;
    m.f = [](double x) { return x * x; };
    m.df = [](double x) { return 2.0 * x; };
    m.lo = -1.0;
    m.hi = 1.0;
    m.c1_norm = 2.0;
    m.name = "square";
    return m;
}

// random cubic that maps [-1,1] into itself, with its derivative
IntervalMap random_selfmap(std::mt19937_64& g) {
    for (;;) {
        const double a = rng::uniform(g, -0.3, 0.3);
        const double b = rng::uniform(g, -0.8, 0.8);
        const double c = rng::uniform(g, -0.4, 0.4);
        const double d = rng::uniform(g, -0.4, 0.4);
        IntervalMap m = cubic_map(a, b, c, d);
        bool inside = true;
        for (int i = 0; i <= 256; ++i) {
            const double x = -1.0 + 2.0 * i / 256.0;
            if (std::abs(m.f(x)) > 0.98) inside = false;
        }
        if (inside) return m;
    }
}

} // namespace

TEST_CASE("iterate") {
    const auto sq = square_map();
    const auto t = iterate(sq, 0.5, 2);
    CHECK(t.points == std::vector<double>{0.5, 0.25, 0.0625});

    const auto fixed = iterate(sq, 0.0, 5);
    for (double x : fixed.points) CHECK(x == 0.0);

    const auto lg = logistic_map();
    const auto lt = iterate(lg, 0.3, 3);
    CHECK(lt.points[1] == doctest::Approx(0.84).epsilon(1e-12));
    CHECK(lt.points[2] == doctest::Approx(0.5376).epsilon(1e-12));
    CHECK(lt.points[3] == doctest::Approx(0.99434496).epsilon(1e-10));
}

TEST_CASE("iterate reports the first escaping index") {
    IntervalMap m;
    m.f = [](double x) { return x + 0.6; };
    m.df = [](double) { return 1.0; };
    m.c1_norm = 2.0;
    try {
        iterate(m, 0.5, 3);
        FAIL("expected escape");
    } catch (const DomainError& e) {
        CHECK(e.code() == "orbit_escape");
        CHECK(e.data().at("index") == 1.0);
    }
}

TEST_CASE("interval map validation") {
    auto ok = logistic_map();
    CHECK_NOTHROW(validate_interval_map(ok));
    ok.c1_norm = 1.0; // below sup |f'| = 4
    CHECK_THROWS_AS(validate_interval_map(ok), PreconditionError);
}

TEST_CASE("closing the (x^2, 0.5, n=2) trajectory gives u = -1.75") {
    const auto sq = square_map();
    const auto traj = iterate(sq, 0.5, 2);
    const auto closed = close_orbit(sq, traj);
    CHECK(closed.u == doctest::Approx(-1.75));
    // f~ swaps 0.5 -> 0.25 -> 0.5
    CHECK(closed.map(0.5) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(closed.map(0.25) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("already periodic trajectories close with u = 0") {
    IntervalMap neg;
    neg.f = [](double x) { return -x; };
    neg.df = [](double) { return -1.0; };
    neg.c1_norm = 1.0;
    const auto t = iterate(neg, 0.3, 2); // (0.3, -0.3, 0.3)
    const auto closed = close_orbit(neg, t);
    CHECK(closed.u == 0.0);
    CHECK(closed.map(0.77) == doctest::Approx(-0.77));
}

TEST_CASE("|u| equals |x_0 - x_n| / diagonal distance") {
    auto g = rng::stream(31, "closing-u");
    for (int t = 0; t < 25; ++t) {
        const auto m = random_selfmap(g);
        const double x0 = rng::uniform(g, -0.9, 0.9);
        const int n = 2 + static_cast<int>(rng::uniform(g, 0.0, 6.0));
        const auto traj = iterate(m, x0, n);
        double denom = 1.0;
        const auto& x = traj.points;
        for (int k = 0; k + 1 < n; ++k) denom *= (x[n - 1] - x[k]);
        if (std::abs(denom) < 1e-4) continue;
        const auto closed = close_orbit(m, traj);
        CHECK(std::abs(closed.u) ==
              doctest::Approx(std::abs(x[0] - x[n]) / std::abs(denom)));
    }
}

TEST_CASE("closing property on random maps") {
    auto g = rng::stream(32, "closing");
    int tested = 0;
    while (tested < 40) {
        const auto m = random_selfmap(g);
        const double x0 = rng::uniform(g, -0.9, 0.9);
        const int n = 2 + static_cast<int>(rng::uniform(g, 0.0, 13.0));
        Trajectory traj;
        try {
            traj = iterate(m, x0, n);
        } catch (const DomainError&) {
            continue;
        }
        double denom = 1.0;
        for (int k = 0; k + 1 < n; ++k)
            denom *= (traj.points[n - 1] - traj.points[k]);
        if (std::abs(denom) < 1e-4) continue;
        const auto closed = close_orbit(m, traj);
        // the first n-1 transitions are preserved bit-for-bit
        for (int k = 0; k + 1 < n; ++k)
            CHECK(closed.map(traj.points[k]) == traj.points[k + 1]);
        // and the orbit closes
        double x = traj.points[0];
        for (int k = 0; k < n; ++k) x = closed.map(x);
        CHECK(std::abs(x - traj.points[0]) <= 1e-10);
        ++tested;
    }
}

TEST_CASE("closing refuses near-diagonal trajectories") {
    const auto sq = square_map();
    Trajectory t;
    t.points = {0.4, 0.4 + 1e-14, 0.3};
    CHECK_THROWS_AS(close_orbit(sq, t), DomainError);
}

TEST_CASE("push_hyperbolicity leaves hyperbolic orbits alone") {
    const auto sq = square_map();
    Trajectory t;
    t.points = {0.0}; // fixed point with f' = 0: |0| - 1 = -1, already > 0.5
    const auto push = push_hyperbolicity(sq, t, 0.5);
    CHECK(push.v == 0.0);
}

TEST_CASE("push_hyperbolicity moves the derivative product out of the band") {
    auto g = rng::stream(33, "push");
    for (int t = 0; t < 25; ++t) {
        const auto m = random_selfmap(g);
        const double x0 = rng::uniform(g, -0.9, 0.9);
        const int n = 1 + static_cast<int>(rng::uniform(g, 0.0, 4.0));
        Trajectory traj;
        try {
            traj = iterate(m, x0, n - 1);
        } catch (const DomainError&) {
            continue;
        }
        double partial = 1.0;
        for (int k = 0; k + 1 < n; ++k) partial *= m.df(traj.points[k]);
        if (std::abs(partial) < 1e-6) continue;
        const double gamma = 0.2;
        const auto push = push_hyperbolicity(m, traj, gamma);
        // derivative of the pushed map along the same orbit
        double prod = 1.0;
        for (int k = 0; k < n; ++k) prod *= push.map.deriv(traj.points[k]);
        CHECK(prod == doctest::Approx(push.derivative_product).epsilon(1e-9));
        CHECK(std::abs(std::abs(prod) - 1.0) > gamma);
        // the trajectory itself is untouched
        for (int k = 0; k + 1 < n; ++k)
            CHECK(push.map(traj.points[k]) == traj.points[k + 1]);
    }
}

TEST_CASE("push_hyperbolicity n=1 reduces to f(x) + v(x - x_0)") {
    const auto sq = square_map();
    Trajectory t;
    t.points = {0.5}; // f'(0.5) = 1: not hyperbolic for gamma = 0.3
    const auto push = push_hyperbolicity(sq, t, 0.3);
    CHECK(push.v != 0.0);
    CHECK(push.map.deriv(0.5) == doctest::Approx(1.0 + push.v));
    CHECK(std::abs(std::abs(push.map.deriv(0.5)) - 1.0) > 0.3);
}

TEST_CASE("non-interference: perturbations vanish exactly on the orbit head") {
    auto g = rng::stream(34, "noninterference");
    const auto m = random_selfmap(g);
    const auto traj = iterate(m, 0.4, 4);
    const auto closed = close_orbit(m, traj);
    for (int k = 0; k <= 2; ++k)
        CHECK(closed.map(traj.points[k]) == m.f(traj.points[k]));
    Trajectory head;
    head.points.assign(traj.points.begin(), traj.points.begin() + 4);
    const auto push = push_hyperbolicity(m, head, 5.0);
    for (int k = 0; k <= 2; ++k) {
        CHECK(push.map(traj.points[k]) == m.f(traj.points[k]));
        CHECK(push.map.deriv(traj.points[k]) == m.df(traj.points[k]));
    }
    CHECK(push.map(traj.points[3]) == m.f(traj.points[3]));
}

TEST_CASE("hyperbolicity values and exclusion radius") {
    const auto sq = square_map();
    const auto r1 = hyperbolicity(sq, 0.0, 1, 0.5);
    CHECK(r1.value == doctest::Approx(1.0));
    CHECK(r1.periodic);
    REQUIRE(r1.exclusion_radius.has_value());
    CHECK(*r1.exclusion_radius == doctest::Approx(0.5 / 2.0));

    const auto half = halving_map();
    const auto r3 = hyperbolicity(half, 0.0, 3, 0.5);
    CHECK(r3.value == doctest::Approx(7.0 / 8.0));

    const auto off = hyperbolicity(sq, 0.3, 1, 0.5);
    CHECK_FALSE(off.periodic);
    CHECK_FALSE(off.exclusion_radius.has_value());
}

TEST_CASE("count_periodic on the logistic map, small periods") {
    const auto lg = logistic_map();
    const auto p1 = count_periodic(lg, 1, 1000000);
    CHECK(p1.count == 2);
    REQUIRE(p1.locations.size() == 2);
    CHECK(p1.locations[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(p1.locations[1] == doctest::Approx(0.75).epsilon(1e-9));

    const auto p2 = count_periodic(lg, 2, 1000000);
    CHECK(p2.count == 4);

    const auto p2min = count_periodic(lg, 2, 1000000, true);
    CHECK(p2min.count == 2); // the genuine 2-cycle only

    const auto half = halving_map();
    for (int n = 1; n <= 4; ++n)
        CHECK(count_periodic(half, n, 100000).count == 1);
}

TEST_CASE("exclusion radius is honored by the grid scan") {
    const auto lg = logistic_map();
    for (int n = 1; n <= 4; ++n) {
        const auto pc = count_periodic(lg, n, 1000000);
        for (double x : pc.locations) {
            const auto h = hyperbolicity(lg, x, n, 1e-3, 1e-7);
            if (!h.exclusion_radius) continue;
            const double gamma = 0.9 * h.value;
            const double radius = gamma * std::pow(lg.c1_norm, -n);
            for (double y : pc.locations) {
                if (y == x) continue;
                CHECK(std::abs(y - x) > radius);
            }
        }
    }
}

TEST_CASE("growth experiment refuses overflowing horizons") {
    const auto lg = logistic_map(); // c1_norm = 16
    CHECK_THROWS_AS(growth_experiment({lg}, 300, 0.0,
                                      [](int) { return 1000LL; }),
                    DomainError);
}

TEST_CASE("growth table") {
    const auto half = halving_map();
    auto table = growth_experiment({half}, 6, 0.0,
                                   [](int) { return 200000LL; });
    REQUIRE(table.rows.size() == 6);
    for (const auto& row : table.rows) CHECK(row.count == 1);
    CHECK(table.fitted_c[0] == 0.0);

    const auto empty = growth_experiment({}, 5, 0.0, [](int) { return 1000LL; });
    CHECK(empty.rows.empty());
    CHECK(empty.fitted_c.empty());
}

TEST_CASE("perturbed-map derivative matches central differences") {
    auto g = rng::stream(35, "derivcheck");
    const auto m = random_selfmap(g);
    PerturbedMap pm;
    pm.base = m;
    pm.terms.push_back({0.37, {0.1, -0.4, 0.1}});
    pm.terms.push_back({-1.2, {0.55}});
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        const double x = rng::uniform(g, -0.9, 0.9);
        const double fd = (pm(x + h) - pm(x - h)) / (2.0 * h);
        CHECK(std::abs(pm.deriv(x) - fd) <= 1e-6);
    }
}
