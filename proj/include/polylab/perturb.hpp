#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace polylab::perturb {

// Self-map of an interval with first derivative and a user-supplied C^1
// bound. The bound must dominate the sampled sup of |f| and |f'|; it may
// be larger (exclusion radii only get more conservative).
struct IntervalMap {
    std::function<double(double)> f;
    std::function<double(double)> df;
    double lo = -1.0;
    double hi = 1.0;
    double c1_norm = 1.0;
    std::string name;
    // Optional raw hook for the grid scans; same function as f when set.
    double (*raw_f)(double) = nullptr;
};

// Checks f(I) within I and c1_norm >= sup sampled |f|,|f'| at the given
// resolution; throws PreconditionError otherwise.
void validate_interval_map(const IntervalMap& map, int samples = 2048);

struct Trajectory {
    std::vector<double> points; // x_0..x_n
};

// One Newton-basis term: coeff * prod_j (x - roots[j]). Roots are kept as a
// factor list (never expanded), so the perturbation vanishes exactly at them.
struct NewtonTerm {
    double coeff = 0.0;
    std::vector<double> roots;
};

struct PerturbedMap {
    IntervalMap base;
    std::vector<NewtonTerm> terms;

    double operator()(double x) const;
    double deriv(double x) const;
    // Interval map view with a resampled C^1 bound.
    IntervalMap as_interval_map(int samples = 2048) const;
};

Trajectory iterate(const IntervalMap& map, double x0, int n);

// Baby closing: f~(x) = f(x) + u * prod_{k<=n-2}(x - x_k) with
// u = (x_0 - x_n) / prod_{k<=n-2}(x_{n-1} - x_k), so that f~^n(x_0) = x_0.
struct ClosedOrbit {
    PerturbedMap map;
    double u = 0.0;
};
ClosedOrbit close_orbit(const IntervalMap& map, const Trajectory& traj,
                        double distance_floor = 1e-12);

// f_v(x) = f(x) + v (x - x_{n-1}) prod_{k<=n-2}(x - x_k)^2 with the
// minimal |v| making x_0 an (n,gamma)-hyperbolic point.
struct HyperbolicityPush {
    PerturbedMap map;
    double v = 0.0;
    double derivative_product = 0.0; // (f_v^n)'(x_0) after the push
};
HyperbolicityPush push_hyperbolicity(const IntervalMap& map,
                                     const Trajectory& traj, double gamma);

struct HyperbolicityReport {
    double value = 0.0; // | |(f^n)'(x)| - 1 |
    bool periodic = false;
    std::optional<double> exclusion_radius; // gamma * c1_norm^{-n}
};
HyperbolicityReport hyperbolicity(const IntervalMap& map, double x, int n,
                                  double gamma, double periodic_tol = 1e-10);

struct PeriodicCount {
    int count = 0;
    std::vector<double> locations;
    bool resolution_heuristic_ok = false; // c1_norm^n * step < heuristic
    std::string note;
};

// Counts isolated solutions of f^n(x) = x by sign changes of f^n(x) - x on
// a uniform grid with `resolution` cells, refined by bisection. Counts all
// fixed points of f^n unless minimal_period is set.
PeriodicCount count_periodic(const IntervalMap& map, int n, long long resolution,
                             bool minimal_period = false, int threads = 0);

struct GrowthRow {
    int map_index = 0;
    int n = 0;
    long long count = 0;
};
struct GrowthTable {
    std::vector<GrowthRow> rows;
    std::vector<double> fitted_c; // per map: least C with P_n <= exp(C n^{1+delta})
};

GrowthTable growth_experiment(const std::vector<IntervalMap>& family, int n_max,
                              double delta,
                              const std::function<long long(int)>& resolution_for,
                              int threads = 0);

// Built-in maps used by the CLI and the tests.
IntervalMap logistic_map();  // 4x(1-x) on [0,1]; c1_norm = 16 (conservative)
IntervalMap halving_map();   // x/2 on [-1,1]
IntervalMap cubic_map(double a, double b, double c, double d);

} // namespace polylab::perturb
