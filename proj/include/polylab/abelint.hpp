#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polylab/continuation.hpp"
#include "polylab/polynomial.hpp"

namespace polylab::abelint {

using continuation::Vec;

// Polynomial Hamiltonian with the perturbation form P dx + Q dy, studied
// over a range of energies h.
struct HamiltonianProblem {
    Polynomial H; // 2 variables
    Polynomial P;
    Polynomial Q;
    double h_min = 0.0;
    double h_max = 1.0;
    double working_box = 4.0;  // tracing aborts outside |x|,|y| <= box
    double trace_step = 2e-3;  // polyline step used by count_zeros
};

struct Oval {
    std::vector<Vec> points; // closed polyline, counterclockwise
    double h = 0.0;
};

// Traces the closed level curve of H through (a continuation from) the
// seed; throws DomainError when the level curve is open or degenerate.
Oval trace_oval(const HamiltonianProblem& prob, double h, const Vec& seed,
                double step = 2e-3);

// Line integral of P dx + Q dy along the oval: midpoint-rule segments with
// one Richardson extrapolation over polyline density.
double abelian_integral(const HamiltonianProblem& prob, const Oval& oval);

double polygon_area(const Oval& oval); // shoelace, positive when ccw

struct BranchPoint {
    double h = 0.0;
    double value = 0.0; // I(h)
};
struct ZeroReport {
    std::vector<double> zeros;          // refined h values with I(h) = 0
    bool identically_zero = false;      // |I| < 1e-12 across the whole grid
    std::vector<BranchPoint> samples;   // the evaluated grid
};

// Follows one oval branch over the h grid (seed continued between rungs),
// locates sign changes of I(h), and refines them by bisection in h.
ZeroReport count_zeros(const HamiltonianProblem& prob,
                       const std::vector<double>& h_grid, const Vec& seed0,
                       double h_tol = 1e-8);

} // namespace polylab::abelint
