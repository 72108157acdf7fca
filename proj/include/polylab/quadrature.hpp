#pragma once

#include <functional>

namespace polylab::quad {

// Adaptive Simpson integration of f over [a, b] (a > b allowed, with the
// usual sign). Tolerance is absolute.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-11, int max_depth = 48);

// Throws DomainError naming the pole if `denom` changes sign or vanishes
// on the closed segment between a and b (dense sign scan plus bisection).
void require_pole_free(const std::function<double(double)>& denom, double a,
                       double b, int samples = 512);

} // namespace polylab::quad
