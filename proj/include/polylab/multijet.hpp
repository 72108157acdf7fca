#pragma once

#include <vector>

#include "polylab/interp.hpp"

namespace polylab::multijet {

// Element of the divided-difference space DD(I,R): n base nodes plus the
// 2n Newton coefficients of a 1-jet perturbation polynomial.
struct DDPoint {
    std::vector<double> nodes;
    std::vector<double> u; // |u| == 2 * |nodes| in the 1-jet case
};

// n-tuple 1-jet: value and derivative of the polynomial at each node.
struct MultijetPoint {
    std::vector<double> nodes;
    std::vector<double> values;
    std::vector<double> derivs;
};

using EpsilonVector = std::vector<double>; // monomial-basis coefficients

// The modular node sequence x_{j (mod n)}, j = 0..len-1, that defines the
// Newton basis prod_{j<k} (x - x_{j mod n}).
std::vector<double> modular_sequence(const std::vector<double>& nodes, int len);

// Newton map as a matrix: u = M eps, M[m][k] = p_{k,m}(x_0..x_{m mod n}).
// Unit upper triangular by construction.
std::vector<std::vector<double>> newton_map_matrix(const std::vector<double>& nodes);

std::vector<double> epsilon_to_u(const std::vector<double>& nodes,
                                 const EpsilonVector& eps);

// Exact inverse by back substitution; round trip is the identity.
EpsilonVector u_to_epsilon(const std::vector<double>& nodes,
                           const std::vector<double>& u);

// Interpolation map pi: evaluates the Newton-basis polynomial and its
// analytic derivative at each node.
MultijetPoint pi_map(const DDPoint& p);

// u_j = Delta^j f over the first j+1 entries of the modular sequence,
// using derivative data at confluent repeats (jet order m).
DDPoint dd_of_map(const interp::JetFn<double>& f,
                  const std::vector<double>& nodes, int m);

// prod_{k=0}^{n-2} |x_{n-1} - x_k|; zero iff the tuple lies on the diagonal.
double diagonal_distance(const std::vector<double>& nodes);

// dim DD^m_k(B^n, R^N) with the Newton-basis index convention
// alpha_i <= (m+1)k - 1.
long long dd_space_dimension(int k, int n, int N, int m);

} // namespace polylab::multijet
