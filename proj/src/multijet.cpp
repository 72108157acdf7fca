#include "polylab/multijet.hpp"

#include <cmath>

#include "polylab/errors.hpp"

namespace polylab::multijet {

std::vector<double> modular_sequence(const std::vector<double>& nodes, int len) {
    const int n = static_cast<int>(nodes.size());
    if (n == 0) throw PreconditionError("multijet", "empty node list");
    std::vector<double> seq(len);
    for (int j = 0; j < len; ++j) seq[j] = nodes[j % n];
    return seq;
}

std::vector<std::vector<double>> newton_map_matrix(const std::vector<double>& nodes) {
    const int two_n = 2 * static_cast<int>(nodes.size());
    std::vector<std::vector<double>> M(two_n, std::vector<double>(two_n, 0.0));
    for (int m = 0; m < two_n; ++m) {
        std::vector<double> args = modular_sequence(nodes, m + 1);
        for (int k = m; k < two_n; ++k)
            M[m][k] = interp::monomial_dd<double>(k, m, args);
    }
    return M;
}

std::vector<double> epsilon_to_u(const std::vector<double>& nodes,
                                 const EpsilonVector& eps) {
    const int two_n = 2 * static_cast<int>(nodes.size());
    if (static_cast<int>(eps.size()) != two_n)
        throw PreconditionError("epsilon_to_u", "|eps| must equal 2*|nodes|");
    std::vector<double> u(two_n);
    for (int m = 0; m < two_n; ++m) {
        std::vector<double> args = modular_sequence(nodes, m + 1);
        double acc = eps[m]; // p_{m,m} == 1
        for (int k = m + 1; k < two_n; ++k)
            acc += eps[k] * interp::monomial_dd<double>(k, m, args);
        u[m] = acc;
    }
    return u;
}

EpsilonVector u_to_epsilon(const std::vector<double>& nodes,
                           const std::vector<double>& u) {
    const int two_n = 2 * static_cast<int>(nodes.size());
    if (static_cast<int>(u.size()) != two_n)
        throw PreconditionError("u_to_epsilon", "|u| must equal 2*|nodes|");
    EpsilonVector eps(two_n, 0.0);
    for (int m = two_n - 1; m >= 0; --m) {
        std::vector<double> args = modular_sequence(nodes, m + 1);
        double acc = u[m];
        for (int k = m + 1; k < two_n; ++k)
            acc -= eps[k] * interp::monomial_dd<double>(k, m, args);
        eps[m] = acc;
    }
    return eps;
}

MultijetPoint pi_map(const DDPoint& p) {
    const int n = static_cast<int>(p.nodes.size());
    const int two_n = 2 * n;
    if (static_cast<int>(p.u.size()) != two_n)
        throw PreconditionError("pi_map", "|u| must equal 2*|nodes|");
    MultijetPoint out;
    out.nodes = p.nodes;
    out.values.resize(n);
    out.derivs.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = p.nodes[i];
        double prod = 1.0, dprod = 0.0;
        double value = 0.0, deriv = 0.0;
        for (int k = 0; k < two_n; ++k) {
            value += p.u[k] * prod;
            deriv += p.u[k] * dprod;
            const double factor = x - p.nodes[k % n];
            dprod = dprod * factor + prod;
            prod *= factor;
        }
        out.values[i] = value;
        out.derivs[i] = deriv;
    }
    return out;
}

DDPoint dd_of_map(const interp::JetFn<double>& f,
                  const std::vector<double>& nodes, int m) {
    if (m < 0) throw PreconditionError("dd_of_map", "jet order must be >= 0");
    const int n = static_cast<int>(nodes.size());
    const int len = (m + 1) * n;
    DDPoint p;
    p.nodes = nodes;
    p.u.resize(len);
    for (int j = 0; j < len; ++j) {
        std::vector<double> args = modular_sequence(nodes, j + 1);
        p.u[j] = interp::divided_difference<double>(f, args);
    }
    return p;
}

double diagonal_distance(const std::vector<double>& nodes) {
    const int n = static_cast<int>(nodes.size());
    if (n < 2) throw PreconditionError("diagonal_distance", "need >= 2 nodes");
    double prod = 1.0;
    for (int k = 0; k + 1 < n; ++k) prod *= std::abs(nodes[n - 1] - nodes[k]);
    return prod;
}

long long dd_space_dimension(int k, int n, int N, int m) {
    long long per_axis = static_cast<long long>(m + 1) * k;
    long long count = 1;
    for (int i = 0; i < n; ++i) count *= per_axis;
    return static_cast<long long>(k) * n + static_cast<long long>(N) * count;
}

} // namespace polylab::multijet
