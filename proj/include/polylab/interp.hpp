#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <vector>

#include "polylab/errors.hpp"

namespace polylab::interp {

// A function together with its derivatives: g(x, k) = g^{(k)}(x).
// Order 0 is the plain value. Confluent divided differences consume
// derivative orders up to (block size - 1).
template <class T>
using JetFn = std::function<T(const T&, int)>;

// Multivariate variant: F(point, orders) = mixed partial of the given
// per-axis orders, evaluated at point.
template <class T>
using MultiJetFn =
    std::function<T(const std::vector<T>&, const std::vector<int>&)>;

// Each node repeated m+1 times, contiguously, preserving order.
template <class T>
std::vector<T> jet_expand(const std::vector<T>& nodes, int m) {
    if (m < 0) throw PreconditionError("jet_expand", "jet order must be >= 0");
    std::vector<T> out;
    out.reserve(nodes.size() * (m + 1));
    for (const T& x : nodes)
        for (int r = 0; r <= m; ++r) out.push_back(x);
    return out;
}

namespace detail {

// Group equal nodes into contiguous blocks, keeping first-occurrence order.
// Distinct node lists come back unchanged, so permutation tests exercise a
// genuinely different evaluation order.
template <class T>
std::vector<T> group_confluent(const std::vector<T>& nodes) {
    std::vector<T> order;   // distinct values, first occurrence order
    std::vector<int> count; // multiplicity per value
    for (const T& x : nodes) {
        auto it = std::find(order.begin(), order.end(), x);
        if (it == order.end()) {
            order.push_back(x);
            count.push_back(1);
        } else {
            ++count[it - order.begin()];
        }
    }
    std::vector<T> out;
    out.reserve(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        for (int r = 0; r < count[i]; ++r) out.push_back(order[i]);
    return out;
}

template <class T>
T factorial(int k) {
    T f(1);
    for (int i = 2; i <= k; ++i) f *= T(i);
    return f;
}

} // namespace detail

// Full triangular tableau of divided differences over (possibly confluent)
// nodes. The whole tableau is retained, not just the top edge.
template <class T>
class DividedDifferenceTable {
public:
    DividedDifferenceTable(const JetFn<T>& g, std::vector<T> nodes)
        : nodes_(detail::group_confluent(nodes)) {
        const int n = static_cast<int>(nodes_.size());
        if (n == 0)
            throw PreconditionError("divided_difference", "empty node list");
        tableau_.assign(n, {});
        for (int i = 0; i < n; ++i) tableau_[i].resize(n - i);
        for (int i = 0; i < n; ++i) tableau_[i][0] = g(nodes_[i], 0);
        for (int j = 1; j < n; ++j) {
            for (int i = 0; i + j < n; ++i) {
                if (nodes_[i] == nodes_[i + j]) {
                    // fully confluent block: limit value g^(j)(x)/j!
                    tableau_[i][j] =
                        g(nodes_[i], j) / detail::factorial<T>(j);
                } else {
                    tableau_[i][j] = (tableau_[i + 1][j - 1] - tableau_[i][j - 1]) /
                                     (nodes_[i + j] - nodes_[i]);
                }
            }
        }
    }

    const std::vector<T>& nodes() const { return nodes_; }
    const std::vector<std::vector<T>>& tableau() const { return tableau_; }

    // Top edge: Newton coefficients u_j = dd over nodes_[0..j].
    std::vector<T> coefficients() const {
        std::vector<T> u;
        u.reserve(nodes_.size());
        for (std::size_t j = 0; j < nodes_.size(); ++j)
            u.push_back(tableau_[0][j]);
        return u;
    }

    T top() const { return tableau_[0].back(); }

    // Horner-style nested evaluation of the Newton form.
    T eval(const T& t) const {
        const auto u = coefficients();
        const int n = static_cast<int>(u.size());
        T b = u[n - 1];
        for (int j = n - 2; j >= 0; --j) b = u[j] + (t - nodes_[j]) * b;
        return b;
    }

    // Analytic derivative of the Newton form (product-rule Horner).
    T eval_derivative(const T& t) const {
        const auto u = coefficients();
        const int n = static_cast<int>(u.size());
        T b = u[n - 1];
        T db(0);
        for (int j = n - 2; j >= 0; --j) {
            db = b + (t - nodes_[j]) * db;
            b = u[j] + (t - nodes_[j]) * b;
        }
        return db;
    }

private:
    std::vector<T> nodes_;
    std::vector<std::vector<T>> tableau_;
};

// Delta^s g(x_1..x_{s+1}). Confluent blocks take the derivative-based
// limit value; g must supply derivatives up to (largest block size - 1).
template <class T>
T divided_difference(const JetFn<T>& g, const std::vector<T>& nodes) {
    return DividedDifferenceTable<T>(g, nodes).top();
}

// Plain-function convenience for pairwise-distinct nodes.
template <class T>
T divided_difference(const std::function<T(const T&)>& g,
                     const std::vector<T>& nodes) {
    JetFn<T> jet = [&g, &nodes](const T& x, int k) -> T {
        if (k > 0)
            throw PreconditionError(
                "divided_difference",
                "confluent block needs derivative order " + std::to_string(k) +
                    " but only values were supplied");
        return g(x);
    };
    return divided_difference<T>(jet, nodes);
}

// p_{l,s}(x_1..x_{s+1}): sum of all degree (l-s) monomials with unit
// coefficients, i.e. the complete homogeneous symmetric polynomial
// h_{l-s}; equals Delta^s x^l at the same nodes. Zero for s > l.
template <class T>
T monomial_dd(int l, int s, const std::vector<T>& nodes) {
    if (l < 0 || s < 0)
        throw PreconditionError("monomial_dd", "l and s must be >= 0");
    if (static_cast<int>(nodes.size()) != s + 1)
        throw PreconditionError("monomial_dd", "need exactly s+1 nodes");
    if (s > l) return T(0);
    const int deg = l - s;
    // DP over h_k(x_1..x_m) = h_k(x_1..x_{m-1}) + x_m h_{k-1}(x_1..x_m)
    std::vector<T> h(deg + 1, T(0));
    h[0] = T(1);
    for (const T& x : nodes)
        for (int k = 1; k <= deg; ++k) h[k] += x * h[k - 1];
    return h[deg];
}

// --- Cartesian-grid multivariate tables ------------------------------

template <class T>
struct NodeGrid {
    std::vector<std::vector<T>> axes; // raw per-axis nodes (pre jet expansion)
    int jet_order = 0;

    NodeGrid() = default;
    NodeGrid(std::vector<std::vector<T>> a, int m) : axes(std::move(a)), jet_order(m) {
        if (jet_order < 0)
            throw PreconditionError("node_grid", "jet order must be >= 0");
        for (const auto& ax : axes)
            if (ax.empty())
                throw PreconditionError("node_grid", "every axis must be non-empty");
    }

    int naxes() const { return static_cast<int>(axes.size()); }
    std::vector<T> expanded_axis(int i) const {
        return jet_expand(axes[i], jet_order);
    }
    int expanded_len(int i) const {
        return static_cast<int>(axes[i].size()) * (jet_order + 1);
    }
};

namespace detail {

// Mixed divided difference over per-axis node prefixes, by recursion on the
// last axis; the operators commute, so axis order is a free choice.
template <class T>
T mixed_dd(const MultiJetFn<T>& f,
           const std::vector<std::vector<T>>& nodes_per_axis) {
    const int n = static_cast<int>(nodes_per_axis.size());
    if (n == 1) {
        JetFn<T> g = [&f](const T& x, int k) {
            return f(std::vector<T>{x}, std::vector<int>{k});
        };
        return divided_difference<T>(g, nodes_per_axis[0]);
    }
    JetFn<T> g = [&](const T& xlast, int k) -> T {
        MultiJetFn<T> inner = [&, xlast, k](const std::vector<T>& p,
                                            const std::vector<int>& o) -> T {
            std::vector<T> full = p;
            full.push_back(xlast);
            std::vector<int> ord = o;
            ord.push_back(k);
            return f(full, ord);
        };
        std::vector<std::vector<T>> rest(nodes_per_axis.begin(),
                                         nodes_per_axis.end() - 1);
        return mixed_dd<T>(inner, rest);
    };
    return divided_difference<T>(g, nodes_per_axis.back());
}

} // namespace detail

// Table of all mixed divided differences u_alpha over the expanded grid,
// for an R^N-valued map given componentwise.
template <class T>
struct DDTable {
    NodeGrid<T> grid;
    std::map<std::vector<int>, std::vector<T>> coefficients; // alpha -> value
};

template <class T>
DDTable<T> make_dd_table(const NodeGrid<T>& grid,
                         const std::vector<MultiJetFn<T>>& components) {
    DDTable<T> table;
    table.grid = grid;
    const int n = grid.naxes();
    std::vector<std::vector<T>> expanded(n);
    for (int i = 0; i < n; ++i) expanded[i] = grid.expanded_axis(i);

    std::vector<int> alpha(n, 0);
    for (;;) {
        std::vector<std::vector<T>> prefixes(n);
        for (int i = 0; i < n; ++i)
            prefixes[i].assign(expanded[i].begin(),
                               expanded[i].begin() + alpha[i] + 1);
        std::vector<T> value;
        value.reserve(components.size());
        for (const auto& f : components)
            value.push_back(detail::mixed_dd<T>(f, prefixes));
        table.coefficients.emplace(alpha, std::move(value));

        int axis = n - 1;
        while (axis >= 0) {
            if (++alpha[axis] < grid.expanded_len(axis)) break;
            alpha[axis] = 0;
            --axis;
        }
        if (axis < 0) break;
    }
    return table;
}

namespace detail {

template <class T>
T horner_axis(const DDTable<T>& table,
              const std::vector<std::vector<T>>& expanded,
              const std::vector<T>& t, std::vector<int>& alpha, int axis,
              int component) {
    const int n = table.grid.naxes();
    if (axis == n) {
        return table.coefficients.at(alpha)[component];
    }
    const int len = table.grid.expanded_len(axis);
    alpha[axis] = len - 1;
    T b = horner_axis(table, expanded, t, alpha, axis + 1, component);
    for (int j = len - 2; j >= 0; --j) {
        alpha[axis] = j;
        T c = horner_axis(table, expanded, t, alpha, axis + 1, component);
        b = c + (t[axis] - expanded[axis][j]) * b;
    }
    return b;
}

} // namespace detail

// Newton interpolation polynomial of the table, evaluated at t.
template <class T>
std::vector<T> newton_interpolate(const DDTable<T>& table,
                                  const std::vector<T>& t) {
    const int n = table.grid.naxes();
    if (static_cast<int>(t.size()) != n)
        throw PreconditionError("newton_interpolate", "point arity mismatch");
    std::vector<std::vector<T>> expanded(n);
    for (int i = 0; i < n; ++i) expanded[i] = table.grid.expanded_axis(i);
    const int ncomp =
        static_cast<int>(table.coefficients.begin()->second.size());
    std::vector<T> out;
    out.reserve(ncomp);
    std::vector<int> alpha(n, 0);
    for (int c = 0; c < ncomp; ++c)
        out.push_back(detail::horner_axis(table, expanded, t, alpha, 0, c));
    return out;
}

} // namespace polylab::interp
