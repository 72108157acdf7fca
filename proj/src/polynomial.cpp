#include "polylab/polynomial.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace polylab {

Polynomial Polynomial::constant(int nvars, double c) {
    Polynomial p(nvars);
    p.add_term(Exponents(nvars, 0), c);
    return p;
}

Polynomial Polynomial::variable(int index, int nvars) {
    Polynomial p(nvars);
    Exponents e(nvars, 0);
    e[index] = 1;
    p.add_term(e, 1.0);
    return p;
}

void Polynomial::add_term(const Exponents& e, double c) {
    if (static_cast<int>(e.size()) != nvars_)
        throw std::invalid_argument("polynomial term arity mismatch");
    if (c == 0.0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

void Polynomial::prune() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->second == 0.0)
            it = terms_.erase(it);
        else
            ++it;
    }
}

int Polynomial::total_degree() const {
    int d = -1; // degree of the zero polynomial reported as -1
    for (const auto& [e, c] : terms_)
        d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
    return d;
}

double Polynomial::eval(std::span<const double> x) const {
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c;
        for (int i = 0; i < nvars_; ++i)
            for (int k = 0; k < e[i]; ++k) t *= x[i];
        acc += t;
    }
    return acc;
}

Polynomial Polynomial::derivative(int var) const {
    Polynomial out(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponents d = e;
        d[var] -= 1;
        out.add_term(d, c * e[var]);
    }
    return out;
}

std::vector<Polynomial> Polynomial::gradient() const {
    std::vector<Polynomial> g;
    g.reserve(nvars_);
    for (int i = 0; i < nvars_; ++i) g.push_back(derivative(i));
    return g;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial out = *this;
    for (const auto& [e, c] : o.terms_) out.add_term(e, c);
    return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    Polynomial out = *this;
    for (const auto& [e, c] : o.terms_) out.add_term(e, -c);
    return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    Polynomial out(nvars_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            Exponents e(nvars_);
            for (int i = 0; i < nvars_; ++i) e[i] = ea[i] + eb[i];
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

Polynomial Polynomial::operator*(double s) const {
    Polynomial out(nvars_);
    if (s == 0.0) return out;
    for (const auto& [e, c] : terms_) out.add_term(e, c * s);
    return out;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << c;
        for (int i = 0; i < nvars_; ++i)
            if (e[i] > 0) os << "*x" << i << "^" << e[i];
    }
    return os.str();
}

Polynomial poly_det(const std::vector<std::vector<Polynomial>>& m) {
    const int n = static_cast<int>(m.size());
    if (n == 0) throw std::invalid_argument("empty determinant");
    if (n == 1) return m[0][0];
    const int nv = m[0][0].nvars();
    Polynomial acc(nv);
    for (int j = 0; j < n; ++j) {
        std::vector<std::vector<Polynomial>> minor;
        minor.reserve(n - 1);
        for (int r = 1; r < n; ++r) {
            std::vector<Polynomial> row;
            row.reserve(n - 1);
            for (int c = 0; c < n; ++c)
                if (c != j) row.push_back(m[r][c]);
            minor.push_back(std::move(row));
        }
        Polynomial term = m[0][j] * poly_det(minor);
        acc = (j % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

} // namespace polylab
