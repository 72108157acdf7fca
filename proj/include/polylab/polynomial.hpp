#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace polylab {

// Sparse multivariate polynomial with double coefficients. The number of
// variables is fixed per instance; exponent vectors are the map keys, so
// iteration order (and therefore serialization) is deterministic.
class Polynomial {
public:
    using Exponents = std::vector<int>;

    Polynomial() : nvars_(0) {}
    explicit Polynomial(int nvars) : nvars_(nvars) {}

    static Polynomial constant(int nvars, double c);
    static Polynomial variable(int index, int nvars);

    int nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    int total_degree() const;

    double eval(std::span<const double> x) const;

    Polynomial derivative(int var) const;
    std::vector<Polynomial> gradient() const;

    void add_term(const Exponents& e, double c);

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(double s) const;
    Polynomial operator-() const { return *this * -1.0; }

    const std::map<Exponents, double>& terms() const { return terms_; }

    std::string to_string() const;

private:
    int nvars_;
    std::map<Exponents, double> terms_;

    void prune();
};

// det of a square matrix of polynomials (Laplace expansion; d <= 4 here).
Polynomial poly_det(const std::vector<std::vector<Polynomial>>& m);

} // namespace polylab
