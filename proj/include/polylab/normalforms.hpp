#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace polylab::normalforms {

// The four elementary-equilibrium types of the normal-form table.
//
// Parameter layout for the degenerate rows: `weierstrass` holds the
// coefficients lambda_0..lambda_{mu-1} of W_{mu-1}(z) and `lambda_top`
// the coefficient of the top term sign * z^mu (1 + lambda_top z^mu).
struct S0 {
    double lambda = 1.0; // > 0
};
struct Smu {
    int m = 1, n = 1; // coprime resonance
    int mu = 1;
    int sign = 1; // +-1
    std::vector<double> weierstrass;
    double lambda_top = 0.0;
};
struct Dc {
    int mu = 1;
    int sign = 1;
    std::vector<double> weierstrass;
    double lambda_top = 0.0;
};
struct Dh {
    int mu = 1;
    int sign = 1;
    std::vector<double> weierstrass;
    double lambda_top = 0.0;
};

using NormalFormSpec = std::variant<S0, Smu, Dc, Dh>;

void validate(const NormalFormSpec& spec);
std::string variant_name(const NormalFormSpec& spec);

// P_mu(u) = sign u^mu (1 + lambda_top u^mu) + W_{mu-1}(u)   (S_mu row)
// Q_mu(x) = sign x^{mu+1} (1 + lambda_top x^mu) + W_{mu-1}(x)  (D rows)
double p_mu(const Smu& s, double u);
double q_mu(int mu, int sign, const std::vector<double>& w, double lambda_top,
            double x);

// Poincare correspondence map y = Delta(x) of the table's third column.
double correspondence(const NormalFormSpec& spec, double x);

// dy/dx, analytic for S0/Dc and via implicit differentiation of the
// defining equation for Smu/Dh.
double correspondence_derivative(const NormalFormSpec& spec, double x);

// Pfaffian form omega = P dx + Q dy of the fourth column, at (x, y).
struct FormValue {
    double P = 0.0;
    double Q = 0.0;
};
FormValue pfaffian_form(const NormalFormSpec& spec, double x, double y);

// omega evaluated on the central secant of the graph y = Delta(x),
// divided by h; tends to 0 on the true graph as h -> 0.
double pfaffian_residual(const NormalFormSpec& spec, double x, double h);

// Regular connector map y -> x between consecutive sections.
struct Connector {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::string name;
};
Connector affine_connector(double scale, double offset);

struct PolycycleModel {
    std::vector<NormalFormSpec> vertices;
    std::vector<Connector> connectors; // one per vertex (cyclic)
};

// Return map Delta = f_k . Delta_k . ... . f_1 . Delta_1 with derivative
// by the chain rule. Domain escape at stage j raises DomainError with j.
struct ReturnMap {
    double value = 0.0;
    double derivative = 0.0;
};
ReturnMap compose_polycycle(const PolycycleModel& model, double x);

struct CycleSolution {
    double x = 0.0;
    double delta_prime = 0.0; // Delta'(x)
    bool regular = false;     // |Delta'(x) - 1| above the regularity floor
};
struct CycleCountReport {
    std::vector<double> deltas;
    std::vector<int> counts;                       // per delta
    std::vector<std::vector<CycleSolution>> roots; // per delta
    bool stable = false;                           // same count at every delta
};

// Counts regular solutions of Delta(x) = x + delta_1 for every delta in the
// cascade (sign-change scan plus bisection on (x_lo, x_hi)).
CycleCountReport count_limit_cycles(const PolycycleModel& model,
                                    const std::vector<double>& delta_cascade,
                                    double x_lo, double x_hi, int scan_points = 4000,
                                    double cascade_ratio = 5.0,
                                    double regularity_floor = 1e-6);

} // namespace polylab::normalforms
