#include "polylab/normalforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polylab/errors.hpp"
#include "polylab/quadrature.hpp"

namespace polylab::normalforms {

namespace {

double weierstrass_eval(const std::vector<double>& w, double z) {
    double acc = 0.0;
    for (int i = static_cast<int>(w.size()) - 1; i >= 0; --i)
        acc = acc * z + w[i];
    return acc;
}

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

} // namespace

double p_mu(const Smu& s, double u) {
    return s.sign * ipow(u, s.mu) * (1.0 + s.lambda_top * ipow(u, s.mu)) +
           weierstrass_eval(s.weierstrass, u);
}

double q_mu(int mu, int sign, const std::vector<double>& w, double lambda_top,
            double x) {
    return sign * ipow(x, mu + 1) * (1.0 + lambda_top * ipow(x, mu)) +
           weierstrass_eval(w, x);
}

void validate(const NormalFormSpec& spec) {
    if (const auto* s0 = std::get_if<S0>(&spec)) {
        if (s0->lambda <= 0.0)
            throw PreconditionError("normal_form", "S0 requires lambda > 0");
    } else if (const auto* s = std::get_if<Smu>(&spec)) {
        if (s->mu < 1 || s->m < 1 || s->n < 1 || std::gcd(s->m, s->n) != 1)
            throw PreconditionError("normal_form",
                                    "Smu requires mu >= 1 and coprime m, n");
        if (static_cast<int>(s->weierstrass.size()) != s->mu)
            throw PreconditionError("normal_form",
                                    "Smu Weierstrass list must have length mu");
    } else if (const auto* d = std::get_if<Dc>(&spec)) {
        if (d->mu < 1 || static_cast<int>(d->weierstrass.size()) != d->mu)
            throw PreconditionError("normal_form",
                                    "Dc requires mu >= 1 and length-mu list");
    } else if (const auto* h = std::get_if<Dh>(&spec)) {
        if (h->mu < 1 || static_cast<int>(h->weierstrass.size()) != h->mu)
            throw PreconditionError("normal_form",
                                    "Dh requires mu >= 1 and length-mu list");
    }
}

std::string variant_name(const NormalFormSpec& spec) {
    if (std::holds_alternative<S0>(spec)) return "S0";
    if (std::holds_alternative<Smu>(spec)) return "Smu";
    if (std::holds_alternative<Dc>(spec)) return "Dc";
    return "Dh";
}

namespace {

// Defining equation for Smu: g(y) = m log y + int_{x^m}^{y^n} du/(u P(u)).
double smu_equation(const Smu& s, double x, double y) {
    const double a = ipow(x, s.m), b = ipow(y, s.n);
    auto denom = [&s](double u) { return u * p_mu(s, u); };
    quad::require_pole_free(denom, a, b);
    const double integral =
        quad::integrate([&](double u) { return 1.0 / denom(u); }, a, b);
    return s.m * std::log(y) + integral;
}

// dg/dy = [m P(y^n) + n] / (y P(y^n))
double smu_equation_dy(const Smu& s, double y) {
    const double pyn = p_mu(s, ipow(y, s.n));
    return (s.m * pyn + s.n) / (y * pyn);
}

// Bracket by doubling/halving from y = x until the defining equation
// changes sign; capped at 200 expansions per direction.
double smu_solve(const Smu& s, double x) {
    if (x <= 0.0)
        throw PreconditionError("correspondence", "Smu requires x > 0");
    double y0 = x;
    double g0 = smu_equation(s, x, y0);
    if (g0 == 0.0) return y0;
    double y1 = y0;
    bool bracketed = false;
    // g is increasing in y when P > 0 on the range; try the matching
    // direction first and the other one as a fallback
    for (double factor : {g0 > 0.0 ? 0.5 : 2.0, g0 > 0.0 ? 2.0 : 0.5}) {
        y1 = y0;
        for (int i = 0; i < 200 && !bracketed; ++i) {
            y1 *= factor;
            double g1;
            try {
                g1 = smu_equation(s, x, y1);
            } catch (const DomainError&) {
                break; // expanded past a pole of the integrand
            }
            if ((g0 < 0.0) != (g1 < 0.0)) bracketed = true;
        }
        if (bracketed) break;
    }
    if (!bracketed)
        throw DomainError("no_bracket",
                          "no bracketing interval for the Smu correspondence",
                          {{"x", x}, {"last_y", y1}});
    double lo = std::min(y0, y1), hi = std::max(y0, y1);
    // monotonicity assertion on the bracket
    const double dlo = smu_equation_dy(s, lo), dhi = smu_equation_dy(s, hi);
    if (dlo * dhi <= 0.0)
        throw DomainError("not_monotone",
                          "Smu defining equation is not monotone on the bracket",
                          {{"lo", lo}, {"hi", hi}, {"dlo", dlo}, {"dhi", dhi}});
    double flo = smu_equation(s, x, lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = smu_equation(s, x, mid);
        if (fm == 0.0) return mid;
        if ((flo < 0.0) != (fm < 0.0))
            hi = mid;
        else {
            lo = mid;
            flo = fm;
        }
        if (hi - lo < 1e-14 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

double dc_constant(const Dc& d) {
    auto denom = [&d](double u) {
        return q_mu(d.mu, d.sign, d.weierstrass, d.lambda_top, u);
    };
    quad::require_pole_free(denom, -1.0, 1.0);
    return quad::integrate([&](double u) { return 1.0 / denom(u); }, -1.0, 1.0);
}

// Dh: log y = -int_x^1 du/Q(u); explicit once the integral is known.
double dh_solve(const Dh& h, double x) {
    auto denom = [&h](double u) {
        return q_mu(h.mu, h.sign, h.weierstrass, h.lambda_top, u);
    };
    quad::require_pole_free(denom, x, 1.0);
    const double integral =
        quad::integrate([&](double u) { return 1.0 / denom(u); }, x, 1.0);
    return std::exp(-integral);
}

} // namespace

double correspondence(const NormalFormSpec& spec, double x) {
    validate(spec);
    if (const auto* s0 = std::get_if<S0>(&spec)) {
        if (x <= 0.0)
            throw PreconditionError("correspondence", "S0 requires x > 0");
        return std::pow(x, s0->lambda);
    }
    if (const auto* s = std::get_if<Smu>(&spec)) return smu_solve(*s, x);
    if (const auto* d = std::get_if<Dc>(&spec)) return dc_constant(*d) * x;
    return dh_solve(std::get<Dh>(spec), x);
}

double correspondence_derivative(const NormalFormSpec& spec, double x) {
    validate(spec);
    if (const auto* s0 = std::get_if<S0>(&spec)) {
        if (x <= 0.0)
            throw PreconditionError("correspondence", "S0 requires x > 0");
        return s0->lambda * std::pow(x, s0->lambda - 1.0);
    }
    if (const auto* s = std::get_if<Smu>(&spec)) {
        // implicit function formula on g(x, y) = 0:
        // dg/dx = -m / (x P(x^m)),  dg/dy = [m P(y^n) + n] / (y P(y^n))
        const double y = smu_solve(*s, x);
        const double gx = -s->m / (x * p_mu(*s, ipow(x, s->m)));
        const double gy = smu_equation_dy(*s, y);
        return -gx / gy;
    }
    if (const auto* d = std::get_if<Dc>(&spec)) return dc_constant(*d);
    const auto& h = std::get<Dh>(spec);
    const double y = dh_solve(h, x);
    return y / q_mu(h.mu, h.sign, h.weierstrass, h.lambda_top, x);
}

FormValue pfaffian_form(const NormalFormSpec& spec, double x, double y) {
    validate(spec);
    FormValue w;
    if (const auto* s0 = std::get_if<S0>(&spec)) {
        // x dy - lambda y dx = 0
        w.P = -s0->lambda * y;
        w.Q = x;
    } else if (const auto* s = std::get_if<Smu>(&spec)) {
        // y P(y^n) dx - (n/m + P(y^n)) x P(x^m) dy = 0
        const double pyn = p_mu(*s, ipow(y, s->n));
        const double pxm = p_mu(*s, ipow(x, s->m));
        w.P = y * pyn;
        w.Q = -(static_cast<double>(s->n) / s->m + pyn) * x * pxm;
    } else if (std::holds_alternative<Dc>(spec)) {
        // x dy - y dx = 0
        w.P = -y;
        w.Q = x;
    } else {
        // Q(x) dy - y dx = 0
        const auto& h = std::get<Dh>(spec);
        w.P = -y;
        w.Q = q_mu(h.mu, h.sign, h.weierstrass, h.lambda_top, x);
    }
    return w;
}

double pfaffian_residual(const NormalFormSpec& spec, double x, double h) {
    const double y = correspondence(spec, x);
    const double yp = correspondence(spec, x + h);
    const double ym = correspondence(spec, x - h);
    const FormValue w = pfaffian_form(spec, x, y);
    return w.P + w.Q * (yp - ym) / (2.0 * h);
}

Connector affine_connector(double scale, double offset) {
    Connector c;
    c.f = [=](double y) { return scale * y + offset; };
    c.df = [=](double) { return scale; };
    c.name = "affine";
    return c;
}

ReturnMap compose_polycycle(const PolycycleModel& model, double x) {
    if (model.vertices.size() != model.connectors.size())
        throw PreconditionError("polycycle",
                                "need exactly one connector per vertex");
    ReturnMap r;
    r.value = x;
    r.derivative = 1.0;
    for (std::size_t j = 0; j < model.vertices.size(); ++j) {
        double y, dy;
        try {
            y = correspondence(model.vertices[j], r.value);
            dy = correspondence_derivative(model.vertices[j], r.value);
        } catch (const Error& e) {
            throw DomainError("stage_escape",
                              "domain escape at polycycle stage " +
                                  std::to_string(j) + ": " + e.what(),
                              {{"stage", static_cast<double>(j)}, {"value", r.value}});
        }
        r.derivative *= dy;
        r.value = y;
        r.derivative *= model.connectors[j].df(r.value);
        r.value = model.connectors[j].f(r.value);
    }
    return r;
}

CycleCountReport count_limit_cycles(const PolycycleModel& model,
                                    const std::vector<double>& delta_cascade,
                                    double x_lo, double x_hi, int scan_points,
                                    double cascade_ratio,
                                    double regularity_floor) {
    if (delta_cascade.empty())
        throw PreconditionError("count_limit_cycles", "empty delta cascade");
    for (std::size_t i = 0; i + 1 < delta_cascade.size(); ++i) {
        if (std::abs(delta_cascade[i + 1]) * cascade_ratio >
            std::abs(delta_cascade[i]) * (1.0 + 1e-12))
            throw PreconditionError(
                "count_limit_cycles",
                "delta cascade must decrease in magnitude by the configured ratio",
                {{"ratio", cascade_ratio},
                 {"delta_i", delta_cascade[i]},
                 {"delta_next", delta_cascade[i + 1]}});
    }

    CycleCountReport report;
    report.deltas = delta_cascade;
    for (double delta : delta_cascade) {
        auto h = [&](double x) {
            return compose_polycycle(model, x).value - x - delta;
        };
        std::vector<CycleSolution> roots;
        double prev_x = x_lo;
        double prev = h(prev_x);
        for (int i = 1; i <= scan_points; ++i) {
            const double x = x_lo + (x_hi - x_lo) * i / scan_points;
            const double v = h(x);
            if (v == 0.0 || ((prev < 0.0) != (v < 0.0))) {
                double a = prev_x, b = x, fa = prev;
                for (int it = 0; it < 100; ++it) {
                    const double mid = 0.5 * (a + b);
                    const double fm = h(mid);
                    if (fm == 0.0) {
                        a = b = mid;
                        break;
                    }
                    if ((fa < 0.0) != (fm < 0.0))
                        b = mid;
                    else {
                        a = mid;
                        fa = fm;
                    }
                    if (b - a < 1e-13) break;
                }
                CycleSolution sol;
                sol.x = 0.5 * (a + b);
                sol.delta_prime = compose_polycycle(model, sol.x).derivative;
                sol.regular = std::abs(sol.delta_prime - 1.0) > regularity_floor;
                roots.push_back(sol);
            }
            prev = v;
            prev_x = x;
        }
        report.counts.push_back(static_cast<int>(roots.size()));
        report.roots.push_back(std::move(roots));
    }
    report.stable = std::adjacent_find(report.counts.begin(), report.counts.end(),
                                       std::not_equal_to<int>()) ==
                    report.counts.end();
    return report;
}

} // namespace polylab::normalforms
