#include "polylab/pfaffrolle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "polylab/errors.hpp"

namespace polylab::pfaffrolle {

LevelFunction from_polynomial(const Polynomial& p) {
    LevelFunction f;
    auto grads = p.gradient();
    f.value = [p](const Vec& x) {
        return p.eval(std::span<const double>(x.data(), x.size()));
    };
    f.gradient = [grads, n = p.nvars()](const Vec& x) {
        Vec g(n);
        for (int i = 0; i < n; ++i)
            g[i] = grads[i].eval(std::span<const double>(x.data(), x.size()));
        return g;
    };
    f.name = p.to_string();
    return f;
}

SmoothSystem RegularSystem::smooth() const {
    SmoothSystem s;
    s.dim = dim;
    const auto comps = components; // copy for capture
    s.eval = [comps](const Vec& x) {
        Vec out(comps.size());
        for (std::size_t i = 0; i < comps.size(); ++i) out[i] = comps[i].value(x);
        return out;
    };
    s.jacobian = [comps, d = dim](const Vec& x) {
        Mat J(comps.size(), d);
        for (std::size_t i = 0; i < comps.size(); ++i)
            J.row(i) = comps[i].gradient(x).transpose();
        return J;
    };
    return s;
}

std::vector<CurveComponent> trace_level_curve(const RegularSystem& sys,
                                              const std::vector<double>& value,
                                              const TraceOptions& opts) {
    if (static_cast<int>(sys.components.size()) != sys.dim - 1)
        throw PreconditionError("trace_level_curve",
                                "need d-1 coordinate functions in dimension d");
    Vec v(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) v[i] = value[i];
    return continuation::trace_level_curve(sys.smooth(), v, opts);
}

namespace {

int derivative_crossings(const LevelFunction& f, const CurveComponent& comp,
                         double delta) {
    int count = 0;
    bool have_prev = false;
    double prev = 0.0;
    for (std::size_t i = 0; i < comp.points.size(); ++i) {
        const double v = f.gradient(comp.points[i]).dot(comp.tangents[i]) - delta;
        if (v == 0.0) {
            ++count;
            have_prev = false;
            continue;
        }
        if (have_prev && ((prev < 0.0) != (v < 0.0))) ++count;
        prev = v;
        have_prev = true;
    }
    return count;
}

} // namespace

RolleCount rolle_count(const LevelFunction& f, const CurveComponent& comp,
                       double a, double delta) {
    RolleCount rc;
    rc.lhs = continuation::count_crossings(comp, f.value, a);
    const int rhs_at_delta = derivative_crossings(f, comp, delta);
    const int rhs_at_half = derivative_crossings(f, comp, delta / 2.0);
    if (rhs_at_delta != rhs_at_half)
        throw DomainError("rolle_delta",
                          "critical-value count varies under delta/2; retry with "
                          "a smaller delta",
                          {{"delta", delta},
                           {"rhs_at_delta", static_cast<double>(rhs_at_delta)},
                           {"rhs_at_half", static_cast<double>(rhs_at_half)},
                           {"suggested", delta / 10.0}});
    rc.rhs = rhs_at_delta + (comp.closed ? 0 : 1);
    rc.holds = rc.lhs <= rc.rhs;
    return rc;
}

ChainJacobian chain_jacobian(const std::vector<PolyCovector>& forms,
                             const std::vector<PolyCovector>& regular_parts,
                             int elimination_step) {
    const int d = static_cast<int>(forms.size() + regular_parts.size());
    std::vector<std::vector<Polynomial>> rows;
    int d_form = 0;
    for (const auto& f : forms) {
        if (static_cast<int>(f.components.size()) != d)
            throw PreconditionError("chain_jacobian", "covector arity mismatch");
        for (const auto& p : f.components)
            d_form = std::max(d_form, p.total_degree());
        rows.push_back(f.components);
    }
    for (const auto& r : regular_parts) {
        if (static_cast<int>(r.components.size()) != d)
            throw PreconditionError("chain_jacobian", "covector arity mismatch");
        rows.push_back(r.components);
    }
    ChainJacobian out;
    out.det = poly_det(rows);
    out.degree_bound = (1 << elimination_step) * (d_form + 1);
    out.within_bound = out.det.total_degree() <= out.degree_bound;
    return out;
}

namespace {

PolyCovector gradient_covector(const Polynomial& p) {
    PolyCovector c;
    c.components = p.gradient();
    return c;
}

Polynomial rho_polynomial(double radius, int d) {
    // rho_r(x) = r^2 - sum x_j^2, vanishing on the sphere |x| = r
    Polynomial rho = Polynomial::constant(d, radius * radius);
    for (int i = 0; i < d; ++i) {
        Polynomial xi = Polynomial::variable(i, d);
        rho = rho - xi * xi;
    }
    return rho;
}

EliminationReport run_elimination(const std::vector<LevelFunction>& trace_fns,
                                  const std::vector<double>& trace_values,
                                  const LevelFunction& counted, double count_level,
                                  const Polynomial& jacobian_poly,
                                  double jac_delta, const Polynomial& rho,
                                  double radius,
                                  const std::vector<Polynomial>& regular_grads_of,
                                  const TraceOptions& base_opts) {
    RegularSystem sys;
    sys.components = trace_fns;
    sys.dim = 4;
    sys.radius = radius;
    TraceOptions opts = base_opts;
    opts.radius = radius;
    auto comps = trace_level_curve(sys, trace_values, opts);

    auto jac_value = [&jacobian_poly](const Vec& x) {
        return jacobian_poly.eval(std::span<const double>(x.data(), x.size()));
    };
    auto rho_value = [&rho](const Vec& x) {
        return rho.eval(std::span<const double>(x.data(), x.size()));
    };

    std::vector<std::vector<Polynomial>> grad_polys;
    for (const auto& g : regular_grads_of) grad_polys.push_back(g.gradient());

    EliminationReport rep;
    rep.components = static_cast<int>(comps.size());
    rep.min_gradient_norm = std::numeric_limits<double>::infinity();
    for (const auto& comp : comps) {
        ComponentLedger row;
        row.seed_index = comp.seed_index;
        row.closed = comp.closed;
        row.lhs_crossings =
            continuation::count_crossings(comp, counted.value, count_level);
        row.jacobian_crossings =
            continuation::count_crossings(comp, jac_value, jac_delta);
        row.rho_crossings =
            continuation::count_crossings(comp, rho_value, jac_delta);
        rep.ledger.push_back(row);
        rep.lhs += row.lhs_crossings;
        rep.jacobian_count += row.jacobian_crossings;
        rep.boundary_count += row.rho_crossings;
        if (comp.closed) ++rep.closed_components;
        // minimum gradient norms along the curve drive the choice of the
        // next delta; see the report consumers
        for (const auto& p : comp.points) {
            for (const auto& grads : grad_polys) {
                Vec gv(4);
                for (int i = 0; i < 4; ++i)
                    gv[i] = grads[i].eval(
                        std::span<const double>(p.data(), p.size()));
                rep.min_gradient_norm = std::min(rep.min_gradient_norm, gv.norm());
            }
        }
    }
    if (!std::isfinite(rep.min_gradient_norm)) rep.min_gradient_norm = 0.0;
    // sorted merge by seed index (tracing may run concurrently upstream)
    std::sort(rep.ledger.begin(), rep.ledger.end(),
              [](const ComponentLedger& a, const ComponentLedger& b) {
                  return a.seed_index < b.seed_index;
              });
    rep.rhs = rep.jacobian_count + rep.boundary_count / 2.0;
    rep.holds = rep.lhs <= rep.rhs;
    return rep;
}

KhovanskiiReport run_once(const MixedSystem& sys,
                          const std::vector<double>& cascade,
                          const TraceOptions& opts) {
    if (cascade.size() != 4)
        throw PreconditionError("khovanskii_reduce",
                                "cascade must be (delta1..delta4)");
    for (std::size_t i = 0; i + 1 < cascade.size(); ++i)
        if (std::abs(cascade[i + 1]) >= std::abs(cascade[i]))
            throw PreconditionError("khovanskii_reduce",
                                    "cascade must strictly decrease");
    const double d1 = cascade[0], d2 = cascade[1], d3 = cascade[2],
                 d4 = cascade[3];

    const Polynomial rho = rho_polynomial(sys.radius, 4);
    LevelFunction F1 = from_polynomial(sys.regular1);
    LevelFunction F2 = from_polynomial(sys.regular2);

    // Step 1: trace G_1 = (singular2, F1, F2) and count on its level curve.
    ChainJacobian J1 = chain_jacobian(
        {sys.singular1.form, sys.singular2.form},
        {gradient_covector(sys.regular1), gradient_covector(sys.regular2)}, 1);

    KhovanskiiReport rep;
    rep.jacobian1_degree = J1.det.total_degree();
    rep.jacobian1_bound = J1.degree_bound;

    rep.step1 = run_elimination({sys.singular2.level, F1, F2}, {0.0, d1, d2},
                                sys.singular1.level, 0.0, J1.det, d3, rho,
                                sys.radius, {sys.regular1, sys.regular2}, opts);

    // Step 2, chain branch: trace G_2^0 = (F1, F2, J1) and count the second
    // singular equation against J2^0 = det(omega2, dF1, dF2, dJ1).
    ChainJacobian J2 = chain_jacobian({sys.singular2.form},
                                      {gradient_covector(sys.regular1),
                                       gradient_covector(sys.regular2),
                                       gradient_covector(J1.det)},
                                      2);
    rep.step2_chain = run_elimination(
        {F1, F2, from_polynomial(J1.det)}, {d1, d2, d3}, sys.singular2.level,
        0.0, J2.det, d4, rho, sys.radius,
        {sys.regular1, sys.regular2, J1.det}, opts);

    // Step 2, boundary branch: trace G_2^1 = (F1, F2, rho).
    ChainJacobian J2b = chain_jacobian({sys.singular2.form},
                                       {gradient_covector(sys.regular1),
                                        gradient_covector(sys.regular2),
                                        gradient_covector(rho)},
                                       2);
    rep.step2_boundary = run_elimination(
        {F1, F2, from_polynomial(rho)}, {d1, d2, d3}, sys.singular2.level, 0.0,
        J2b.det, d4, rho, sys.radius, {sys.regular1, sys.regular2}, opts);

    return rep;
}

bool same_counts(const KhovanskiiReport& a, const KhovanskiiReport& b) {
    auto eq = [](const EliminationReport& x, const EliminationReport& y) {
        return x.lhs == y.lhs && x.jacobian_count == y.jacobian_count;
    };
    return eq(a.step1, b.step1) && eq(a.step2_chain, b.step2_chain) &&
           eq(a.step2_boundary, b.step2_boundary);
}

} // namespace

KhovanskiiReport khovanskii_reduce(const MixedSystem& sys,
                                   const std::vector<double>& cascade,
                                   const TraceOptions& opts) {
    KhovanskiiReport rep = run_once(sys, cascade, opts);
    std::vector<double> refined = cascade;
    for (double& d : refined) d /= 10.0;
    KhovanskiiReport rep_refined = run_once(sys, refined, opts);
    rep.stable = same_counts(rep, rep_refined);
    rep.verdict = rep.stable ? "ok" : "inconclusive";
    return rep;
}

MixedSystem decoupled_instance(double slope1, double offset1, double slope2,
                               double offset2, double radius) {
    // coordinates X = (x1, y1, x2, y2)
    const int d = 4;
    auto x1 = Polynomial::variable(0, d);
    auto y1 = Polynomial::variable(1, d);
    auto x2 = Polynomial::variable(2, d);
    auto y2 = Polynomial::variable(3, d);
    const Polynomial zero(d);

    MixedSystem sys;
    sys.radius = radius;

    // singular j: leaf y_j = x_j^2, omega_j = x_j dy_j - 2 y_j dx_j
    Polynomial v1 = y1 - x1 * x1;
    Polynomial v2 = y2 - x2 * x2;
    sys.singular1.level = from_polynomial(v1);
    sys.singular1.form.components = {(y1 * -2.0), x1, zero, zero};
    sys.singular2.level = from_polynomial(v2);
    sys.singular2.form.components = {zero, zero, (y2 * -2.0), x2};

    // regular j: F_j = y_j - (slope_j x_j + offset_j)
    sys.regular1 = y1 - (x1 * slope1 + Polynomial::constant(d, offset1));
    sys.regular2 = y2 - (x2 * slope2 + Polynomial::constant(d, offset2));
    return sys;
}

} // namespace polylab::pfaffrolle
