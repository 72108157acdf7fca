#include "polylab/abelint.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "polylab/errors.hpp"

namespace polylab::abelint {

namespace {

std::span<const double> as_span(const Vec& x) {
    return std::span<const double>(x.data(), x.size());
}

continuation::SmoothSystem level_system(const HamiltonianProblem& prob,
                                        double h) {
    continuation::SmoothSystem sys;
    sys.dim = 2;
    const Polynomial H = prob.H;
    const Polynomial Hx = H.derivative(0);
    const Polynomial Hy = H.derivative(1);
    sys.eval = [H, h](const Vec& p) {
        Vec v(1);
        v[0] = H.eval(as_span(p)) - h;
        return v;
    };
    sys.jacobian = [Hx, Hy](const Vec& p) {
        continuation::Mat J(1, 2);
        J(0, 0) = Hx.eval(as_span(p));
        J(0, 1) = Hy.eval(as_span(p));
        return J;
    };
    return sys;
}

} // namespace

Oval trace_oval(const HamiltonianProblem& prob, double h, const Vec& seed,
                double step) {
    auto sys = level_system(prob, h);
    Vec x = seed;
    if (!continuation::project_to_level(sys, Vec::Zero(1), x, 1e-12, 100))
        throw DomainError("seed", "seed does not reach the level curve",
                          {{"h", h}});
    {
        const continuation::Mat J = sys.jacobian(x);
        if (J.norm() < 1e-8)
            throw DomainError("critical_point",
                              "level curve passes through a critical point of H",
                              {{"h", h}});
    }
    continuation::TraceOptions opts;
    opts.radius = prob.working_box * 2.0; // generous; box check below
    opts.step = step;
    opts.max_steps = 400000;
    continuation::Vec value = Vec::Zero(1);

    // single-component traverse from the projected seed
    continuation::CurveComponent comp;
    {
        // forward traverse until closure or box escape
        Vec t0 = continuation::kernel_direction(sys.jacobian(x));
        Vec p = x;
        Vec t = t0;
        comp.points.push_back(p);
        comp.tangents.push_back(t);
        double arc = 0.0;
        bool closed = false;
        for (int it = 0; it < opts.max_steps; ++it) {
            Vec cand = p + step * t;
            if (!continuation::project_to_level(sys, value, cand, 1e-12, 12))
                throw DomainError("open_curve", "corrector failed along the oval",
                                  {{"h", h}});
            Vec tn = continuation::kernel_direction(sys.jacobian(cand));
            if (tn.dot(t) < 0) tn = -tn;
            arc += (cand - p).norm();
            p = cand;
            t = tn;
            if (p.lpNorm<Eigen::Infinity>() > prob.working_box)
                throw DomainError("open_curve",
                                  "level curve escapes the working box",
                                  {{"h", h}});
            comp.points.push_back(p);
            comp.tangents.push_back(t);
            if (arc > 3.0 * step && (p - x).norm() < 1.5 * step) {
                closed = true;
                break;
            }
        }
        if (!closed)
            throw DomainError("open_curve", "level curve did not close",
                              {{"h", h}});
        comp.points.push_back(x); // matching first/last points
        comp.closed = true;

        // resample at uniform arc length; irregular chords (in particular
        // the closing seam) would spoil the Richardson pairing
        std::vector<double> cum{0.0};
        for (std::size_t i = 1; i < comp.points.size(); ++i)
            cum.push_back(cum.back() +
                          (comp.points[i] - comp.points[i - 1]).norm());
        const double L = cum.back();
        // even count: the half-density polyline then tiles it exactly
        const int N = 2 * std::max<int>(8, std::llround(L / (2.0 * step)));
        std::vector<Vec> resampled;
        resampled.reserve(N + 1);
        std::size_t seg = 0;
        for (int k = 0; k < N; ++k) {
            const double s = L * k / N;
            while (seg + 1 < cum.size() - 1 && cum[seg + 1] < s) ++seg;
            const double den = cum[seg + 1] - cum[seg];
            const double t = den > 0 ? (s - cum[seg]) / den : 0.0;
            Vec q = comp.points[seg] +
                    t * (comp.points[seg + 1] - comp.points[seg]);
            if (!continuation::project_to_level(sys, value, q, 1e-12, 12))
                q = comp.points[seg];
            resampled.push_back(q);
        }
        resampled.push_back(resampled.front());
        comp.points = std::move(resampled);
    }

    Oval oval;
    oval.h = h;
    oval.points = comp.points;
    if (polygon_area(oval) < 0.0)
        std::reverse(oval.points.begin(), oval.points.end());
    return oval;
}

double polygon_area(const Oval& oval) {
    double acc = 0.0;
    const auto& pts = oval.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        acc += pts[i][0] * pts[i + 1][1] - pts[i + 1][0] * pts[i][1];
    }
    return 0.5 * acc;
}

namespace {

double integral_over_polyline(const HamiltonianProblem& prob,
                              const std::vector<Vec>& pts, std::size_t stride) {
    double acc = 0.0;
    std::size_t i = 0;
    while (i + stride < pts.size()) {
        const Vec& a = pts[i];
        const Vec& b = pts[std::min(i + stride, pts.size() - 1)];
        const Vec mid = 0.5 * (a + b);
        const double dx = b[0] - a[0];
        const double dy = b[1] - a[1];
        acc += prob.P.eval(as_span(mid)) * dx + prob.Q.eval(as_span(mid)) * dy;
        i += stride;
    }
    if (i < pts.size() - 1) {
        const Vec& a = pts[i];
        const Vec& b = pts.back();
        const Vec mid = 0.5 * (a + b);
        acc += prob.P.eval(as_span(mid)) * (b[0] - a[0]) +
               prob.Q.eval(as_span(mid)) * (b[1] - a[1]);
    }
    return acc;
}

} // namespace

double abelian_integral(const HamiltonianProblem& prob, const Oval& oval) {
    const double fine = integral_over_polyline(prob, oval.points, 1);
    const double coarse = integral_over_polyline(prob, oval.points, 2);
    // midpoint rule is O(h^2); one Richardson step
    return fine + (fine - coarse) / 3.0;
}

ZeroReport count_zeros(const HamiltonianProblem& prob,
                       const std::vector<double>& h_grid, const Vec& seed0,
                       double h_tol) {
    ZeroReport report;
    Vec seed = seed0;
    auto eval_at = [&](double h, Vec& carry_seed) {
        Oval oval = trace_oval(prob, h, carry_seed, prob.trace_step);
        carry_seed = oval.points.front(); // continue the branch
        return abelian_integral(prob, oval);
    };

    double max_abs = 0.0;
    std::vector<double> values;
    for (double h : h_grid) {
        const double v = eval_at(h, seed);
        report.samples.push_back({h, v});
        values.push_back(v);
        max_abs = std::max(max_abs, std::abs(v));
    }
    if (max_abs < 1e-12) {
        report.identically_zero = true;
        return report;
    }
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        if (values[i] == 0.0) {
            report.zeros.push_back(h_grid[i]);
            continue;
        }
        if ((values[i] < 0.0) != (values[i + 1] < 0.0)) {
            double a = h_grid[i], b = h_grid[i + 1];
            double fa = values[i];
            Vec br_seed = seed0;
            // walk the branch up to `a` first so each bisection stays on it
            for (std::size_t k = 0; k <= i; ++k) {
                Oval o = trace_oval(prob, h_grid[k], br_seed, prob.trace_step);
                br_seed = o.points.front();
            }
            for (int it = 0; it < 60 && (b - a) > h_tol; ++it) {
                const double mid = 0.5 * (a + b);
                Vec s = br_seed;
                const double fm = eval_at(mid, s);
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
            }
            report.zeros.push_back(0.5 * (a + b));
        }
    }
    return report;
}

} // namespace polylab::abelint
