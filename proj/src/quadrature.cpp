#include "polylab/quadrature.hpp"

#include <cmath>

#include "polylab/errors.hpp"

namespace polylab::quad {

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa,
             double b, double fb, double m, double fm, double whole,
             double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, fa, m, fm, lm, flm);
    const double right = simpson(f, m, fm, b, fb, rm, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = simpson(f, a, fa, b, fb, m, fm);
    return adapt(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

void require_pole_free(const std::function<double(double)>& denom, double a,
                       double b, int samples) {
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (lo == hi) {
        if (denom(lo) == 0.0)
            throw DomainError("pole", "integrand pole at the evaluation point",
                              {{"pole", lo}});
        return;
    }
    double prev = denom(lo);
    if (prev == 0.0)
        throw DomainError("pole", "integrand pole on the integration range",
                          {{"pole", lo}});
    for (int i = 1; i <= samples; ++i) {
        const double x = lo + (hi - lo) * i / samples;
        const double v = denom(x);
        if (v == 0.0)
            throw DomainError("pole", "integrand pole on the integration range",
                              {{"pole", x}});
        if ((prev < 0.0) != (v < 0.0)) {
            // bisect to report the pole location
            double xa = lo + (hi - lo) * (i - 1) / samples, xb = x, fa = prev;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (xa + xb);
                const double fm = denom(mid);
                if ((fa < 0.0) != (fm < 0.0))
                    xb = mid;
                else {
                    xa = mid;
                    fa = fm;
                }
            }
            throw DomainError("pole", "integrand pole on the integration range",
                              {{"pole", 0.5 * (xa + xb)}});
        }
        prev = v;
    }
}

} // namespace polylab::quad
