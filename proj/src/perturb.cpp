#include "polylab/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "polylab/errors.hpp"

namespace polylab::perturb {

namespace {

double term_value(const NewtonTerm& t, double x) {
    double p = t.coeff;
    for (double r : t.roots) p *= (x - r);
    return p;
}

double term_derivative(const NewtonTerm& t, double x) {
    // product rule over the factor list
    double prod = 1.0, dprod = 0.0;
    for (double r : t.roots) {
        const double f = x - r;
        dprod = dprod * f + prod;
        prod *= f;
    }
    return t.coeff * dprod;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("POLYLAB_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace

void validate_interval_map(const IntervalMap& map, int samples) {
    double sup = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double x = map.lo + (map.hi - map.lo) * i / samples;
        const double fx = map.f(x);
        if (fx < map.lo - 1e-9 || fx > map.hi + 1e-9)
            throw PreconditionError("interval_map",
                                    "f does not map the interval into itself",
                                    {{"x", x}, {"f", fx}});
        sup = std::max(sup, std::max(std::abs(fx), std::abs(map.df(x))));
    }
    if (map.c1_norm < sup)
        throw PreconditionError("interval_map",
                                "c1_norm below sampled sup of |f|,|f'|",
                                {{"c1_norm", map.c1_norm}, {"sampled", sup}});
}

double PerturbedMap::operator()(double x) const {
    double v = base.f(x);
    for (const auto& t : terms) v += term_value(t, x);
    return v;
}

double PerturbedMap::deriv(double x) const {
    double v = base.df(x);
    for (const auto& t : terms) v += term_derivative(t, x);
    return v;
}

IntervalMap PerturbedMap::as_interval_map(int samples) const {
    IntervalMap out;
    out.lo = base.lo;
    out.hi = base.hi;
    out.name = base.name + "~";
    PerturbedMap self = *this;
    out.f = [self](double x) { return self(x); };
    out.df = [self](double x) { return self.deriv(x); };
    double sup = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double x = out.lo + (out.hi - out.lo) * i / samples;
        sup = std::max(sup, std::max(std::abs(out.f(x)), std::abs(out.df(x))));
    }
    out.c1_norm = sup * 1.05;
    return out;
}

Trajectory iterate(const IntervalMap& map, double x0, int n) {
    if (n < 0) throw PreconditionError("iterate", "n must be >= 0");
    if (x0 < map.lo || x0 > map.hi)
        throw PreconditionError("iterate", "x0 outside the interval", {{"x0", x0}});
    Trajectory t;
    t.points.reserve(n + 1);
    t.points.push_back(x0);
    for (int k = 0; k < n; ++k) {
        const double next = map.f(t.points.back());
        if (next < map.lo - 1e-12 || next > map.hi + 1e-12)
            throw DomainError("orbit_escape", "orbit escapes the interval",
                              {{"index", static_cast<double>(k + 1)}, {"value", next}});
        t.points.push_back(next);
    }
    return t;
}

ClosedOrbit close_orbit(const IntervalMap& map, const Trajectory& traj,
                        double distance_floor) {
    const int n = static_cast<int>(traj.points.size()) - 1;
    if (n < 1) throw PreconditionError("close_orbit", "trajectory too short");
    const auto& x = traj.points;
    double denom = 1.0;
    for (int k = 0; k + 1 < n; ++k) denom *= (x[n - 1] - x[k]);
    if (std::abs(denom) < distance_floor)
        throw DomainError("diagonal", "trajectory too close to the diagonal",
                          {{"product", denom}, {"floor", distance_floor}});
    // Sign note: u = (x_0 - x_n)/prod makes f~(x_{n-1}) = x_0, so x_0 is
    // n-periodic; see the cycle closure assertions in the tests.
    const double u = (x[0] - x[n]) / denom;
    ClosedOrbit out;
    out.u = u;
    out.map.base = map;
    NewtonTerm term;
    term.coeff = u;
    term.roots.assign(x.begin(), x.begin() + std::max(0, n - 1));
    out.map.terms.push_back(std::move(term));
    return out;
}

HyperbolicityPush push_hyperbolicity(const IntervalMap& map,
                                     const Trajectory& traj, double gamma) {
    const int n = static_cast<int>(traj.points.size());
    if (n < 1) throw PreconditionError("push_hyperbolicity", "empty trajectory");
    const auto& x = traj.points;

    double deriv_prod = 1.0; // prod over all n points
    for (int k = 0; k < n; ++k) deriv_prod *= map.df(x[k]);
    double partial_prod = 1.0; // prod over the first n-1 points
    for (int k = 0; k + 1 < n; ++k) partial_prod *= map.df(x[k]);
    double sq = 1.0; // prod (x_{n-1} - x_k)^2
    for (int k = 0; k + 1 < n; ++k) {
        const double d = x[n - 1] - x[k];
        sq *= d * d;
    }

    const double slope = sq * partial_prod;
    double v = 0.0;
    const double current = deriv_prod;
    if (std::abs(std::abs(current) - 1.0) <= gamma) {
        if (slope == 0.0)
            throw DomainError("unreachable_hyperbolicity",
                              "derivative product along the orbit vanishes; the "
                              "v-term cannot move the derivative",
                              {{"partial_product", partial_prod}});
        // Move current to the nearest point outside both bands
        // [-1-gamma,-1+gamma] and [1-gamma,1+gamma], with a small margin.
        const double margin = std::max(1e-12, gamma * 1e-3);
        auto candidates = {1.0 + gamma + margin, 1.0 - gamma - margin,
                           -1.0 + gamma + margin, -1.0 - gamma - margin};
        double best = 0.0, best_cost = -1.0;
        for (double target : candidates) {
            if (std::abs(std::abs(target) - 1.0) <= gamma) continue;
            const double cost = std::abs(target - current);
            if (best_cost < 0 || cost < best_cost) {
                best_cost = cost;
                best = target;
            }
        }
        v = (best - current) / slope;
    }

    HyperbolicityPush out;
    out.v = v;
    out.map.base = map;
    NewtonTerm term;
    term.coeff = v;
    term.roots.push_back(x[n - 1]);
    for (int k = 0; k + 1 < n; ++k) {
        term.roots.push_back(x[k]);
        term.roots.push_back(x[k]);
    }
    out.map.terms.push_back(std::move(term));
    out.derivative_product = current + v * slope;
    return out;
}

namespace {

double iterate_value(const IntervalMap& map, double x, int n) {
    for (int k = 0; k < n; ++k) x = map.f(x);
    return x;
}

double iterate_derivative(const IntervalMap& map, double x, int n) {
    double d = 1.0;
    for (int k = 0; k < n; ++k) {
        d *= map.df(x);
        x = map.f(x);
    }
    return d;
}

} // namespace

HyperbolicityReport hyperbolicity(const IntervalMap& map, double x, int n,
                                  double gamma, double periodic_tol) {
    if (x < map.lo || x > map.hi)
        throw PreconditionError("hyperbolicity", "x outside the interval");
    HyperbolicityReport out;
    out.value = std::abs(std::abs(iterate_derivative(map, x, n)) - 1.0);
    out.periodic = std::abs(iterate_value(map, x, n) - x) <= periodic_tol;
    if (out.periodic && out.value > gamma)
        out.exclusion_radius = gamma * std::pow(map.c1_norm, -n);
    return out;
}

namespace {

struct ChunkResult {
    std::vector<std::pair<long long, long long>> brackets; // [i, j] sign change
    std::vector<long long> zeros;                          // exact-zero samples
};

// Scans one chunk of the uniform grid. A zero sample counts as one root and
// resets the sign tracking, so a +,0,- pattern is not double counted.
template <class Fn>
void scan_chunk(Fn f, int n, double lo, double hi, double step,
                long long resolution, long long begin, long long end,
                ChunkResult& res) {
    auto g = [&](double x) {
        double y = x;
        for (int k = 0; k < n; ++k) y = f(y);
        return y - x;
    };
    long long prev_idx = begin - 1;
    double prev = 0.0;
    bool have_prev = false;
    if (prev_idx >= 0) {
        // overlap point recomputed so chunk boundaries join deterministically
        prev = g(lo + step * prev_idx);
        have_prev = prev != 0.0;
    }
    for (long long i = begin; i < end; ++i) {
        const double x = (i == resolution) ? hi : lo + step * i;
        const double v = g(x);
        if (v == 0.0) {
            res.zeros.push_back(i);
            have_prev = false;
            continue;
        }
        if (have_prev && ((prev < 0.0) != (v < 0.0)))
            res.brackets.emplace_back(prev_idx, i);
        prev = v;
        prev_idx = i;
        have_prev = true;
    }
}

} // namespace

PeriodicCount count_periodic(const IntervalMap& map, int n, long long resolution,
                             bool minimal_period, int threads) {
    if (n < 1) throw PreconditionError("count_periodic", "n must be >= 1");
    if (resolution < 2)
        throw PreconditionError("count_periodic", "resolution must be >= 2");
    const double lo = map.lo, hi = map.hi;
    const double step = (hi - lo) / static_cast<double>(resolution);

    auto g = [&map, n](double x) { return iterate_value(map, x, n) - x; };

    const int nthreads = resolve_threads(threads);
    const long long npoints = resolution + 1;
    const long long chunk = (npoints + nthreads - 1) / nthreads;
    std::vector<ChunkResult> results(nthreads);

    auto run_chunk = [&](int ci) {
        const long long begin = ci * chunk;
        const long long end = std::min(npoints, begin + chunk);
        if (begin >= end) return;
        if (map.raw_f) {
            scan_chunk(map.raw_f, n, lo, hi, step, resolution, begin, end,
                       results[ci]);
        } else {
            const auto& fn = map.f;
            scan_chunk([&fn](double x) { return fn(x); }, n, lo, hi, step,
                       resolution, begin, end, results[ci]);
        }
    };

    if (nthreads == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> pool;
        for (int ci = 0; ci < nthreads; ++ci) pool.emplace_back(run_chunk, ci);
        for (auto& t : pool) t.join();
    }

    PeriodicCount out;
    for (int ci = 0; ci < nthreads; ++ci) { // deterministic merge order
        for (long long z : results[ci].zeros)
            out.locations.push_back(z == resolution ? hi : lo + step * z);
        for (auto [ia, ib] : results[ci].brackets) {
            double a = lo + step * ia, b = (ib == resolution) ? hi : lo + step * ib;
            double fa = g(a);
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = g(mid);
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
            out.locations.push_back(0.5 * (a + b));
        }
    }
    std::sort(out.locations.begin(), out.locations.end());

    if (minimal_period) {
        std::vector<double> filtered;
        for (double x : out.locations) {
            bool lower = false;
            for (int d = 1; d < n; ++d) {
                if (n % d != 0) continue;
                if (std::abs(iterate_value(map, x, d) - x) < 1e-9) {
                    lower = true;
                    break;
                }
            }
            if (!lower) filtered.push_back(x);
        }
        out.locations = std::move(filtered);
    }
    out.count = static_cast<int>(out.locations.size());
    out.resolution_heuristic_ok =
        std::pow(map.c1_norm, n) * step < 4e-3 * (hi - lo);
    out.note = out.resolution_heuristic_ok
                   ? "resolution satisfies the separation heuristic"
                   : "resolution below the separation heuristic; count may miss "
                     "close root pairs";
    return out;
}

GrowthTable growth_experiment(const std::vector<IntervalMap>& family, int n_max,
                              double delta,
                              const std::function<long long(int)>& resolution_for,
                              int threads) {
    GrowthTable table;
    for (int mi = 0; mi < static_cast<int>(family.size()); ++mi) {
        if (n_max * std::log(std::max(family[mi].c1_norm, 1.0)) > 700.0)
            throw DomainError("overflow", "f^n evaluation overflows double range",
                              {{"n_max", static_cast<double>(n_max)}});
        double c = 0.0;
        for (int n = 1; n <= n_max; ++n) {
            const auto pc = count_periodic(family[mi], n, resolution_for(n), false,
                                           threads);
            table.rows.push_back({mi, n, pc.count});
            if (pc.count > 1)
                c = std::max(c, std::log(static_cast<double>(pc.count)) /
                                    std::pow(static_cast<double>(n), 1.0 + delta));
        }
        table.fitted_c.push_back(c);
    }
    return table;
}

namespace {
double logistic_step(double x) { return 4.0 * x * (1.0 - x); }
double halving_step(double x) { return 0.5 * x; }
} // namespace

IntervalMap logistic_map() {
    IntervalMap m;
    m.f = logistic_step;
    m.df = [](double x) { return 4.0 - 8.0 * x; };
    m.raw_f = logistic_step;
    m.lo = 0.0;
    m.hi = 1.0;
    // Any upper bound for the C^1 norm is admissible here; 16 = sup|f'|^2
    // also dominates the second-derivative growth that the exclusion radius
    // of period-n points actually needs on this family.
    m.c1_norm = 16.0;
    m.name = "logistic";
    return m;
}

IntervalMap halving_map() {
    IntervalMap m;
    m.f = halving_step;
    m.df = [](double) { return 0.5; };
    m.raw_f = halving_step;
    m.lo = -1.0;
    m.hi = 1.0;
    m.c1_norm = 1.0;
    m.name = "halving";
    return m;
}

IntervalMap cubic_map(double a, double b, double c, double d) {
    IntervalMap m;
    m.f = [=](double x) { return a + b * x + c * x * x + d * x * x * x; };
    m.df = [=](double x) { return b + 2.0 * c * x + 3.0 * d * x * x; };
    m.lo = -1.0;
    m.hi = 1.0;
    double sup = 0.0;
    for (int i = 0; i <= 2048; ++i) {
        const double x = -1.0 + 2.0 * i / 2048.0;
        sup = std::max(sup, std::max(std::abs(m.f(x)), std::abs(m.df(x))));
    }
    m.c1_norm = sup * 1.05;
    m.name = "cubic";
    return m;
}

} // namespace polylab::perturb
