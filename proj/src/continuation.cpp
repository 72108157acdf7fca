#include "polylab/continuation.hpp"

#include <algorithm>
#include <cmath>

#include "polylab/errors.hpp"
#include "polylab/halton.hpp"

namespace polylab::continuation {

bool project_to_level(const SmoothSystem& sys, const Vec& value, Vec& x,
                      double tol, int max_iters) {
    for (int it = 0; it < max_iters; ++it) {
        const Vec r = sys.eval(x) - value;
        if (r.norm() <= tol) return true;
        const Mat J = sys.jacobian(x);
        // minimum-norm Gauss-Newton step
        Vec dx = J.completeOrthogonalDecomposition().solve(r);
        if (!dx.allFinite()) return false;
        double damping = 1.0;
        const double r0 = r.norm();
        for (int ls = 0; ls < 12; ++ls) {
            Vec cand = x - damping * dx;
            if ((sys.eval(cand) - value).norm() < r0) {
                x = cand;
                break;
            }
            damping *= 0.5;
            if (ls == 11) x = x - damping * dx;
        }
    }
    return (sys.eval(x) - value).norm() <= tol;
}

Vec kernel_direction(const Mat& jac) {
    Eigen::JacobiSVD<Mat> svd(jac, Eigen::ComputeFullV);
    Vec t = svd.matrixV().col(jac.cols() - 1);
    return t.normalized();
}

namespace {

// One-directional traverse from `start`; appends points until closure,
// boundary exit, step exhaustion, or corrector failure.
struct Traverse {
    std::vector<Vec> points;
    std::vector<Vec> tangents;
    bool closed = false;
    bool hit_boundary = false;
    std::string diagnostic;
};

Traverse traverse(const SmoothSystem& sys, const Vec& value, Vec start,
                  Vec direction, const TraceOptions& opts) {
    Traverse tr;
    const double max_step = opts.max_step > 0 ? opts.max_step : 8.0 * opts.step;
    // closure is armed only after the traverse has moved well away from the
    // seed; loops smaller than ~arm_dist are not traceable at this step size
    const double closure_dist = opts.closure_factor * max_step;
    const double arm_dist = 3.0 * closure_dist;
    bool armed = false;
    double h = opts.step;
    Vec x = start;
    Vec t = direction;
    tr.points.push_back(x);
    tr.tangents.push_back(t);
    double arc = 0.0;
    for (int step = 0; step < opts.max_steps; ++step) {
        bool advanced = false;
        while (h >= opts.min_step) {
            Vec cand = x + h * t;
            if (project_to_level(sys, value, cand, opts.corrector_tol,
                                 opts.max_corrector_iters)) {
                Vec tn = kernel_direction(sys.jacobian(cand));
                if (tn.dot(t) < 0) tn = -tn;
                const double turn = std::acos(std::clamp(tn.dot(t), -1.0, 1.0));
                if (turn <= opts.max_turn || h <= opts.min_step * 2.0) {
                    arc += (cand - x).norm();
                    x = cand;
                    t = tn;
                    advanced = true;
                    if (turn < 0.25 * opts.max_turn)
                        h = std::min(max_step, 1.5 * h);
                    break;
                }
            }
            h *= 0.5;
        }
        if (!advanced) {
            tr.diagnostic = "corrector divergence; component truncated";
            return tr;
        }
        if (x.norm() >= opts.radius) {
            // bisect back to the sphere along the last segment
            Vec inside = tr.points.back();
            Vec outside = x;
            for (int it = 0; it < 60; ++it) {
                Vec mid = 0.5 * (inside + outside);
                if (!project_to_level(sys, value, mid, opts.corrector_tol,
                                      opts.max_corrector_iters))
                    break;
                if (mid.norm() >= opts.radius)
                    outside = mid;
                else
                    inside = mid;
            }
            tr.points.push_back(outside);
            tr.tangents.push_back(t);
            tr.hit_boundary = true;
            return tr;
        }
        tr.points.push_back(x);
        tr.tangents.push_back(t);
        const double dist = (x - start).norm();
        if (!armed && dist > arm_dist) armed = true;
        if (armed && dist < closure_dist && t.dot(direction) > 0.0) {
            tr.closed = true;
            tr.points.push_back(start); // matching first/last points
            tr.tangents.push_back(direction);
            return tr;
        }
    }
    tr.diagnostic = "step budget exhausted";
    return tr;
}

} // namespace

std::vector<CurveComponent> trace_level_curve(const SmoothSystem& sys,
                                              const Vec& value,
                                              const TraceOptions& opts) {
    const int d = sys.dim;
    std::vector<CurveComponent> components;

    auto near_existing = [&](const Vec& p) {
        for (const auto& comp : components) {
            for (const auto& q : comp.points)
                if ((p - q).norm() < 10.0 * opts.step) return true;
        }
        return false;
    };

    const auto cube = halton_cube(opts.multistart, d, opts.radius);
    std::vector<Vec> seeds;
    for (int si = 0; si < static_cast<int>(cube.size()); ++si) {
        Vec x(d);
        for (int j = 0; j < d; ++j) x[j] = cube[si][j];
        if (!project_to_level(sys, value, x, opts.corrector_tol, 80)) continue;
        if (x.norm() > opts.radius) continue;
        // rank check at the seed: reject near-singular Jacobians
        Eigen::JacobiSVD<Mat> svd(sys.jacobian(x));
        if (svd.singularValues()(svd.singularValues().size() - 1) < 1e-8)
            continue;
        bool dup = false;
        for (const auto& s : seeds)
            if ((x - s).norm() < 10.0 * opts.step) dup = true;
        if (dup) continue;
        seeds.push_back(x);
    }

    for (int si = 0; si < static_cast<int>(seeds.size()); ++si) {
        const Vec& seed = seeds[si];
        if (near_existing(seed)) continue;
        const Vec dir = kernel_direction(sys.jacobian(seed));
        Traverse fwd = traverse(sys, value, seed, dir, opts);

        CurveComponent comp;
        comp.seed_index = si;
        if (fwd.closed) {
            comp.points = std::move(fwd.points);
            comp.tangents = std::move(fwd.tangents);
            comp.closed = true;
        } else {
            Traverse bwd = traverse(sys, value, seed, -dir, opts);
            // stitch: reversed backward traverse, then forward traverse
            for (auto it = bwd.points.rbegin(); it != bwd.points.rend(); ++it)
                comp.points.push_back(*it);
            for (auto it = bwd.tangents.rbegin(); it != bwd.tangents.rend(); ++it)
                comp.tangents.push_back(-*it);
            comp.points.insert(comp.points.end(), fwd.points.begin() + 1,
                               fwd.points.end());
            comp.tangents.insert(comp.tangents.end(), fwd.tangents.begin() + 1,
                                 fwd.tangents.end());
            comp.boundary = fwd.hit_boundary && bwd.hit_boundary;
            comp.diagnostic = fwd.diagnostic.empty() ? bwd.diagnostic
                                                     : fwd.diagnostic;
        }
        components.push_back(std::move(comp));
    }
    return components;
}

int count_crossings(const CurveComponent& comp,
                    const std::function<double(const Vec&)>& scalar,
                    double level) {
    int count = 0;
    bool have_prev = false;
    double prev = 0.0;
    for (const auto& p : comp.points) {
        const double v = scalar(p) - level;
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

} // namespace polylab::continuation
