#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace polylab::continuation {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Map R^d -> R^{d-1} with exact Jacobian rows; level sets are curves.
struct SmoothSystem {
    int dim = 0;
    std::function<Vec(const Vec&)> eval;     // d-1 components
    std::function<Mat(const Vec&)> jacobian; // (d-1) x d
};

struct CurveComponent {
    std::vector<Vec> points;
    std::vector<Vec> tangents; // unit, oriented along the traverse
    bool closed = false;
    bool boundary = false; // both endpoints on the sphere |x| = radius
    int seed_index = -1;
    std::string diagnostic; // non-empty when truncated by corrector failure
};

struct TraceOptions {
    double radius = 1.0;       // tracing confined to |x| <= radius
    double step = 1e-3;        // initial step (absolute)
    double min_step = 1e-7;
    double max_step = 0.0;     // 0 -> 8x step
    double corrector_tol = 1e-12;
    int max_corrector_iters = 8;
    int max_steps = 200000;
    double max_turn = 0.3;     // radians per step before halving
    int multistart = 64;       // Halton seeds for component discovery
    double closure_factor = 1.5; // closure detected within factor*step of start
};

// Gauss-Newton projection of x onto {G = value}; returns true on success.
bool project_to_level(const SmoothSystem& sys, const Vec& value, Vec& x,
                      double tol, int max_iters = 50);

// Unit kernel vector of the (d-1) x d Jacobian.
Vec kernel_direction(const Mat& jac);

// Traces all components of G^{-1}(value) inside the radius ball found from
// deterministic multistart seeds. Near-singular seeds (tiny Jacobian
// singular value) are rejected.
std::vector<CurveComponent> trace_level_curve(const SmoothSystem& sys,
                                              const Vec& value,
                                              const TraceOptions& opts);

// Crossing counts along a polyline: sign changes of scalar(p) - level,
// with exact zeros counted once.
int count_crossings(const CurveComponent& comp,
                    const std::function<double(const Vec&)>& scalar,
                    double level);

} // namespace polylab::continuation
