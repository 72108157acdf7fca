#include "polylab/chainstrata.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "polylab/errors.hpp"
#include "polylab/halton.hpp"
#include "polylab/rng.hpp"

namespace polylab::chainstrata {

namespace {

std::span<const double> as_span(const Vec& x) {
    return std::span<const double>(x.data(), x.size());
}

Mat outer_jacobian(const std::vector<Polynomial>& P, const Vec& y) {
    const int n = static_cast<int>(P.size());
    const int N = P.empty() ? 0 : P[0].nvars();
    Mat J(n, N);
    for (int i = 0; i < n; ++i) {
        auto g = P[i].gradient();
        for (int j = 0; j < N; ++j) J(i, j) = g[j].eval(as_span(y));
    }
    return J;
}

Vec outer_eval(const std::vector<Polynomial>& P, const Vec& y) {
    Vec v(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) v[i] = P[i].eval(as_span(y));
    return v;
}

// Damped Newton on P(F(x)) = b inside the radius ball.
std::optional<Vec> solve_chain(const ChainMapSpec& spec, const Vec& b, Vec x,
                               double radius, int max_iters = 60) {
    for (int it = 0; it < max_iters; ++it) {
        const Vec y = spec.F(x);
        const Vec r = outer_eval(spec.P, y) - b;
        if (r.norm() < 1e-12) {
            if (x.norm() <= radius) return x;
            return std::nullopt;
        }
        const Mat J = outer_jacobian(spec.P, y) * spec.dF(x); // n x n
        Eigen::FullPivLU<Mat> lu(J);
        if (!lu.isInvertible()) return std::nullopt;
        Vec dx = lu.solve(r);
        double damping = 1.0;
        const double r0 = r.norm();
        bool moved = false;
        for (int ls = 0; ls < 10; ++ls) {
            Vec cand = x - damping * dx;
            if ((outer_eval(spec.P, spec.F(cand)) - b).norm() < r0) {
                x = cand;
                moved = true;
                break;
            }
            damping *= 0.5;
        }
        if (!moved) x = x - damping * dx;
        if (x.norm() > 4.0 * radius) return std::nullopt;
    }
    return std::nullopt;
}

int count_preimages(const ChainMapSpec& spec, const Vec& b, double radius,
                    int multistart, int* discarded,
                    std::vector<Vec>* roots_out) {
    const auto starts = halton_cube(multistart, spec.n, radius);
    std::vector<Vec> roots;
    for (const auto& s : starts) {
        Vec x(spec.n);
        for (int i = 0; i < spec.n; ++i) x[i] = s[i];
        auto sol = solve_chain(spec, b, x, radius);
        if (!sol) {
            if (discarded) ++*discarded;
            continue;
        }
        bool dup = false;
        for (const auto& r : roots)
            if ((*sol - r).norm() < 1e-7 * std::max(1.0, radius)) dup = true;
        if (!dup) roots.push_back(*sol);
    }
    if (roots_out) *roots_out = roots;
    return static_cast<int>(roots.size());
}

} // namespace

bool outer_is_nontrivial(const ChainMapSpec& spec, unsigned seed) {
    auto g = rng::stream(seed, "outer-nontrivial");
    for (int t = 0; t < 16; ++t) {
        Vec y(spec.N);
        for (int i = 0; i < spec.N; ++i) y[i] = rng::uniform(g, -1.0, 1.0);
        Eigen::JacobiSVD<Mat> svd(outer_jacobian(spec.P, y));
        int rank = 0;
        for (int i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > 1e-10) ++rank;
        if (rank == spec.n) return true;
    }
    return false;
}

MultiplicityEstimate geometric_multiplicity(const ChainMapSpec& spec, double radius,
                                            const std::vector<Vec>& target_cloud,
                                            int multistart, unsigned seed) {
    if (!outer_is_nontrivial(spec, seed))
        throw PreconditionError("geometric_multiplicity",
                                "outer polynomial is trivial (image has no "
                                "interior)");
    MultiplicityEstimate est;
    est.targets_tried = static_cast<int>(target_cloud.size());
    for (const auto& b : target_cloud) {
        int discarded = 0;
        std::vector<Vec> roots;
        const int count =
            count_preimages(spec, b, radius, multistart, &discarded, &roots);
        est.discarded_starts += discarded;
        if (count > est.value) {
            est.value = count;
            est.witnesses = roots;
        }
    }
    return est;
}

namespace {

ChainMapSpec homotopy_spec(const ChainMapSpec& spec, double t) {
    // F_t = t F + (1-t) L_F with L_F the linearization at 0
    const Vec F0 = spec.F(Vec::Zero(spec.n));
    const Mat J0 = spec.dF(Vec::Zero(spec.n));
    ChainMapSpec out = spec;
    out.F = [t, F0, J0, base = spec.F](const Vec& x) {
        Vec lin = F0 + J0 * x;
        return (t * base(x) + (1.0 - t) * lin).eval();
    };
    out.dF = [t, J0, base = spec.dF](const Vec& x) {
        return (t * base(x) + (1.0 - t) * J0).eval();
    };
    return out;
}

} // namespace

LinearizeComparison linearize_compare(const ChainMapSpec& spec,
                                      const std::vector<double>& delta_cascade,
                                      double radius, int multistart,
                                      unsigned seed) {
    if (static_cast<int>(delta_cascade.size()) != spec.n)
        throw PreconditionError("linearize_compare",
                                "cascade point must have n coordinates");
    Vec b(spec.n);
    for (int i = 0; i < spec.n; ++i) b[i] = delta_cascade[i];

    LinearizeComparison cmp;
    cmp.bezout_bound = 1;
    for (const auto& p : spec.P)
        cmp.bezout_bound *= std::max(1, p.total_degree());

    const double ts[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (double t : ts) {
        ChainMapSpec st = homotopy_spec(spec, t);
        std::vector<Vec> roots;
        const int c = count_preimages(st, b, radius, multistart, nullptr, &roots);
        cmp.homotopy_counts.push_back(c);
        // transversality along the homotopy: d(P . F_t) must have full rank
        // at every preimage
        for (const auto& x : roots) {
            const Mat J = outer_jacobian(spec.P, st.F(x)) * st.dF(x);
            Eigen::JacobiSVD<Mat> svd(J);
            int rank = 0;
            for (int i = 0; i < svd.singularValues().size(); ++i)
                if (svd.singularValues()(i) > 1e-9) ++rank;
            if (rank < spec.n) {
                cmp.transversal = false;
                cmp.offending_rank = rank;
            }
        }
    }
    cmp.count_linear = cmp.homotopy_counts.front();
    cmp.count_f = cmp.homotopy_counts.back();
    cmp.equal = cmp.count_f == cmp.count_linear;
    cmp.homotopy_constant =
        std::adjacent_find(cmp.homotopy_counts.begin(), cmp.homotopy_counts.end(),
                           std::not_equal_to<int>()) == cmp.homotopy_counts.end();
    if (cmp.count_linear > cmp.bezout_bound)
        throw DomainError("bezout", "linear count exceeds the Bezout bound",
                          {{"count", static_cast<double>(cmp.count_linear)},
                           {"bound", static_cast<double>(cmp.bezout_bound)}});
    if (!cmp.transversal)
        throw DomainError("transversality",
                          "rank deficiency at a homotopy preimage",
                          {{"rank", static_cast<double>(cmp.offending_rank)}});
    return cmp;
}

bool cone_membership(const ConeSpec& cone, const std::vector<double>& a) {
    if (static_cast<int>(a.size()) != cone.n)
        throw PreconditionError("cone_membership", "point arity mismatch");
    if (!(std::abs(a[0]) > 0.0 && std::abs(a[0]) < cone.delta)) return false;
    double running = std::abs(a[0]);
    for (int j = 1; j < cone.n; ++j) {
        const double bound = cone.defective ? std::pow(std::abs(a[0]), cone.m)
                                            : std::pow(running, cone.m);
        if (!(std::abs(a[j]) > 0.0 && std::abs(a[j]) < bound)) return false;
        running *= std::abs(a[j]);
    }
    return true;
}

LimitingSetSample limiting_set_sample(const std::vector<Polynomial>& P,
                                      const ConeSpec& cone,
                                      const std::vector<double>& delta_ladder,
                                      int samples_per_rung, double working_box,
                                      unsigned seed) {
    const int n = cone.n;
    ChainMapSpec spec;
    spec.n = n;
    spec.N = n;
    spec.P = P;
    spec.F = [](const Vec& x) { return x; };
    spec.dF = [n](const Vec&) { return Mat::Identity(n, n); };
    if (!outer_is_nontrivial(spec, seed))
        throw PreconditionError("limiting_set_sample", "P must be nontrivial");

    LimitingSetSample out;
    auto g = rng::stream(seed, "limset");
    for (std::size_t rung = 0; rung < delta_ladder.size(); ++rung) {
        ConeSpec rung_cone = cone;
        rung_cone.delta = delta_ladder[rung];
        std::vector<Vec> rung_cloud;
        for (int s = 0; s < samples_per_rung; ++s) {
            // sample a cone point: a_1 in (0, delta), a_{j+1} within its bound
            std::vector<double> a(n);
            a[0] = rng::uniform(g, 1e-12, rung_cone.delta) *
                   (rng::uniform(g, -1.0, 1.0) > 0 ? 1.0 : -1.0);
            double running = std::abs(a[0]);
            for (int j = 1; j < n; ++j) {
                const double bound = rung_cone.defective
                                         ? std::pow(std::abs(a[0]), cone.m)
                                         : std::pow(running, cone.m);
                a[j] = rng::uniform(g, 0.0, bound) *
                       (rng::uniform(g, -1.0, 1.0) > 0 ? 1.0 : -1.0);
                if (a[j] == 0.0) a[j] = bound * 0.5;
                running *= std::abs(a[j]);
            }
            if (!cone_membership(rung_cone, a)) continue;
            Vec b(n);
            for (int i = 0; i < n; ++i) b[i] = a[i];
            // multistart preimages within the working box
            const auto starts = halton_cube(24, n, working_box);
            for (const auto& st : starts) {
                Vec x(n);
                for (int i = 0; i < n; ++i) x[i] = st[i];
                auto sol = solve_chain(spec, b, x, working_box * 2.0);
                if (!sol) continue;
                if (sol->lpNorm<Eigen::Infinity>() > working_box) continue;
                bool dup = false;
                for (const auto& q : rung_cloud)
                    if ((*sol - q).norm() < 1e-9) dup = true;
                if (!dup) rung_cloud.push_back(*sol);
            }
        }
        if (rung_cloud.empty()) {
            out.skipped_rungs.push_back(static_cast<int>(rung));
        } else {
            out.ladder_used.push_back(delta_ladder[rung]);
            if (static_cast<int>(rung_cloud.size()) >= 8)
                out.finest_cloud = rung_cloud;
            out.cloud.insert(out.cloud.end(), rung_cloud.begin(),
                             rung_cloud.end());
        }
    }

    // Local dimension from the finest rung: that is the cloud whose
    // accumulation points approximate the delta -> 0 limiting set.
    const auto& probe =
        out.finest_cloud.empty() ? out.cloud : out.finest_cloud;
    if (probe.empty()) {
        out.local_dimension = 0;
        return out;
    }
    const double eps = 0.35;
    const double floor_abs = 1e-2 * eps;
    int votes = 0;
    std::vector<int> dim_hist(n + 1, 0);
    for (const auto& center : probe) {
        std::vector<Vec> nbrs;
        for (const auto& q : probe)
            if ((q - center).norm() < eps) nbrs.push_back(q);
        if (static_cast<int>(nbrs.size()) < 4) continue;
        Vec mean = Vec::Zero(n);
        for (const auto& q : nbrs) mean += q;
        mean /= static_cast<double>(nbrs.size());
        Mat cov = Mat::Zero(n, n);
        for (const auto& q : nbrs) cov += (q - mean) * (q - mean).transpose();
        cov /= static_cast<double>(nbrs.size());
        Eigen::SelfAdjointEigenSolver<Mat> es(cov);
        const Vec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        const double top = ev.maxCoeff();
        // principal values below 1e-3 of the largest axis count as
        // collapsed; the absolute floor keeps point clusters 0-dimensional
        int dim = 0;
        for (int i = 0; i < n; ++i)
            if (ev[i] >= std::max(1e-3 * top, floor_abs)) ++dim;
        ++dim_hist[dim];
        ++votes;
    }
    if (votes == 0) {
        out.local_dimension = 0;
        return out;
    }
    int best_dim = 0;
    for (int d = 0; d <= n; ++d)
        if (dim_hist[d] > dim_hist[best_dim]) best_dim = d;
    out.local_dimension = best_dim;
    return out;
}

std::optional<Vec> project_to_stratum(const StratumSample& s, Vec guess,
                                      double tol) {
    const int d = static_cast<int>(guess.size());
    const int c = static_cast<int>(s.equations.size());
    if (c > 0) {
        for (int it = 0; it < 80; ++it) {
            Vec r(c);
            for (int i = 0; i < c; ++i) r[i] = s.equations[i].eval(as_span(guess));
            if (r.norm() <= tol) break;
            Mat J(c, d);
            for (int i = 0; i < c; ++i) {
                auto g = s.equations[i].gradient();
                for (int j = 0; j < d; ++j) J(i, j) = g[j].eval(as_span(guess));
            }
            Vec dx = J.completeOrthogonalDecomposition().solve(r);
            if (!dx.allFinite()) return std::nullopt;
            guess -= dx;
        }
        Vec r(c);
        for (int i = 0; i < c; ++i) r[i] = s.equations[i].eval(as_span(guess));
        if (r.norm() > 1e-9) return std::nullopt;
    }
    for (const auto& ineq : s.inequalities)
        if (!(ineq.eval(as_span(guess)) > 0.0)) return std::nullopt;
    return guess;
}

std::optional<Mat> tangent_frame(const StratumSample& s, const Vec& x) {
    const int d = static_cast<int>(x.size());
    const int c = static_cast<int>(s.equations.size());
    if (c == 0) return Mat::Identity(d, d).leftCols(s.dimension);
    Mat J(c, d);
    for (int i = 0; i < c; ++i) {
        auto g = s.equations[i].gradient();
        for (int j = 0; j < d; ++j) J(i, j) = g[j].eval(as_span(x));
    }
    Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullV);
    const int rank_expected = d - s.dimension;
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-10 * std::max(1.0, sv(0))) ++rank;
    if (rank != rank_expected) return std::nullopt; // rank-deficient sample
    return svd.matrixV().rightCols(s.dimension).eval();
}

double principal_angle(const Mat& A, const Mat& B) {
    if (A.cols() != B.cols()) return M_PI / 2.0;
    if (A.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(A.transpose() * B);
    const double smin =
        svd.singularValues()(svd.singularValues().size() - 1);
    return std::acos(std::clamp(smin, -1.0, 1.0));
}

double containment_angle(const Mat& K, const Mat& T) {
    if (K.cols() == 0) return 0.0;
    if (T.cols() == 0) return M_PI / 2.0;
    const Mat residual = K - T * (T.transpose() * K);
    Eigen::JacobiSVD<Mat> svd(residual);
    const double smax = svd.singularValues()(0);
    return std::asin(std::clamp(smax, 0.0, 1.0));
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::PASS: return "PASS";
        case Verdict::FAIL: return "FAIL";
        default: return "INCONCLUSIVE";
    }
}

SequenceGenerator radial_generator(const Vec& x, const Vec& direction,
                                   double scale) {
    return [x, direction, scale](int k) {
        return (x + std::pow(scale, k + 1) * direction).eval();
    };
}

SequenceGenerator path_generator(std::function<Vec(double)> path, double t0,
                                 double shrink) {
    return [path, t0, shrink](int k) { return path(t0 * std::pow(shrink, k)); };
}

SequenceGenerator random_on_stratum_generator(const Vec& x, int dim,
                                              unsigned seed) {
    return [x, dim, seed](int k) {
        auto g = rng::stream(seed, "seq", static_cast<std::uint64_t>(k));
        Vec dir(x.size());
        for (int i = 0; i < x.size(); ++i) dir[i] = rng::uniform(g, -1.0, 1.0);
        dir.normalize();
        return (x + std::pow(0.6, k + 1) * dir).eval();
    };
}

namespace {

struct FrameSequence {
    std::vector<Mat> frames;
    std::vector<Vec> points;
    bool converged = false;
};

// Collects frames along the projected sequence and decides Grassmannian
// convergence by principal angles over the trailing window.
template <class FrameFn>
FrameSequence collect_frames(const StratumSample& Vj, const Vec& x,
                             const SequenceGenerator& gen, FrameFn frame_of,
                             const RegularityOptions& opts) {
    FrameSequence seq;
    for (int k = 0; k < opts.sequence_length; ++k) {
        auto proj = project_to_stratum(Vj, gen(k));
        if (!proj) continue;
        auto frame = frame_of(*proj);
        if (!frame) continue; // rank-deficient sample discarded
        seq.points.push_back(*proj);
        seq.frames.push_back(*frame);
    }
    const int w = opts.convergence_window;
    if (static_cast<int>(seq.frames.size()) >= w + 1) {
        bool conv = true;
        const int last = static_cast<int>(seq.frames.size());
        for (int i = last - w; i < last - 1; ++i)
            if (principal_angle(seq.frames[i], seq.frames[i + 1]) >
                opts.convergence_tol)
                conv = false;
        // the sequence must actually approach x
        if (!seq.points.empty() &&
            (seq.points.back() - x).norm() > 1e-3)
            conv = false;
        seq.converged = conv;
    }
    return seq;
}

RegularityResult decide(const FrameSequence& seq, const Mat& small_plane,
                        const RegularityOptions& opts) {
    RegularityResult res;
    if (!seq.converged) {
        res.verdict = Verdict::INCONCLUSIVE;
        res.note = "no Grassmannian convergence detected along the sequence";
        return res;
    }
    const Mat& tau = seq.frames.back();
    res.offending_angle = containment_angle(small_plane, tau);
    if (res.offending_angle > opts.fail_angle) {
        res.verdict = Verdict::FAIL;
        res.witness_sequence = seq.points;
        res.note = "limit plane does not contain the small stratum plane";
    } else if (res.offending_angle <= opts.pass_angle) {
        res.verdict = Verdict::PASS;
    } else {
        res.verdict = Verdict::INCONCLUSIVE;
        res.note = "containment angle inside the hysteresis gap";
    }
    return res;
}

// Kernel of dP restricted to the tangent frame T at y: returns an
// orthonormal ambient frame spanning {v in span T : dP v = 0}.
std::optional<Mat> kernel_frame(const std::vector<Polynomial>& P,
                                const StratumSample& s, const Vec& y,
                                int expected_dim) {
    auto T = tangent_frame(s, y);
    if (!T) return std::nullopt;
    const Mat dP = outer_jacobian(P, y);
    const Mat M = dP * (*T); // n x dim
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-9 * std::max(1.0, sv(0))) ++rank;
    const int kdim = T->cols() - rank;
    if (kdim != expected_dim) return std::nullopt;
    if (kdim == 0) return Mat(y.size(), 0);
    Mat W = svd.matrixV().rightCols(kdim);
    Mat K = (*T) * W;
    // re-orthonormalize
    Eigen::HouseholderQR<Mat> qr(K);
    Mat Q = qr.householderQ() * Mat::Identity(K.rows(), kdim);
    return Q;
}

int rank_on_stratum(const std::vector<Polynomial>& P, const StratumSample& s,
                    const Vec& y) {
    auto T = tangent_frame(s, y);
    if (!T) return -1;
    const Mat M = outer_jacobian(P, y) * (*T);
    Eigen::JacobiSVD<Mat> svd(M);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-9 * std::max(1.0, sv.size() ? sv(0) : 1.0)) ++rank;
    return rank;
}

} // namespace

RegularityResult a_regularity_test(const StratumSample& Vj,
                                   const StratumSample& Vi, const Vec& x,
                                   const SequenceGenerator& gen,
                                   const RegularityOptions& opts) {
    // x must lie in the closure of Vj and on Vi
    auto xi = project_to_stratum(Vi, x);
    if (!xi || (*xi - x).norm() > 1e-8)
        throw PreconditionError("a_regularity", "x is not on the small stratum");
    auto small_frame = tangent_frame(Vi, x);
    if (!small_frame)
        throw PreconditionError("a_regularity",
                                "rank-deficient small stratum at x");
    auto seq = collect_frames(
        Vj, x, gen, [&Vj](const Vec& y) { return tangent_frame(Vj, y); }, opts);
    return decide(seq, *small_frame, opts);
}

RegularityResult ap_regularity_test(const StratumSample& Vj,
                                    const StratumSample& Vi,
                                    const std::vector<Polynomial>& P,
                                    const Vec& x, const SequenceGenerator& gen,
                                    const RegularityOptions& opts) {
    auto xi = project_to_stratum(Vi, x);
    if (!xi || (*xi - x).norm() > 1e-8)
        throw PreconditionError("ap_regularity", "x is not on the small stratum");

    // constant-rank check on each stratum near the samples, and the
    // rank-compatibility precheck d_i(P) <= d_j(P)
    const int rank_i = rank_on_stratum(P, Vi, x);
    int rank_j = -1;
    for (int k = 0; k < opts.sequence_length && rank_j < 0; ++k) {
        auto proj = project_to_stratum(Vj, gen(k));
        if (proj) {
            rank_j = rank_on_stratum(P, Vj, *proj);
            // verify constancy on a few more samples
            for (int k2 = k + 1; k2 < std::min(k + 4, opts.sequence_length); ++k2) {
                auto p2 = project_to_stratum(Vj, gen(k2));
                if (p2 && rank_on_stratum(P, Vj, *p2) != rank_j)
                    throw PreconditionError("ap_regularity",
                                            "rank of dP not constant on the big "
                                            "stratum near the samples");
            }
        }
    }
    RegularityResult res;
    if (rank_i < 0 || rank_j < 0) {
        res.verdict = Verdict::INCONCLUSIVE;
        res.note = "could not sample ranks";
        return res;
    }
    res.d_small = Vi.dimension - rank_i;
    res.d_big = Vj.dimension - rank_j;
    if (res.d_small > res.d_big) {
        res.verdict = Verdict::FAIL;
        res.precheck_failed = true;
        res.note = "rank precheck failed: level-set dimension on the small "
                   "stratum exceeds the one on the big stratum";
        return res;
    }

    auto small_kernel = kernel_frame(P, Vi, x, res.d_small);
    if (!small_kernel)
        throw PreconditionError("ap_regularity",
                                "kernel frame unavailable on the small stratum");
    auto seq = collect_frames(
        Vj, x, gen,
        [&](const Vec& y) { return kernel_frame(P, Vj, y, res.d_big); }, opts);
    RegularityResult out = decide(seq, *small_kernel, opts);
    out.d_small = res.d_small;
    out.d_big = res.d_big;
    return out;
}

} // namespace polylab::chainstrata
