#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polylab/polynomial.hpp"

namespace polylab::chainstrata {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Chain map P . F with smooth inner part F: B^n -> R^N (exact Jacobian)
// and polynomial outer part P: R^N -> R^n.
struct ChainMapSpec {
    int n = 0, N = 0;
    std::function<Vec(const Vec&)> F;
    std::function<Mat(const Vec&)> dF; // N x n
    std::vector<Polynomial> P;         // n components in N variables
};

// Nontriviality probe: samples rank of dP at random points.
bool outer_is_nontrivial(const ChainMapSpec& spec, unsigned seed = 1);

struct MultiplicityEstimate {
    int value = 0; // max isolated preimages over the target cloud
    int targets_tried = 0;
    int discarded_starts = 0;
    std::vector<Vec> witnesses; // preimages realizing the max
};

// Lower bound for the geometric multiplicity at 0: multistart root counts
// of P(F(x)) = b over the target cloud, deduplicated, max over targets.
MultiplicityEstimate geometric_multiplicity(const ChainMapSpec& spec, double radius,
                                            const std::vector<Vec>& target_cloud,
                                            int multistart = 200,
                                            unsigned seed = 2);

struct LinearizeComparison {
    int count_f = 0;
    int count_linear = 0;
    bool equal = false;
    long long bezout_bound = 0;
    std::vector<int> homotopy_counts; // at t = 0, 1/4, 1/2, 3/4, 1
    bool homotopy_constant = false;
    bool transversal = true;
    int offending_rank = -1; // when transversality fails
};

// Counts preimages of the cascade point under P.F and P.L_F, runs the
// homotopy F_t = tF + (1-t)L_F at five t values, and checks the Bezout
// ceiling on the linear count.
LinearizeComparison linearize_compare(const ChainMapSpec& spec,
                                      const std::vector<double>& delta_cascade,
                                      double radius, int multistart = 200,
                                      unsigned seed = 3);

// (m, delta)-cone: 0 < |a_1| < delta, 0 < |a_{j+1}| < |a_1...a_j|^m.
struct ConeSpec {
    int n = 0;
    int m = 1;
    double delta = 0.1;
    bool defective = false; // |a_{j+1}| < |a_1|^m only (the failing variant)
};

bool cone_membership(const ConeSpec& cone, const std::vector<double>& a);

struct LimitingSetSample {
    std::vector<Vec> cloud;           // accumulated preimages over the ladder
    std::vector<Vec> finest_cloud;    // preimages at the smallest useful rung
    std::vector<double> ladder_used;  // rungs that produced preimages
    std::vector<int> skipped_rungs;
    int local_dimension = 0; // principal-axis estimate at the finest rung
};

LimitingSetSample limiting_set_sample(const std::vector<Polynomial>& P,
                                      const ConeSpec& cone,
                                      const std::vector<double>& delta_ladder,
                                      int samples_per_rung = 200,
                                      double working_box = 2.0,
                                      unsigned seed = 4);

// Implicitly defined stratum piece: defining equations, strict polynomial
// inequalities, expected dimension.
struct StratumSample {
    std::vector<Polynomial> equations;
    std::vector<Polynomial> inequalities; // each required > 0
    int dimension = 0;
    std::string name;
};

// Projects an ambient guess onto the stratum; empty when the projection
// fails or lands outside the inequality region.
std::optional<Vec> project_to_stratum(const StratumSample& s, Vec guess,
                                      double tol = 1e-12);

// Orthonormal tangent frame at a point of the stratum (kernel of the
// stacked equation Jacobian); empty on rank deficiency.
std::optional<Mat> tangent_frame(const StratumSample& s, const Vec& x);

// Max principal angle between subspaces spanned by orthonormal frames.
double principal_angle(const Mat& A, const Mat& B);
// Max angle by which span(K) sticks out of span(T) (containment residual).
double containment_angle(const Mat& K, const Mat& T);

enum class Verdict { PASS, FAIL, INCONCLUSIVE };
std::string verdict_name(Verdict v);

struct RegularityResult {
    Verdict verdict = Verdict::INCONCLUSIVE;
    std::vector<Vec> witness_sequence;
    double offending_angle = 0.0;
    std::string note;
    bool precheck_failed = false; // a_P rank precheck (when applicable)
    int d_small = -1, d_big = -1; // level-set dimensions d_i(P), d_j(P)
};

using SequenceGenerator = std::function<Vec(int k)>; // ambient guesses -> x

SequenceGenerator radial_generator(const Vec& x, const Vec& direction,
                                   double scale = 0.5);
// Matches the parabolic construction z = -a t^2 used with the Grinberg
// variety; supplied as an explicit ambient path.
SequenceGenerator path_generator(std::function<Vec(double)> path,
                                 double t0 = 0.5, double shrink = 0.6);
SequenceGenerator random_on_stratum_generator(const Vec& x, int dim,
                                              unsigned seed);

struct RegularityOptions {
    int sequence_length = 24;
    int convergence_window = 5;
    double convergence_tol = 1e-4;
    double fail_angle = 1e-2;
    double pass_angle = 1e-4;
};

// Whitney a-regularity of V_j over V_i at x: limit tangent planes of V_j
// along the sequence must contain T_x V_i.
RegularityResult a_regularity_test(const StratumSample& Vj,
                                   const StratumSample& Vi, const Vec& x,
                                   const SequenceGenerator& gen,
                                   const RegularityOptions& opts = {});

// Thom a_P-regularity with respect to the polynomial map P (rows).
// Runs the rank-compatibility precheck d_i(P) <= d_j(P) first.
RegularityResult ap_regularity_test(const StratumSample& Vj,
                                    const StratumSample& Vi,
                                    const std::vector<Polynomial>& P,
                                    const Vec& x, const SequenceGenerator& gen,
                                    const RegularityOptions& opts = {});

} // namespace polylab::chainstrata
