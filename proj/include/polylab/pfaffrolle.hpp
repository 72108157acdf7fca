#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "polylab/continuation.hpp"
#include "polylab/polynomial.hpp"

namespace polylab::pfaffrolle {

using continuation::CurveComponent;
using continuation::Mat;
using continuation::SmoothSystem;
using continuation::TraceOptions;
using continuation::Vec;

// Scalar coordinate function with an exact gradient.
struct LevelFunction {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::string name;
};

LevelFunction from_polynomial(const Polynomial& p);

// G: R^d -> R^{d-1} built from coordinate functions; level sets are the
// curves the Rolle step runs on.
struct RegularSystem {
    std::vector<LevelFunction> components;
    double radius = 1.0;
    int dim = 0;

    SmoothSystem smooth() const;
};

std::vector<CurveComponent> trace_level_curve(const RegularSystem& sys,
                                              const std::vector<double>& value,
                                              const TraceOptions& opts);

// Rolle count along one traced component: lhs = #{f = a}, rhs = #{f' = delta}
// (+1 if the component is not closed), f' being the derivative along the
// curve. Throws RolleDeltaError-type payload when rhs is unstable at delta/2.
struct RolleCount {
    int lhs = 0;
    int rhs = 0;
    bool holds = false;
};
RolleCount rolle_count(const LevelFunction& f, const CurveComponent& comp,
                       double a, double delta);

// Chain Jacobian: det of the stacked covectors (Pfaffian rows first, then
// regular gradients); degree bookkeeping per elimination step.
struct PolyCovector {
    std::vector<Polynomial> components; // d entries
};

struct ChainJacobian {
    Polynomial det;
    int degree_bound = 0; // 2^step * (d_form + 1)
    bool within_bound = false;
};
ChainJacobian chain_jacobian(const std::vector<PolyCovector>& forms,
                             const std::vector<PolyCovector>& regular_parts,
                             int elimination_step = 1);

// A singular (Pfaffian) equation: counted through `value` whose zero level
// is a separating leaf of the form; `form` is the polynomial covector used
// in the chain Jacobians; `gradient` is the exact gradient used for tracing.
struct PfaffianEquation {
    LevelFunction level; // value + exact gradient
    PolyCovector form;   // polynomial Pfaffian coefficients
};

// The d=4 mixed system: two singular equations, two polynomial regular ones.
struct MixedSystem {
    PfaffianEquation singular1, singular2;
    Polynomial regular1, regular2;
    double radius = 1.0;
};

struct ComponentLedger {
    int seed_index = -1;
    bool closed = false;
    int lhs_crossings = 0;
    int jacobian_crossings = 0;
    int rho_crossings = 0;
};

struct EliminationReport {
    double lhs = 0;              // singular-level crossings on the traced curve
    double jacobian_count = 0;   // chain-Jacobian crossings
    double boundary_count = 0;   // rho = delta crossings
    double rhs = 0;              // jacobian_count + boundary_count / 2
    bool holds = false;          // lhs <= rhs
    int components = 0;
    int closed_components = 0;
    std::vector<ComponentLedger> ledger;
    double min_gradient_norm = 0; // smallest regular-gradient norm seen
};

struct KhovanskiiReport {
    EliminationReport step1;
    EliminationReport step2_chain;    // G_2^0 branch (chain-Jacobian equation)
    EliminationReport step2_boundary; // G_2^1 branch (rho equation)
    int jacobian1_degree = 0;
    int jacobian1_bound = 0;
    bool stable = false; // counts unchanged under cascade division by 10
    std::string verdict; // "ok" or "inconclusive"
};

// Runs both elimination steps of the reduction on a d=4 instance at the
// cascade (delta1..delta4), then re-runs at cascade/10 and compares.
KhovanskiiReport khovanskii_reduce(const MixedSystem& sys,
                                   const std::vector<double>& cascade,
                                   const TraceOptions& opts);

// The decoupled demonstration instance: two parabola leaves y_j = x_j^2
// carrying the forms x_j dy_j - 2 y_j dx_j, and two affine lines
// F_j = y_j - (slope_j x_j + offset_j).
MixedSystem decoupled_instance(double slope1, double offset1, double slope2,
                               double offset2, double radius);

} // namespace polylab::pfaffrolle
