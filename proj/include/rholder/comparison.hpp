#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rholder/model_space.hpp"
#include "rholder/rearrangement.hpp"

namespace rholder {

struct Tolerances {
    double tol_num = 1e-6;   // inequality slack
    double tol_eq = 1e-8;    // rigidity / equality detection
    double band_rel = 1e-8;  // crossing dead-band, relative to max level
};

// Multiplies z by the unique positive factor making the p-th power integrals
// of the two profiles equal. Exact arithmetic on step data.
StepProfile scale_to_match(const StepProfile& u_prof, const StepProfile& z_prof, double p);

// Appends a zero piece so the profile's support becomes [0, total_to].
StepProfile extend_by_zero(const StepProfile& prof, double total_to);

struct CrossingResult {
    int sign_changes = 0;
    std::optional<double> r1;  // mass coordinate of the single + to - change
    bool equality = false;     // difference never leaves the dead-band
    bool violation = false;    // more than one change, or a - to + pattern
    std::string note;
};

// Sign structure of z - u outside a dead-band of width tol_band, on the
// merged breakpoint grid. Inputs must share total mass (u on [0,v], z
// matched and extended to [0,v]).
CrossingResult crossing_analysis(const StepProfile& u_sharp, const StepProfile& z_sharp,
                                 double tol_band);

struct MarginCurve {
    std::vector<double> s;       // merged breakpoints
    std::vector<double> margin;  // int_0^s (z^p - u^p)
    double min_margin = 0.0;
    double end_margin = 0.0;  // value at s = v; ~0 when matched at this p
};

MarginCurve cumulative_domination(const StepProfile& u_sharp, const StepProfile& z_sharp,
                                  double p);

struct ChitiReport {
    double p = 1.0;
    std::vector<double> q_grid;
    std::vector<double> slack;  // ||z||_q/||z||_p - ||u||_q/||u||_p per q
    std::optional<double> r1;
    int sign_changes = 0;
    double cumulative_margin = 0.0;  // min over s
    bool equality_case = false;
    double alpha = 0.0;
    double v = 0.0;
    bool violation = false;
    std::vector<std::string> notes;
};

// Full comparison for one pipeline run: matches z to u at exponent p,
// computes the normalized-norm slack on q_grid, the crossing structure and
// the cumulative domination margin. u_prof lives on [0, v], z_prof on
// [0, alpha] unextended; q_grid entries must be >= p (infinity allowed).
ChitiReport reverse_holder_check(const StepProfile& u_prof, const StepProfile& z_prof, double p,
                                 std::span<const double> q_grid, const Tolerances& tol = {});

struct DominationResult {
    bool ok = false;
    double min_gap = 0.0;  // min over (0, alpha] of u - z after matching at 0
    std::optional<double> first_violation_s;
};

// Pointwise bound z <= u on (0, alpha] after rescaling z to z(0) = u(0).
// The opposite orientation from the norm matching: domination at the top.
DominationResult domination_check(const StepProfile& u_sharp, const StepProfile& z_sharp,
                                  double tol);

struct HardyResult {
    bool pass = false;
    double integral_gap = 0.0;  // int f - int g
    double worst_margin = 0.0;  // min over y of int{f-y}+ - int{g-y}+
    double worst_y = 0.0;
};

// Hypotheses of the convex-transfer lemma: int g = int f and
// int {g-y}+ <= int {f-y}+ for all y >= 0. For step profiles both sides are
// piecewise linear in y, so checking y in y_grid plus every level of f and g
// certifies the full range.
HardyResult hardy_hypothesis_check(const StepProfile& f, const StepProfile& g,
                                   std::span<const double> y_grid, double tol = 1e-8);

enum class RigidityConclusion { rigid, non_rigid, inconsistent };

// Desk-scale rigidity: equality of normalized norms at one q > p must come
// with equality at every grid exponent between p and q and with alpha = v.
RigidityConclusion desk_rigidity_probe(const ChitiReport& report, double p, double q,
                                       const Tolerances& tol = {});

struct FluxResidual {
    bool pass = false;
    double max_excess = 0.0;        // max over s of lhs - rhs (signed)
    double max_abs_residual = 0.0;  // max |lhs - rhs|
    double tol = 0.0;
    double h = 0.0;  // mass-coordinate grid scale the tolerance refers to
};

// Discrete check of -d(profile)/ds * I(s)^2 <= lambda * int_0^s profile,
// with equality demanded for matched cap profiles. Both sides are compared
// in integrated form over (0, s] at every breakpoint: the left side becomes
// the sum of level drops weighted by I^2 at the drop positions, the right
// side lambda times the second cumulative of the profile, and both are exact
// for the staircase. Pointwise difference quotients are useless here: an
// interval domain feeds the rearrangement two monotone branches whose
// sampled values interleave, so adjacent quotients over- and undershoot the
// true slope by order one no matter how fine the grid. The raw quotient of
// the cap profile also blows up like s^(2/N-1) at the apex for N > 2. The
// integrated flux residual is free of both problems and admits an O(h)
// bound: tolerance is 10 * h * lambda * ||profile||_1 with h the widest
// piece. With require_equality the residual is checked two-sided, otherwise
// one-sided (lhs <= rhs + tol).
FluxResidual differential_inequality_check(const StepProfile& profile, double lambda,
                                           const ModelParams& mp, bool require_equality);

}  // namespace rholder
