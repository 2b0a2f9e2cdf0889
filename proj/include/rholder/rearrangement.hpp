#pragma once

#include <vector>

#include "rholder/eigensolver.hpp"
#include "rholder/model_space.hpp"

namespace rholder {

// A nonnegative function known through (value, mass) pairs: value_i taken on
// a measurable chunk of mass mass_i. Order carries no meaning.
struct WeightedSamples {
    std::vector<double> values;
    std::vector<double> masses;
    double total_mass() const;
};

// Non-increasing left-continuous step function on the mass coordinate
// [0, total]. Piece i covers (breakpoints[i], breakpoints[i+1]] at
// levels[i]; breakpoints[0] == 0 and levels are strictly decreasing.
struct StepProfile {
    std::vector<double> breakpoints;
    std::vector<double> levels;

    double total() const { return breakpoints.back(); }
    // Left-continuous evaluation; s <= 0 gives the top level, s beyond the
    // support gives 0 (the natural extension used downstream).
    double value_at(double s) const;
    std::size_t piece_count() const { return levels.size(); }
};

void validate_profile(const StepProfile& prof);

// Mass of {|u| > t}.
double distribution_function(const WeightedSamples& u, double t);
// Lebesgue measure of {profile > t} on the mass coordinate.
double distribution_function(const StepProfile& prof, double t);

// Sort values descending, accumulate masses; exact ties merge into one piece.
StepProfile decreasing_rearrangement(const WeightedSamples& u);
// A step profile is already non-increasing, so this is the identity (after
// validation); kept as the idempotence face of the operation.
StepProfile decreasing_rearrangement(const StepProfile& prof);

// Radial representative on a cap: u*(x) = u#(cumulative(x)).
struct Symmetrized {
    StepProfile sharp;
    ModelParams params;
    double radius;  // quantile(total mass)

    double operator()(double x) const;
};

Symmetrized schwartz_symmetrization(const WeightedSamples& u, const ModelParams& mp);

// (sum level^p * mass)^(1/p); p = infinity gives the max level. Exact sums,
// no quadrature. Throws std::domain_error for p <= 0.
double lp_norm(const StepProfile& prof, double p);
double lp_norm(const WeightedSamples& u, double p);

// Pointwise image under a monotone map: levels transformed, breakpoints kept.
// phi must be nondecreasing and nonnegative on the level range.
template <class Phi>
StepProfile transform_levels(const StepProfile& prof, Phi&& phi) {
    StepProfile out;
    out.breakpoints = prof.breakpoints;
    out.levels.reserve(prof.levels.size());
    for (double l : prof.levels) out.levels.push_back(phi(l));
    return out;
}

// Collapses adjacent pieces whose levels compare equal. Scaling levels by a
// constant can round two pieces ~1 ulp apart onto the same double; merging
// restores the strict-decrease invariant without changing the function.
StepProfile merge_equal_levels(const StepProfile& prof);

// Convert a sampled eigenfunction to weighted samples: one sample per grid
// cell, value at the cell average of the endpoint samples, mass by Simpson
// on the density. Quadrature error O(h^2) in the cell width.
WeightedSamples weighted_cell_samples(const EigenPair& ep, const ModelParams& mp);

}  // namespace rholder
