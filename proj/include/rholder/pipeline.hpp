#pragma once

#include <span>

#include "rholder/comparison.hpp"
#include "rholder/eigensolver.hpp"
#include "rholder/rearrangement.hpp"

namespace rholder {

struct PipelineOptions {
    SolveOptions solve;
    Tolerances tol;
    double alpha_tol = 1e-8;
};

// Shared artifacts of one (model, domain) run, consumed by the comparison
// and stability layers: the domain eigenpair u, the mass-matched cap
// eigenpair z, and both decreasing rearrangements.
struct PipelineRun {
    ModelParams params;
    Domain domain;
    double v = 0.0;       // domain mass
    double lambda = 0.0;  // first Dirichlet eigenvalue of the domain
    AlphaSolution alpha;  // cap mass matching lambda
    EigenPair u_pair;
    EigenPair z_pair;     // cap of mass alpha
    StepProfile u_sharp;  // on [0, v]
    StepProfile z_sharp;  // on [0, alpha], unextended
    bool is_cap = false;  // domain is a metric ball about a pole
};

PipelineRun run_pipeline(const ModelParams& mp, const Domain& dom,
                         const PipelineOptions& opt = {});

// Rearrangement of an eigenpair by level slicing: for every level in the
// strictly decreasing grid (which must end at exactly 0), the superlevel
// boundary is located by linear interpolation between eigenfunction nodes
// and the piece breakpoint is the measure enclosed. Interpolating the
// crossings buys an extra order of accuracy in the breakpoints over
// rearranging the sampled values directly, which matters whenever two
// profiles are compared against a dead-band far tighter than one grid cell.
// Levels above the sup contribute no mass and produce no piece.
StepProfile level_sliced_profile(const EigenPair& u, const ModelParams& mp,
                                 std::span<const double> levels);

// Full comparison for one run. Norm slacks, the cumulative domination
// margin and the equality verdict come from the sampled staircases; the
// crossing structure is re-derived from level-sliced profiles on a shared
// level grid, because the staircase difference wobbles by about one grid
// cell near the crossing and the dead-band is orders of magnitude tighter
// than that. On a shared grid the sliced difference is quantized to whole
// level steps, so the sign pattern reduces to the ordering of the two
// superlevel measures, which the slicing resolves to well below the band.
ChitiReport chiti_for(const PipelineRun& run, double p, std::span<const double> q_grid,
                      const Tolerances& tol = {});

}  // namespace rholder
