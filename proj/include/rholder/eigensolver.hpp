#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "rholder/model_space.hpp"

namespace rholder {

// Geodesic ball about the pole, identified by its mass fraction v.
struct Cap {
    double v;
};

// Open subinterval (a, b) of [0, L] in physical coordinates.
struct Interval {
    double a;
    double b;
};

using Domain = std::variant<Cap, Interval>;

struct SolveOptions {
    int grid_n = 20000;       // RK4 steps across a canonical diameter
    double rel_tol = 1e-10;   // relative bisection width on the eigenvalue
    int max_expansions = 60;  // bracket growth budget before giving up
};

// First Dirichlet eigenpair sampled on a radial grid. values are normalized
// to unit sup norm, positive inside the domain, zero at Dirichlet endpoints.
struct EigenPair {
    double lambda = 0.0;
    RadialGrid grid;
    std::vector<double> values;
    Domain domain;
};

// Result of inverting lambda over cap masses: the cap of mass alpha has
// first eigenvalue lambda up to the verification residual.
struct AlphaSolution {
    double alpha = 0.0;
    double lambda = 0.0;
    double residual = 0.0;  // |lambda_cap(alpha) - lambda|, from a fresh solve
};

// Numerical breakdown: bracket never closed, positivity lost, etc.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The requested inversion has no solution in the admissible range.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// First Dirichlet eigenpair of the cap of mass v in (0, 1).
EigenPair first_eigen_cap(const ModelParams& mp, double v, const SolveOptions& opt = {});

// First Dirichlet eigenpair of the interval (a, b), 0 <= a < b <= L.
EigenPair first_eigen_interval(const ModelParams& mp, double a, double b,
                               const SolveOptions& opt = {});

// Smallest cap mass alpha <= v_upper whose first eigenvalue equals lambda.
// Requires lambda >= lambda_cap(v_upper) - tolerance (eigenvalues of caps
// decrease in mass); otherwise throws InfeasibleError.
AlphaSolution find_alpha(const ModelParams& mp, double lambda, double v_upper,
                         double tol = 1e-8, const SolveOptions& opt = {});

// Independent cross-check: finite-volume discretization of the weighted
// Sturm-Liouville pencil on n cells in physical coordinates, smallest
// eigenvalue by Sturm-count bisection, eigenvector by inverse iteration.
// Second-order convergent; shares no code path with the shooting solver.
EigenPair oracle_fd_eigen(const ModelParams& mp, const Domain& dom, int n);

namespace detail {

// State of the radial ODE z'' + (N-1) cot(t) z' + lambda z = 0 in the
// canonical coordinate.
struct OdeState {
    double z;
    double p;  // dz/dt
};

// Taylor seed for the regular solution near a weight zero: z(h) with
// z(0) = 1, z'(0) = 0. Used at t = 0 and, mirrored, at t = pi.
OdeState series_seed(double N, double lambda, double h);

struct ShotResult {
    OdeState end;
    bool interior_flip = false;  // sign change strictly before the endpoint
    double flip_lo = 0.0;        // bracketing step around the first flip
    double flip_hi = 0.0;
    OdeState flip_state;         // state at flip_lo, for refinement
};

// Fixed-step RK4 from (t0, y0) to t1; records the first sign change of z.
// If store is non-null, appends (node, value) pairs after each step.
ShotResult integrate_radial(double N, double lambda, double t0, OdeState y0, double t1,
                            int steps, std::vector<double>* nodes = nullptr,
                            std::vector<double>* values = nullptr);

}  // namespace detail

}  // namespace rholder
