#pragma once

#include <stdexcept>
#include <vector>

namespace rholder {

// One-dimensional model space: the interval [0, L] carrying the weight
// sin^(N-1)(t * sqrt(K/(N-1))) / c, normalized to unit total mass.
// K > 0 is the curvature bound, N > 1 the (possibly fractional) dimension,
// L = pi * sqrt((N-1)/K) the diameter. The canonical representative has
// K = N-1, L = pi; every other K is an isometric rescaling of it.
struct ModelParams {
    double K;
    double N;
    double L;
    double c;  // normalizing constant, total weighted length before division

    // t_canonical = t_physical * scale()
    double scale() const;
    bool is_canonical() const;
};

// Validates K > 0, N > 1 and fills in L and c.
ModelParams make_model(double K, double N);

// Canonical model with K = N-1 (so L = pi).
ModelParams make_canonical_model(double N);

// Normalized weight at t, symmetric about L/2 by construction.
// Throws std::domain_error outside [0, L].
double density(const ModelParams& mp, double t);

// Mass of [0, x]; strictly increasing in x, cumulative(L) = 1.
double cumulative(const ModelParams& mp, double x);

// Inverse of cumulative on (0, 1); endpoints map to 0 and L.
double quantile(const ModelParams& mp, double v);

// Perimeter of the ball realizing mass v: density(quantile(v)).
// Vanishes at v = 0 and v = 1.
double isoperimetric_profile(const ModelParams& mp, double v);

// Nodes in [0, L] with the normalized weight evaluated at each node.
struct RadialGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Checks the grid invariants (nodes sorted inside [0, L], weights
// consistent with density). Throws std::domain_error on violation.
void validate_grid(const ModelParams& mp, const RadialGrid& grid);

// Uniform grid of n+1 nodes spanning [a, b].
RadialGrid make_uniform_grid(const ModelParams& mp, double a, double b, int n);

// Precomputed cumulative sweep for hot paths that need many cumulative or
// quantile-style evaluations (the adaptive-quadrature entry points above
// cost milliseconds each; profile-sized loops need microseconds). Accuracy
// is ~1e-12 in the smooth bulk; within the first and last table cell the
// local series keeps the relative error of the inverse below ~1e-8, which
// downstream consumers tolerate because every quantity they form vanishes
// at the endpoints anyway.
class CumulativeTable {
  public:
    explicit CumulativeTable(const ModelParams& mp, int cells = 16384);

    // cumulative(t) for physical t in [0, L].
    double mass_of(double t) const;
    // density(quantile(s)) for mass s in [0, 1], i.e. the isoperimetric
    // profile, evaluated through the inverse of the sweep.
    double iso_of_mass(double s) const;

  private:
    double invert(double s) const;  // canonical radius with mass s
    // Normalized mass gained across [xa, xb] (within one sweep cell):
    // endpoint series near the weight zeros, per-cell Simpson in the bulk.
    double cell_increment(double xa, double xb) const;
    double series_mass(double x) const;  // three-term expansion about x = 0

    ModelParams mp_;
    double c_ = 0.0;      // canonical mass constant
    double total_ = 0.0;  // raw sweep total, divides interpolation increments
    std::vector<double> x_;     // canonical radii, uniform over [0, pi]
    std::vector<double> mass_;  // cumulative mass at x_
};

namespace detail {

// Adaptive Simpson quadrature, plain recursive error-splitting variant.
template <class F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-13) {
    if (!(b > a)) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Weight in the canonical coordinate x = t * scale, folded about pi/2 so the
// symmetry density(t) == density(L - t) holds exactly in floating point.
double weight_canonical(double N, double x);

}  // namespace detail

}  // namespace rholder
