#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rholder/batch.hpp"
#include "rholder/pipeline.hpp"

namespace rholder {

struct StabilityOptions {
    std::vector<double> q_grid = default_q_grid();
    int probe_levels = 256;    // thresholds scanned by the perimeter probe
    int coarea_levels = 1024;  // Simpson intervals for the level integral
    Exec exec = Exec::serial;

    static std::vector<double> default_q_grid();
};

struct StabilityReport {
    std::vector<double> q_grid;
    std::vector<double> gaps;  // ||z||_q - ||u||_q, both L1-normalized
    double delta = 0.0;        // max gap over the grid
    double sup_gap = 0.0;      // z#(0) - u#(0)
    double alpha = 0.0;
    double v = 0.0;
    // Smallness threshold from the two displayed conditions on z#(0):
    // delta_tilde < z#(0)/2 and sqrt(delta_tilde) < z#(0)/(4v).
    double delta_tilde = 0.0;
    bool in_regime = false;       // delta < delta_tilde
    bool rigid = false;           // delta below equality tolerance
    bool window_overflow = false; // alpha + sqrt(delta) exceeded v
    std::optional<double> y;      // witness location in mass coordinate
    std::optional<double> u_at_y; // window mean of u# (the witness value)
    std::optional<double> t0;     // probe level, in the normalized scale
    std::optional<double> perimeter_ratio;  // Per({u>t0})^2 / I(mu(t0))^2
    std::optional<double> ratio_slope;      // (ratio - 1) / sqrt(delta)
    double diam_bound_exponent = 0.0;  // N; the diameter-closeness bound has
                                       // this exponent and a non-computable
                                       // constant, so only N is recorded
    std::string status;  // "rigid" | "ok" | "outside-stability-regime"
};

// Gap profile and delta. Both profiles must carry unit L1 norm.
StabilityReport gap_profile(const StepProfile& u_unit, const StepProfile& z_unit,
                            std::span<const double> q_grid);

struct WitnessResult {
    double y = 0.0;
    double u_at_y = 0.0;  // mean of u# over the window (u# := 0 beyond v)
    bool window_overflow = false;
};

// Mean-value witness on the window (alpha, alpha + sqrt(delta)): the window
// mean A of u# and the largest y in the window with u#(y) >= A. When the
// window overruns v the mean is taken with u# extended by zero, which keeps
// the bound A <= v*sqrt(delta) valid; the overflow is flagged because the
// smallness assumption behind the regime has failed.
WitnessResult mean_value_witness(const StepProfile& u_sharp, double alpha, double delta,
                                 double v);

// Interval components of {u > t} by linear interpolation between grid nodes.
std::vector<std::pair<double, double>> superlevel_set(const EigenPair& u, double t);

// Sum of densities at the superlevel boundary points that lie strictly
// inside the ambient [0, L]; poles carry no perimeter (the weight vanishes).
double superlevel_perimeter_1d(const EigenPair& u, const ModelParams& mp, double t);

struct CoareaResult {
    double lhs = 0.0;      // int over {t_lo < u <= t_hi} of |u'| dm
    double rhs = 0.0;      // int of Per({u > s}) ds over (t_lo, t_hi)
    double residual = 0.0; // |lhs - rhs| / max(lhs, eps)
};

// Band form of the coarea identity. t_hi defaults to max u (pass infinity);
// at the max the level integrand has a sqrt kink, removed by the
// substitution s = t_hi - tau^2. Level evaluations fan out per exec.
CoareaResult coarea_check(const EigenPair& u, const ModelParams& mp, double t_lo,
                          double t_hi, int levels = 1024, Exec exec = Exec::serial);

struct RatioProbe {
    bool in_regime = false;  // u#(0) - u#(y) > z#(0)/4 held
    double t0 = 0.0;
    double ratio = 0.0;
    double slope = 0.0;  // (ratio - 1) / sqrt(delta)
};

// Scans levels t in (u_at_y, u#(0)) (normalized scale) and returns the one
// with the smallest Per^2 / I(mu)^2, the desk witness to the averaged
// isoperimetric bound. Perimeter and measure come from the same interpolated
// crossing set, so the ratio degenerates to 1 for caps instead of drifting
// by one-sided discretization error.
RatioProbe perimeter_ratio_probe(const EigenPair& u_pair, const ModelParams& mp,
                                 double unit_scale, double u0, double u_at_y, double z0,
                                 double delta, int levels = 256);

// Full stability diagnostics for one pipeline run.
StabilityReport stability_report(const PipelineRun& run, const StabilityOptions& opt = {});

// Mass-preserving interpolation from the cap of the same measure to the
// interval (a, b): row j slides the left endpoint to a*j/(rows-1) and moves
// the right endpoint to keep the mass fixed. Row 0 is the cap itself.
std::vector<Interval> caps_to_interval_family(const ModelParams& mp, double a, double b,
                                              int rows);

// Pipeline + stability report per family row; rows are independent and fan
// out per exec, results ordered by row index regardless of mode.
std::vector<StabilityReport> run_stability_sweep(const ModelParams& mp,
                                                 const std::vector<Interval>& rows,
                                                 const PipelineOptions& popt,
                                                 const StabilityOptions& sopt);

}  // namespace rholder
