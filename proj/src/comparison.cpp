#include "rholder/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace rholder {

namespace {

double power_integral(const StepProfile& prof, double p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < prof.levels.size(); ++i)
        acc += std::pow(prof.levels[i], p) * (prof.breakpoints[i + 1] - prof.breakpoints[i]);
    return acc;
}

// Union of the two breakpoint sets. Both profiles are evaluated as constants
// on each merged cell, which is exact for step data.
std::vector<double> merged_breakpoints(const StepProfile& a, const StepProfile& b) {
    std::vector<double> out;
    out.reserve(a.breakpoints.size() + b.breakpoints.size());
    std::merge(a.breakpoints.begin(), a.breakpoints.end(), b.breakpoints.begin(),
               b.breakpoints.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

StepProfile scale_to_match(const StepProfile& u_prof, const StepProfile& z_prof, double p) {
    validate_profile(u_prof);
    validate_profile(z_prof);
    if (!(p > 0.0) || std::isinf(p))
        throw std::domain_error("scale_to_match: matching exponent must be positive and finite");
    double iu = power_integral(u_prof, p);
    double iz = power_integral(z_prof, p);
    if (!(iu > 0.0) || !(iz > 0.0))
        throw std::domain_error("scale_to_match: degenerate zero profile");
    double factor = std::pow(iu / iz, 1.0 / p);
    // Near-tied levels can round onto each other under the scaling.
    return merge_equal_levels(
        transform_levels(z_prof, [factor](double l) { return factor * l; }));
}

StepProfile extend_by_zero(const StepProfile& prof, double total_to) {
    validate_profile(prof);
    if (total_to < prof.total()) throw std::domain_error("extend_by_zero: shrinking extension");
    StepProfile out = prof;
    if (total_to > prof.total()) {
        if (out.levels.back() == 0.0)
            out.breakpoints.back() = total_to;
        else {
            out.breakpoints.push_back(total_to);
            out.levels.push_back(0.0);
        }
    }
    return out;
}

CrossingResult crossing_analysis(const StepProfile& u_sharp, const StepProfile& z_sharp,
                                 double tol_band) {
    validate_profile(u_sharp);
    validate_profile(z_sharp);
    if (std::abs(u_sharp.total() - z_sharp.total()) > 1e-9 * std::max(u_sharp.total(), 1.0))
        throw std::domain_error("crossing_analysis: profiles must share total mass");
    if (!(tol_band >= 0.0)) throw std::domain_error("crossing_analysis: negative dead-band");

    auto grid = merged_breakpoints(u_sharp, z_sharp);
    // Sign per merged cell, then compressed: zeros dropped, repeats collapsed.
    std::vector<int> signs;
    std::vector<double> left_edge, right_edge;  // cell bounds per sign run
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double mid_ref = 0.5 * (grid[i] + grid[i + 1]);
        double d = z_sharp.value_at(mid_ref) - u_sharp.value_at(mid_ref);
        int s = d > tol_band ? 1 : (d < -tol_band ? -1 : 0);
        if (s == 0) continue;
        if (!signs.empty() && signs.back() == s) {
            right_edge.back() = grid[i + 1];
            continue;
        }
        signs.push_back(s);
        left_edge.push_back(grid[i]);
        right_edge.push_back(grid[i + 1]);
    }

    CrossingResult res;
    res.sign_changes = signs.empty() ? 0 : static_cast<int>(signs.size()) - 1;
    res.equality = signs.empty();
    if (res.equality) {
        res.note = "difference stays inside the dead-band";
        return res;
    }
    if (res.sign_changes == 1 && signs[0] == 1) {
        // Report the midpoint of the (possibly zero-width) banded gap
        // between the positive run and the negative run.
        res.r1 = 0.5 * (right_edge[0] + left_edge[1]);
    } else if (res.sign_changes == 0) {
        res.note = signs[0] == 1 ? "one-sided: z above u outside the band"
                                 : "one-sided: z below u outside the band";
    } else {
        res.violation = true;
        res.note = signs[0] == 1 ? "multiple sign changes" : "difference starts negative";
    }
    if (res.sign_changes == 1 && signs[0] == -1) {
        res.violation = true;
        res.note = "single change in the wrong direction (- to +)";
    }
    return res;
}

MarginCurve cumulative_domination(const StepProfile& u_sharp, const StepProfile& z_sharp,
                                  double p) {
    validate_profile(u_sharp);
    validate_profile(z_sharp);
    if (!(p > 0.0) || std::isinf(p))
        throw std::domain_error("cumulative_domination: exponent must be positive and finite");
    auto grid = merged_breakpoints(u_sharp, z_sharp);
    MarginCurve curve;
    curve.s.reserve(grid.size());
    curve.margin.reserve(grid.size());
    curve.s.push_back(0.0);
    curve.margin.push_back(0.0);
    double acc = 0.0;
    curve.min_margin = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double mid_ref = 0.5 * (grid[i] + grid[i + 1]);
        double zu = std::pow(z_sharp.value_at(mid_ref), p) - std::pow(u_sharp.value_at(mid_ref), p);
        acc += zu * (grid[i + 1] - grid[i]);
        curve.s.push_back(grid[i + 1]);
        curve.margin.push_back(acc);
        curve.min_margin = std::min(curve.min_margin, acc);
    }
    curve.end_margin = acc;
    return curve;
}

ChitiReport reverse_holder_check(const StepProfile& u_prof, const StepProfile& z_prof, double p,
                                 std::span<const double> q_grid, const Tolerances& tol) {
    validate_profile(u_prof);
    validate_profile(z_prof);
    if (!(p > 0.0) || std::isinf(p))
        throw std::domain_error("reverse_holder_check: base exponent must be positive and finite");

    ChitiReport rep;
    rep.p = p;
    rep.v = u_prof.total();
    rep.alpha = z_prof.total();
    if (rep.alpha > rep.v + 1e-9)
        throw std::domain_error("reverse_holder_check: z support exceeds u support");

    // Quadrature totals of the two profiles can differ in the last digits
    // even when alpha == v mathematically; never shrink when extending.
    StepProfile z_ext = extend_by_zero(z_prof, std::max(rep.v, z_prof.total()));
    StepProfile z_m = scale_to_match(u_prof, z_ext, p);

    double up = lp_norm(u_prof, p);
    double zp = lp_norm(z_m, p);
    for (double q : q_grid) {
        if (!(q >= p)) throw std::domain_error("reverse_holder_check: q_grid must satisfy q >= p");
        double s = lp_norm(z_m, q) / zp - lp_norm(u_prof, q) / up;
        rep.q_grid.push_back(q);
        rep.slack.push_back(s);
        if (s < -tol.tol_num) {
            rep.violation = true;
            rep.notes.push_back("normalized norm gap negative at q = " + std::to_string(q));
        }
    }

    double band = tol.band_rel * z_m.levels.front();
    CrossingResult cr = crossing_analysis(u_prof, z_m, band);
    rep.r1 = cr.r1;
    rep.sign_changes = cr.sign_changes;
    if (cr.violation) {
        rep.violation = true;
        rep.notes.push_back("crossing structure: " + cr.note);
    }

    MarginCurve mc = cumulative_domination(u_prof, z_m, p);
    rep.cumulative_margin = mc.min_margin;
    if (mc.min_margin < -1e-8) {
        rep.violation = true;
        rep.notes.push_back("cumulative domination margin below -1e-8");
    }

    double max_slack = *std::max_element(rep.slack.begin(), rep.slack.end());
    rep.equality_case = max_slack < tol.tol_eq;
    return rep;
}

DominationResult domination_check(const StepProfile& u_sharp, const StepProfile& z_sharp,
                                  double tol) {
    validate_profile(u_sharp);
    validate_profile(z_sharp);
    double u0 = u_sharp.levels.front(), z0 = z_sharp.levels.front();
    if (!(u0 > 0.0) || !(z0 > 0.0)) throw std::domain_error("domination_check: zero profile");
    double factor = u0 / z0;

    DominationResult res;
    res.ok = true;
    res.min_gap = std::numeric_limits<double>::infinity();
    auto grid = merged_breakpoints(u_sharp, z_sharp);
    double alpha = z_sharp.total();
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double lo = grid[i];
        if (lo >= alpha) break;
        double mid_ref = 0.5 * (lo + std::min(grid[i + 1], alpha));
        double gap = u_sharp.value_at(mid_ref) - factor * z_sharp.value_at(mid_ref);
        if (gap < res.min_gap) res.min_gap = gap;
        if (gap < -tol && !res.first_violation_s) {
            res.ok = false;
            res.first_violation_s = mid_ref;
        }
    }
    return res;
}

HardyResult hardy_hypothesis_check(const StepProfile& f, const StepProfile& g,
                                   std::span<const double> y_grid, double tol) {
    validate_profile(f);
    validate_profile(g);
    if (std::abs(f.total() - g.total()) > 1e-9 * std::max(f.total(), 1.0))
        throw std::domain_error("hardy_hypothesis_check: profiles must share a common [0, b]");

    auto plus_integral = [](const StepProfile& prof, double y) {
        double acc = 0.0;
        for (std::size_t i = 0; i < prof.levels.size(); ++i) {
            double excess = prof.levels[i] - y;
            if (excess > 0.0)
                acc += excess * (prof.breakpoints[i + 1] - prof.breakpoints[i]);
        }
        return acc;
    };

    HardyResult res;
    res.integral_gap = plus_integral(f, 0.0) - plus_integral(g, 0.0);

    // Both y-sections are piecewise linear with kinks exactly at the levels,
    // so levels of f and g (plus the caller's grid and 0) certify all y >= 0.
    std::set<double> ys(y_grid.begin(), y_grid.end());
    ys.insert(0.0);
    ys.insert(f.levels.begin(), f.levels.end());
    ys.insert(g.levels.begin(), g.levels.end());

    res.worst_margin = std::numeric_limits<double>::infinity();
    for (double y : ys) {
        if (y < 0.0) continue;
        double m = plus_integral(f, y) - plus_integral(g, y);
        if (m < res.worst_margin) {
            res.worst_margin = m;
            res.worst_y = y;
        }
    }
    res.pass = std::abs(res.integral_gap) <= tol && res.worst_margin >= -tol;
    return res;
}

RigidityConclusion desk_rigidity_probe(const ChitiReport& report, double p, double q,
                                       const Tolerances& tol) {
    if (!(q > p)) throw std::domain_error("desk_rigidity_probe: need q > p");
    auto slack_at = [&](double qq) -> std::optional<double> {
        for (std::size_t i = 0; i < report.q_grid.size(); ++i)
            if (report.q_grid[i] == qq) return report.slack[i];
        return std::nullopt;
    };
    auto sq = slack_at(q);
    if (!sq) throw std::domain_error("desk_rigidity_probe: q not in the report grid");
    if (!(*sq < tol.tol_eq)) return RigidityConclusion::non_rigid;

    // Equality at one exponent must propagate: every grid exponent strictly
    // between p and q must also sit at equality, and alpha must equal v.
    for (std::size_t i = 0; i < report.q_grid.size(); ++i) {
        double qq = report.q_grid[i];
        if (qq > p && qq < q && !(report.slack[i] < tol.tol_eq))
            return RigidityConclusion::inconsistent;
    }
    if (std::abs(report.alpha - report.v) > 1e-8) return RigidityConclusion::inconsistent;
    return RigidityConclusion::rigid;
}

FluxResidual differential_inequality_check(const StepProfile& profile, double lambda,
                                           const ModelParams& mp, bool require_equality) {
    validate_profile(profile);
    if (!(lambda > 0.0)) throw std::domain_error("differential_inequality_check: lambda <= 0");
    std::size_t m = profile.levels.size();
    FluxResidual res;
    if (m < 3) {
        res.pass = true;  // too coarse for any interior comparison
        return res;
    }

    double l1 = 0.0, h = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double w = profile.breakpoints[i + 1] - profile.breakpoints[i];
        l1 += profile.levels[i] * w;
        h = std::max(h, w);
    }
    res.h = h;
    res.tol = 10.0 * h * lambda * l1;

    // Both sides integrated over (0, s]. The left side is the sum of the
    // staircase's level drops weighted by I^2 at the drop position, which is
    // its exact distributional form; the right side is lambda times the
    // second cumulative, exact because the first cumulative is piecewise
    // linear. No difference quotients appear anywhere.
    CumulativeTable table(mp);
    double drops = 0.0;  // int over (0, s] of I(sigma)^2 d(-profile)
    double first = 0.0;  // int_0^s profile
    double second = 0.0;  // int_0^s of the first cumulative
    res.max_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < m; ++k) {
        double w = profile.breakpoints[k] - profile.breakpoints[k - 1];
        double grown = first + profile.levels[k - 1] * w;
        second += 0.5 * (first + grown) * w;
        first = grown;
        double iso = table.iso_of_mass(profile.breakpoints[k]);
        drops += (profile.levels[k - 1] - profile.levels[k]) * iso * iso;
        double r = drops - lambda * second;
        res.max_excess = std::max(res.max_excess, r);
        res.max_abs_residual = std::max(res.max_abs_residual, std::abs(r));
    }
    res.pass = require_equality ? res.max_abs_residual <= res.tol : res.max_excess <= res.tol;
    return res;
}

}  // namespace rholder
