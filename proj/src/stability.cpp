#include "rholder/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rholder {

std::vector<double> StabilityOptions::default_q_grid() {
    return {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, std::numeric_limits<double>::infinity()};
}

StabilityReport gap_profile(const StepProfile& u_unit, const StepProfile& z_unit,
                            std::span<const double> q_grid) {
    validate_profile(u_unit);
    validate_profile(z_unit);
    if (std::abs(lp_norm(u_unit, 1.0) - 1.0) > 1e-9 ||
        std::abs(lp_norm(z_unit, 1.0) - 1.0) > 1e-9)
        throw std::domain_error("gap_profile: profiles must carry unit L1 norm");
    StabilityReport rep;
    rep.delta = -std::numeric_limits<double>::infinity();
    for (double q : q_grid) {
        if (!(q >= 1.0)) throw std::domain_error("gap_profile: exponents must be >= 1");
        double g = lp_norm(z_unit, q) - lp_norm(u_unit, q);
        rep.q_grid.push_back(q);
        rep.gaps.push_back(g);
        rep.delta = std::max(rep.delta, g);
    }
    rep.sup_gap = z_unit.levels.front() - u_unit.levels.front();
    return rep;
}

WitnessResult mean_value_witness(const StepProfile& u_sharp, double alpha, double delta,
                                 double v) {
    validate_profile(u_sharp);
    if (!(delta > 0.0)) throw std::domain_error("mean_value_witness: delta must be positive");
    if (!(alpha > 0.0) || !(alpha < v))
        throw std::domain_error("mean_value_witness: need 0 < alpha < v");

    double sd = std::sqrt(delta);
    WitnessResult res;
    res.window_overflow = alpha + sd > v * (1.0 + 1e-15);
    double hi = std::min(alpha + sd, u_sharp.total());

    // Window mean of u#, with u# equal to 0 beyond its support.
    double acc = 0.0;
    const auto& br = u_sharp.breakpoints;
    for (std::size_t i = 0; i < u_sharp.levels.size(); ++i) {
        double lo_i = std::max(br[i], alpha), hi_i = std::min(br[i + 1], hi);
        if (hi_i > lo_i) acc += u_sharp.levels[i] * (hi_i - lo_i);
    }
    double mean = acc / sd;
    res.u_at_y = mean;

    // Largest point of the window where the profile still reaches the mean.
    // The mean of a non-increasing function over the window is attained
    // inside it, so the scan cannot run off the end.
    double y = alpha;
    for (std::size_t i = 0; i < u_sharp.levels.size(); ++i) {
        if (br[i + 1] <= alpha) continue;
        if (br[i] >= hi) break;
        if (u_sharp.levels[i] >= mean)
            y = std::min(br[i + 1], hi);
        else
            break;
    }
    res.y = std::max(y, alpha);
    return res;
}

std::vector<std::pair<double, double>> superlevel_set(const EigenPair& u, double t) {
    if (!(t >= 0.0)) throw std::domain_error("superlevel_set: level must be nonnegative");
    const auto& x = u.grid.nodes;
    const auto& f = u.values;
    std::vector<std::pair<double, double>> spans;
    bool open = false;
    double left = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        bool above_l = f[i] > t, above_r = f[i + 1] > t;
        if (!open && above_l && i == 0) {
            open = true;
            left = x[0];
        }
        if (above_l == above_r) continue;
        double cross = x[i] + (t - f[i]) / (f[i + 1] - f[i]) * (x[i + 1] - x[i]);
        if (open) {
            spans.emplace_back(left, cross);
            open = false;
        } else {
            open = true;
            left = cross;
        }
    }
    if (open) spans.emplace_back(left, x.back());
    return spans;
}

double superlevel_perimeter_1d(const EigenPair& u, const ModelParams& mp, double t) {
    // Span endpoints at the ambient poles contribute density 0, so poles
    // exclude themselves; crossings that land exactly on a Dirichlet
    // endpoint (level 0) still count, keeping the perimeter continuous in t
    // down to t = 0.
    double per = 0.0;
    for (const auto& [a, b] : superlevel_set(u, t)) per += density(mp, a) + density(mp, b);
    return per;
}

CoareaResult coarea_check(const EigenPair& u, const ModelParams& mp, double t_lo, double t_hi,
                          int levels, Exec exec) {
    if (!(t_lo >= 0.0)) throw std::domain_error("coarea_check: t_lo must be nonnegative");
    if (levels < 8) throw std::domain_error("coarea_check: need at least 8 level intervals");
    double umax = *std::max_element(u.values.begin(), u.values.end());
    bool to_max = !(t_hi < umax);
    if (to_max) t_hi = umax;
    CoareaResult res;
    if (!(t_hi > t_lo)) return res;

    // Band gradient integral, cell by cell: |u'| dm over the part of the
    // cell whose values fall in (t_lo, t_hi], weight at the band segment
    // midpoint. Exact for piecewise-linear u up to the O(h^2) weight rule.
    const auto& x = u.grid.nodes;
    const auto& f = u.values;
    double lhs = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        double va = f[i], vb = f[i + 1];
        double vlo = std::min(va, vb), vhi = std::max(va, vb);
        double clo = std::max(vlo, t_lo), chi = std::min(vhi, t_hi);
        if (!(chi > clo)) continue;
        auto pos = [&](double level) {
            return x[i] + (level - va) / (vb - va) * (x[i + 1] - x[i]);
        };
        double xm = 0.5 * (pos(clo) + pos(chi));
        lhs += (chi - clo) * density(mp, xm);
    }
    res.lhs = lhs;

    // Level integral of the perimeter. Near the max the perimeter behaves
    // like a square root in the level, so integrate in tau with
    // s = t_hi - tau^2 when the band reaches the max.
    int n = levels % 2 == 0 ? levels : levels + 1;
    std::vector<double> vals(n + 1);
    if (to_max) {
        double tau_max = std::sqrt(t_hi - t_lo);
        double h = tau_max / n;
        parallel_for(static_cast<std::size_t>(n) + 1, exec, [&](std::size_t j) {
            double tau = j == static_cast<std::size_t>(n) ? tau_max : j * h;
            vals[j] = 2.0 * tau * superlevel_perimeter_1d(u, mp, t_hi - tau * tau);
        });
        double acc = vals[0] + vals[n];
        for (int j = 1; j < n; j += 2) acc += 4.0 * vals[j];
        for (int j = 2; j < n; j += 2) acc += 2.0 * vals[j];
        res.rhs = acc * h / 3.0;
    } else {
        double h = (t_hi - t_lo) / n;
        parallel_for(static_cast<std::size_t>(n) + 1, exec, [&](std::size_t j) {
            double s = j == static_cast<std::size_t>(n) ? t_hi : t_lo + j * h;
            vals[j] = superlevel_perimeter_1d(u, mp, s);
        });
        double acc = vals[0] + vals[n];
        for (int j = 1; j < n; j += 2) acc += 4.0 * vals[j];
        for (int j = 2; j < n; j += 2) acc += 2.0 * vals[j];
        res.rhs = acc * h / 3.0;
    }
    res.residual = std::abs(res.lhs - res.rhs) / std::max(res.lhs, 1e-300);
    return res;
}

RatioProbe perimeter_ratio_probe(const EigenPair& u_pair, const ModelParams& mp,
                                 double unit_scale, double u0, double u_at_y, double z0,
                                 double delta, int levels) {
    RatioProbe probe;
    if (!(u0 - u_at_y > 0.25 * z0)) return probe;  // outside the regime
    probe.in_regime = true;

    CumulativeTable table(mp);
    double best = std::numeric_limits<double>::infinity(), best_t = u_at_y;
    for (int j = 1; j <= levels; ++j) {
        double t_unit = u_at_y + (u0 - u_at_y) * j / (levels + 1.0);
        double t_raw = t_unit / unit_scale;
        auto spans = superlevel_set(u_pair, t_raw);
        if (spans.empty()) continue;
        double per = 0.0, mu = 0.0;
        for (const auto& [a, b] : spans) {
            per += density(mp, a) + density(mp, b);
            mu += table.mass_of(b) - table.mass_of(a);
        }
        double iso = table.iso_of_mass(std::clamp(mu, 0.0, 1.0));
        if (!(iso > 0.0)) continue;
        double ratio = (per * per) / (iso * iso);
        if (ratio < best) {
            best = ratio;
            best_t = t_unit;
        }
    }
    if (!std::isfinite(best)) {
        probe.in_regime = false;
        return probe;
    }
    probe.t0 = best_t;
    probe.ratio = best;
    probe.slope = delta > 0.0 ? (best - 1.0) / std::sqrt(delta) : 0.0;
    return probe;
}

StabilityReport stability_report(const PipelineRun& run, const StabilityOptions& opt) {
    double mu = lp_norm(run.u_sharp, 1.0), mz = lp_norm(run.z_sharp, 1.0);
    StepProfile u_unit = merge_equal_levels(
        transform_levels(run.u_sharp, [&](double l) { return l / mu; }));
    StepProfile z_unit = merge_equal_levels(
        transform_levels(run.z_sharp, [&](double l) { return l / mz; }));

    StabilityReport rep = gap_profile(u_unit, z_unit, opt.q_grid);
    rep.alpha = run.z_sharp.total();
    rep.v = run.u_sharp.total();
    rep.diam_bound_exponent = run.params.N;

    double z0 = z_unit.levels.front(), u0 = u_unit.levels.front();
    rep.delta_tilde = std::min(0.5 * z0, std::pow(z0 / (4.0 * rep.v), 2.0));
    rep.in_regime = rep.delta < rep.delta_tilde;
    rep.rigid = rep.delta < 1e-8;

    // Threshold the probe scans above. Rigid runs have no witness (the
    // window needs alpha < v), but the probe is still well posed at any
    // level, and anchoring it at u0/2 gives sweep families a ratio = 1
    // endpoint at the cap row.
    double probe_floor = 0.5 * u0;
    if (!rep.rigid) {
        WitnessResult w = mean_value_witness(u_unit, rep.alpha, rep.delta, rep.v);
        // Overflow of the window past v is only an annotation: the mean is
        // taken with u# extended by zero, which keeps the witness chain
        // intact (the profile genuinely vanishes beyond its support).
        rep.window_overflow = w.window_overflow;
        rep.y = w.y;
        rep.u_at_y = w.u_at_y;
        probe_floor = w.u_at_y;
    }

    RatioProbe probe = perimeter_ratio_probe(run.u_pair, run.params, 1.0 / mu, u0,
                                             probe_floor, z0, rep.delta, opt.probe_levels);
    if (probe.in_regime) {
        rep.t0 = probe.t0;
        rep.perimeter_ratio = probe.ratio;
        rep.ratio_slope = probe.slope;
    }
    if (rep.rigid)
        rep.status = "rigid";
    else
        rep.status = rep.in_regime && probe.in_regime ? "ok" : "outside-stability-regime";
    return rep;
}

std::vector<Interval> caps_to_interval_family(const ModelParams& mp, double a, double b,
                                              int rows) {
    if (!(a > 0.0) || !(b > a) || !(b <= mp.L))
        throw std::domain_error("sweep family: need 0 < a < b <= L");
    if (rows < 2) throw std::domain_error("sweep family: need at least two rows");
    double mass_a = cumulative(mp, a);
    double v = cumulative(mp, b) - mass_a;
    std::vector<Interval> out;
    out.reserve(rows);
    for (int j = 0; j < rows; ++j) {
        double lj = a * j / (rows - 1.0);
        double rj = j == 0 ? quantile(mp, v)
                           : (j == rows - 1 ? b : quantile(mp, v + cumulative(mp, lj)));
        out.push_back(Interval{lj, rj});
    }
    return out;
}

std::vector<StabilityReport> run_stability_sweep(const ModelParams& mp,
                                                 const std::vector<Interval>& rows,
                                                 const PipelineOptions& popt,
                                                 const StabilityOptions& sopt) {
    std::vector<StabilityReport> out(rows.size());
    parallel_for(rows.size(), sopt.exec, [&](std::size_t i) {
        PipelineRun run = run_pipeline(mp, Domain{rows[i]}, popt);
        StabilityOptions row_opt = sopt;
        row_opt.exec = Exec::serial;  // rows already fan out
        out[i] = stability_report(run, row_opt);
    });
    return out;
}

}  // namespace rholder
