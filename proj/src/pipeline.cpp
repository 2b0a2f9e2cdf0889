#include "rholder/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rholder {

namespace {

// Linear interpolation of the level-t crossing on a monotone value range.
// lo..hi must bracket t; rising says which way the values run.
double crossing_between(const std::vector<double>& x, const std::vector<double>& val,
                        std::size_t j, double t) {
    double v0 = val[j], v1 = val[j + 1];
    if (v1 == v0) return x[j];
    double f = (t - v0) / (v1 - v0);
    f = std::clamp(f, 0.0, 1.0);
    return x[j] + f * (x[j + 1] - x[j]);
}

}  // namespace

StepProfile level_sliced_profile(const EigenPair& u, const ModelParams& mp,
                                 std::span<const double> levels) {
    const std::vector<double>& x = u.grid.nodes;
    const std::vector<double>& val = u.values;
    if (x.size() < 2 || x.size() != val.size())
        throw std::domain_error("level_sliced_profile: malformed eigenpair");
    if (levels.empty() || levels.back() != 0.0)
        throw std::domain_error("level_sliced_profile: level grid must end at 0");
    for (std::size_t k = 0; k + 1 < levels.size(); ++k)
        if (!(levels[k] > levels[k + 1]))
            throw std::domain_error("level_sliced_profile: levels must strictly decrease");

    std::size_t imax =
        static_cast<std::size_t>(std::max_element(val.begin(), val.end()) - val.begin());
    CumulativeTable table(mp);

    // First eigenfunctions are unimodal, so each branch is searched on its
    // own monotone index range.
    auto left_edge = [&](double t) {
        if (val.front() > t) return x.front();
        // first index with value above t; the crossing sits just before it
        std::size_t lo = 0, hi = imax;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (val[mid] <= t) lo = mid + 1; else hi = mid;
        }
        return crossing_between(x, val, lo - 1, t);
    };
    auto right_edge = [&](double t) {
        if (val.back() > t) return x.back();
        std::size_t lo = imax, hi = val.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (val[mid] > t) lo = mid + 1; else hi = mid;
        }
        return crossing_between(x, val, lo - 1, t);
    };

    StepProfile prof;
    prof.breakpoints.push_back(0.0);
    double prev = 0.0;
    double top = val[imax];
    for (std::size_t k = 0; k < levels.size(); ++k) {
        double t = levels[k];
        if (t >= top) continue;
        double mass = table.mass_of(right_edge(t)) - table.mass_of(left_edge(t));
        if (mass > prev) {
            // the piece spans (prev, mass] and holds values in (t, tag]
            prof.breakpoints.push_back(mass);
            prof.levels.push_back(k == 0 ? top : levels[k - 1]);
            prev = mass;
        }
    }
    if (prof.levels.empty())
        throw std::domain_error("level_sliced_profile: no level cuts the eigenfunction");
    return prof;
}

PipelineRun run_pipeline(const ModelParams& mp, const Domain& dom, const PipelineOptions& opt) {
    PipelineRun run;
    run.params = mp;
    run.domain = dom;
    if (const Cap* cap = std::get_if<Cap>(&dom)) {
        run.v = cap->v;
        run.is_cap = true;
        run.u_pair = first_eigen_cap(mp, cap->v, opt.solve);
    } else {
        const Interval& iv = std::get<Interval>(dom);
        run.v = cumulative(mp, iv.b) - cumulative(mp, iv.a);
        run.is_cap = iv.a == 0.0 || iv.b == mp.L;  // ball about either pole
        run.u_pair = first_eigen_interval(mp, iv.a, iv.b, opt.solve);
    }
    run.lambda = run.u_pair.lambda;
    run.alpha = find_alpha(mp, run.lambda, run.v, opt.alpha_tol, opt.solve);
    run.z_pair = first_eigen_cap(mp, run.alpha.alpha, opt.solve);
    run.u_sharp = decreasing_rearrangement(weighted_cell_samples(run.u_pair, mp));
    run.z_sharp = decreasing_rearrangement(weighted_cell_samples(run.z_pair, mp));
    return run;
}

ChitiReport chiti_for(const PipelineRun& run, double p, std::span<const double> q_grid,
                      const Tolerances& tol) {
    ChitiReport rep = reverse_holder_check(run.u_sharp, run.z_sharp, p, q_grid, tol);
    if (rep.equality_case) return rep;

    // The sampled staircases wobble by about one value-grid cell near the
    // crossing, orders of magnitude above the dead-band, which shows up as
    // spurious extra sign changes. Slice both eigenfunctions on a shared
    // level grid instead: the difference is then quantized to whole level
    // steps, so the sign pattern reduces to the ordering of superlevel
    // masses, and the interpolated breakpoints resolve that ordering to
    // well below the band. Everything else in the report keeps the
    // staircase numbers.
    double gamma = scale_to_match(run.u_sharp, run.z_sharp, p).levels.front() /
                   run.z_sharp.levels.front();
    double u_top = *std::max_element(run.u_pair.values.begin(), run.u_pair.values.end());
    double z_top = *std::max_element(run.z_pair.values.begin(), run.z_pair.values.end());
    double top = std::max(u_top, gamma * z_top);

    const std::size_t m = 2048;
    std::vector<double> lu(m + 1), lz(m + 1);
    for (std::size_t k = 0; k < m; ++k) {
        lu[k] = top * (1.0 - static_cast<double>(k) / m);
        lz[k] = lu[k] / gamma;
    }
    lu[m] = 0.0;
    lz[m] = 0.0;

    StepProfile u_sl = level_sliced_profile(run.u_pair, run.params, lu);
    StepProfile z_sl = level_sliced_profile(run.z_pair, run.params, lz);
    for (double& l : z_sl.levels) l *= gamma;  // back onto the shared grid
    StepProfile z_ext = extend_by_zero(z_sl, std::max(u_sl.total(), z_sl.total()));

    double band = tol.band_rel * z_ext.levels.front();
    CrossingResult cr = crossing_analysis(u_sl, z_ext, band);
    rep.sign_changes = cr.sign_changes;
    rep.r1 = cr.r1;
    std::erase_if(rep.notes,
                  [](const std::string& n) { return n.starts_with("crossing structure:"); });
    if (cr.violation) rep.notes.push_back("crossing structure: " + cr.note);
    rep.violation = !rep.notes.empty();
    return rep;
}

}  // namespace rholder
