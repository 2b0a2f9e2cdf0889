// Acceptance gate for the library. Runs eight end-to-end checks against
// analytic anchors, an independent finite difference oracle, and the
// diagnostic layers, printing exactly one [PASS]/[FAIL] line per criterion
// with its wall time. Exit status is the number of failed criteria.
//
// The checks are property-based: tolerances sit next to each assertion, and
// a criterion that cannot be met reports its actual numbers instead of being
// loosened. Criteria 4 through 6 share one set of pipeline runs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "rholder/batch.hpp"
#include "rholder/comparison.hpp"
#include "rholder/eigensolver.hpp"
#include "rholder/model_space.hpp"
#include "rholder/pipeline.hpp"
#include "rholder/rearrangement.hpp"
#include "rholder/stability.hpp"

using namespace rholder;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string strf(const char* fmt, ...) {
    char buf[512];
    std::va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

struct Outcome {
    bool pass = true;
    int checks = 0;
    int failures = 0;
    std::string first_failure;
    std::string summary;  // numbers worth seeing even on a green run

    void expect(bool ok, const std::string& why) {
        ++checks;
        if (!ok) {
            ++failures;
            pass = false;
            if (first_failure.empty()) first_failure = why;
        }
    }
};

// Pipeline runs shared between the comparison suite (criterion 4), the cap
// equality checks (criterion 5) and the differential inequalities
// (criterion 6).
struct SuiteCache {
    struct Entry {
        ModelParams mp;
        PipelineRun run;
    };
    std::vector<Entry> intervals;
    std::vector<Entry> caps;
};

const double kSuiteNs[] = {2.0, 2.5, 3.0, 6.0};

// ---- criterion 1: hemisphere anchors ---------------------------------

// The cap of mass 1/2 in the canonical N-model is [0, pi/2]; its first
// eigenpair is (N, cos t) for every N, which pins both the eigenvalue and
// the eigenfunction to closed form.
Outcome hemisphere_anchors() {
    Outcome out;
    double worst_lambda = 0.0, worst_dev = 0.0;
    for (double N : {2.0, 3.0, 5.0, 7.5}) {
        ModelParams mp = make_canonical_model(N);
        EigenPair u = first_eigen_cap(mp, 0.5);
        double rel = std::abs(u.lambda - N) / N;
        worst_lambda = std::max(worst_lambda, rel);
        out.expect(rel < 1e-6, strf("N=%g: lambda rel err %.3g", N, rel));
        double dev = 0.0;
        for (std::size_t i = 0; i < u.values.size(); ++i)
            dev = std::max(dev, std::abs(u.values[i] - std::cos(u.grid.nodes[i])));
        worst_dev = std::max(worst_dev, dev);
        out.expect(dev < 1e-6, strf("N=%g: sup dev from cos %.3g", N, dev));
    }
    out.summary = strf("max lambda rel err %.2g, max sup dev %.2g", worst_lambda, worst_dev);
    return out;
}

// ---- criterion 2: shooting vs finite difference oracle ---------------

Outcome oracle_agreement() {
    Outcome out;
    std::mt19937 rng(20260816);
    std::uniform_real_distribution<double> uN(1.1, 10.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        double N = uN(rng);
        ModelParams mp = make_canonical_model(N);
        double shoot, fd;
        std::string tag;
        if (i % 2 == 0) {
            double v = 0.1 + 0.7 * u01(rng);
            shoot = first_eigen_cap(mp, v).lambda;
            fd = oracle_fd_eigen(mp, Cap{v}, 4000).lambda;
            tag = strf("cap N=%.3f v=%.3f", N, v);
        } else {
            double a = 0.05 * mp.L + 0.5 * mp.L * u01(rng);
            double b = a + 0.2 * mp.L + (0.95 * mp.L - a - 0.2 * mp.L) * u01(rng);
            shoot = first_eigen_interval(mp, a, b).lambda;
            fd = oracle_fd_eigen(mp, Interval{a, b}, 4000).lambda;
            tag = strf("interval N=%.3f (%.3f,%.3f)", N, a, b);
        }
        double rel = std::abs(shoot - fd) / std::abs(shoot);
        worst = std::max(worst, rel);
        out.expect(rel < 1e-4, strf("%s: rel diff %.3g", tag.c_str(), rel));
    }
    out.summary = strf("20 instances, max rel diff %.2g", worst);
    return out;
}

// ---- criterion 3: rearrangement invariants ---------------------------

WeightedSamples random_samples(std::mt19937& rng, int max_pieces, bool force_ties) {
    std::uniform_int_distribution<int> un(1, max_pieces);
    std::uniform_real_distribution<double> uv(0.0, 5.0);
    std::uniform_real_distribution<double> um(0.01, 1.0);
    int n = un(rng);
    WeightedSamples s;
    for (int i = 0; i < n; ++i) {
        double v = uv(rng);
        if (force_ties && i > 0 && i % 3 == 0) v = s.values[i - 1];
        s.values.push_back(v);
        s.masses.push_back(um(rng));
    }
    return s;
}

Outcome rearrangement_invariants() {
    Outcome out;
    std::mt19937 rng(3407);
    const double ps[] = {0.5, 1.0, 2.0, 7.0, kInf};
    double worst_lp = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        WeightedSamples s = random_samples(rng, 40, trial % 2 == 1);
        StepProfile prof = decreasing_rearrangement(s);

        // Equimeasurability holds exactly: the distribution functions agree
        // bitwise at every level, just below every level, and at zero.
        bool equimeasurable = distribution_function(s, 0.0) == distribution_function(prof, 0.0);
        for (double level : prof.levels) {
            equimeasurable &= distribution_function(s, level) == distribution_function(prof, level);
            equimeasurable &=
                distribution_function(s, 0.999 * level) == distribution_function(prof, 0.999 * level);
        }
        out.expect(equimeasurable, strf("trial %d: distribution functions differ", trial));

        for (double p : ps) {
            double a = lp_norm(s, p), b = lp_norm(prof, p);
            double err = std::abs(a - b) / std::max(1.0, std::abs(a));
            worst_lp = std::max(worst_lp, err);
            out.expect(err <= 1e-12, strf("trial %d: L^%g drift %.3g", trial, p, err));
        }

        StepProfile again = decreasing_rearrangement(prof);
        out.expect(again.breakpoints == prof.breakpoints && again.levels == prof.levels,
                   strf("trial %d: rearrangement not idempotent", trial));
    }
    out.summary = strf("200 trials, max L^p drift %.2g", worst_lp);
    return out;
}

// ---- criterion 4: interval comparison suite --------------------------

// Ten proper intervals per N, taken from the mass-preserving family that
// slides the target interval back toward its cap (the cap row itself is
// excluded here and exercised by criterion 5).
Outcome interval_comparison_suite(SuiteCache& cache) {
    Outcome out;
    for (double N : kSuiteNs) {
        ModelParams mp = make_canonical_model(N);
        auto family = caps_to_interval_family(mp, 0.3 * mp.L, 0.8 * mp.L, 11);
        for (std::size_t j = 1; j < family.size(); ++j)
            cache.intervals.push_back({mp, run_pipeline(mp, Domain{family[j]})});
    }

    double min_slack = kInf, min_margin = kInf, max_alpha_ratio = 0.0;
    for (const auto& entry : cache.intervals) {
        const PipelineRun& run = entry.run;
        std::string tag = strf("N=%g (%.3f,%.3f)", entry.mp.N, std::get<Interval>(run.domain).a,
                               std::get<Interval>(run.domain).b);
        out.expect(run.alpha.alpha < run.v, strf("%s: alpha %.17g !< v %.17g", tag.c_str(),
                                                 run.alpha.alpha, run.v));
        max_alpha_ratio = std::max(max_alpha_ratio, run.alpha.alpha / run.v);
        for (double p : {1.0, 2.0}) {
            const double q_grid[] = {p, 2 * p, 4 * p, 8 * p, kInf};
            ChitiReport rep = chiti_for(run, p, q_grid);
            out.expect(rep.sign_changes == 1 && !rep.violation,
                       strf("%s p=%g: %d sign changes", tag.c_str(), p, rep.sign_changes));
            out.expect(!rep.equality_case, strf("%s p=%g: collapsed to equality", tag.c_str(), p));
            min_margin = std::min(min_margin, rep.cumulative_margin);
            out.expect(rep.cumulative_margin >= -1e-8,
                       strf("%s p=%g: cumulative margin %.3g", tag.c_str(), p, rep.cumulative_margin));
            for (std::size_t k = 0; k < rep.slack.size(); ++k) {
                min_slack = std::min(min_slack, rep.slack[k]);
                out.expect(rep.slack[k] >= -1e-6, strf("%s p=%g q=%g: slack %.3g", tag.c_str(), p,
                                                       rep.q_grid[k], rep.slack[k]));
            }
        }
    }
    out.summary = strf("%zu domains, min slack %.2g, min margin %.2g, max alpha/v %.4f",
                       cache.intervals.size(), min_slack, min_margin, max_alpha_ratio);
    return out;
}

// ---- criterion 5: cap equality and rigidity --------------------------

Outcome cap_equality(SuiteCache& cache) {
    Outcome out;
    double max_slack = 0.0, max_alpha_err = 0.0;
    for (double N : kSuiteNs) {
        ModelParams mp = make_canonical_model(N);
        for (double v : {0.2, 0.35, 0.5, 0.65, 0.8}) {
            cache.caps.push_back({mp, run_pipeline(mp, Domain{Cap{v}})});
            const PipelineRun& run = cache.caps.back().run;
            double alpha_err = std::abs(run.alpha.alpha - run.v);
            max_alpha_err = std::max(max_alpha_err, alpha_err);
            out.expect(alpha_err <= 1e-8,
                       strf("N=%g v=%g: |alpha - v| = %.3g", N, v, alpha_err));
            for (double p : {1.0, 2.0}) {
                const double q_grid[] = {p, 2 * p, 4 * p, 8 * p, kInf};
                ChitiReport rep = chiti_for(run, p, q_grid);
                for (double s : rep.slack) {
                    max_slack = std::max(max_slack, std::abs(s));
                    out.expect(std::abs(s) < 1e-8, strf("N=%g v=%g p=%g: slack %.3g", N, v, p, s));
                }
                out.expect(rep.equality_case, strf("N=%g v=%g p=%g: equality not detected", N, v, p));
            }
        }
    }
    out.summary = strf("%zu caps, max |slack| %.2g, max |alpha - v| %.2g", cache.caps.size(),
                       max_slack, max_alpha_err);
    return out;
}

// ---- criterion 6: discrete differential inequalities -----------------

// On every suite profile: the rearranged eigenfunction satisfies the flux
// inequality one-sidedly, the matched cap profile with equality, both within
// the checker's 10h budget.
Outcome differential_inequalities(const SuiteCache& cache) {
    Outcome out;
    out.expect(!cache.intervals.empty() && !cache.caps.empty(),
               "comparison suite unavailable, nothing to check");
    double worst_u = -kInf, worst_z = 0.0;
    auto visit = [&](const SuiteCache::Entry& entry, const char* kind) {
        FluxResidual ur =
            differential_inequality_check(entry.run.u_sharp, entry.run.lambda, entry.mp, false);
        worst_u = std::max(worst_u, ur.max_excess / ur.tol);
        out.expect(ur.pass, strf("%s N=%g: u excess %.3g over tol %.3g", kind, entry.mp.N,
                                 ur.max_excess, ur.tol));
        FluxResidual zr =
            differential_inequality_check(entry.run.z_sharp, entry.run.lambda, entry.mp, true);
        worst_z = std::max(worst_z, zr.max_abs_residual / zr.tol);
        out.expect(zr.pass, strf("%s N=%g: z residual %.3g over tol %.3g", kind, entry.mp.N,
                                 zr.max_abs_residual, zr.tol));
    };
    for (const auto& e : cache.intervals) visit(e, "interval");
    for (const auto& e : cache.caps) visit(e, "cap");
    out.summary = strf("%zu profiles, worst u excess/tol %.2f, worst z residual/tol %.2f",
                       2 * (cache.intervals.size() + cache.caps.size()), worst_u, worst_z);
    return out;
}

// ---- criterion 7: coarea identity convergence ------------------------

Outcome coarea_convergence() {
    Outcome out;
    struct Case {
        double N;
        Domain dom;
        const char* tag;
    };
    ModelParams mp2 = make_canonical_model(2.0);
    const Case cases[] = {
        {2.0, Domain{Interval{mp2.L / 4, 3 * mp2.L / 4}}, "interval N=2"},
        {3.0, Domain{Cap{0.55}}, "cap N=3"},
    };
    std::string numbers;
    for (const Case& cs : cases) {
        ModelParams mp = make_canonical_model(cs.N);
        auto solve = [&](int grid_n) {
            SolveOptions opt;
            opt.grid_n = grid_n;
            if (std::holds_alternative<Cap>(cs.dom))
                return first_eigen_cap(mp, std::get<Cap>(cs.dom).v, opt);
            const Interval& iv = std::get<Interval>(cs.dom);
            return first_eigen_interval(mp, iv.a, iv.b, opt);
        };
        // Default resolution, then everything halved: both the solver grid
        // and the level grid, so the residual scale h is halved outright.
        CoareaResult fine = coarea_check(solve(20000), mp, 0.0, kInf, 1024);
        CoareaResult coarse = coarea_check(solve(10000), mp, 0.0, kInf, 512);
        out.expect(fine.residual < 1e-3,
                   strf("%s: residual %.3g at default grid", cs.tag, fine.residual));
        out.expect(coarse.residual >= 3.0 * fine.residual,
                   strf("%s: improvement %.2fx under halving", cs.tag,
                        coarse.residual / fine.residual));
        numbers += strf("%s%s %.2g -> %.2g (%.1fx)", numbers.empty() ? "" : "; ", cs.tag,
                        coarse.residual, fine.residual, coarse.residual / fine.residual);
    }
    out.summary = numbers;
    return out;
}

// ---- criterion 8: stability diagnostics ------------------------------

Outcome stability_diagnostics() {
    Outcome out;
    double fitted_c = 0.0, min_gap = kInf;
    int witness_rows = 0;
    for (double N : {2.0, 3.0}) {
        ModelParams mp = make_canonical_model(N);
        auto family = caps_to_interval_family(mp, mp.L / 4, 3 * mp.L / 4, 16);
        auto reports = run_stability_sweep(mp, family, {}, {});

        // Row 0 is the cap itself: rigid, with perimeter ratio pinned to 1.
        const StabilityReport& cap_row = reports.front();
        out.expect(cap_row.rigid, strf("N=%g: cap row not rigid (delta %.3g)", N, cap_row.delta));
        out.expect(cap_row.perimeter_ratio &&
                       std::abs(*cap_row.perimeter_ratio - 1.0) <= 1e-6,
                   strf("N=%g: cap row ratio %.8f", N,
                        cap_row.perimeter_ratio ? *cap_row.perimeter_ratio : 0.0));

        std::vector<std::pair<double, double>> delta_ratio;  // nonrigid rows
        for (std::size_t j = 0; j < reports.size(); ++j) {
            const StabilityReport& rep = reports[j];
            for (std::size_t k = 0; k < rep.gaps.size(); ++k) {
                min_gap = std::min(min_gap, rep.gaps[k]);
                out.expect(rep.gaps[k] >= -1e-6, strf("N=%g row %zu q=%g: gap %.3g", N, j,
                                                      rep.q_grid[k], rep.gaps[k]));
            }
            if (rep.in_regime && !rep.rigid && rep.u_at_y) {
                ++witness_rows;
                double bound = rep.v * std::sqrt(rep.delta) + 1e-6;
                out.expect(*rep.u_at_y <= bound, strf("N=%g row %zu: witness mean %.6g > %.6g", N,
                                                      j, *rep.u_at_y, bound));
            }
            if (rep.perimeter_ratio) {
                out.expect(*rep.perimeter_ratio >= 1.0 - 1e-6,
                           strf("N=%g row %zu: ratio %.8f below 1", N, j, *rep.perimeter_ratio));
                if (!rep.rigid) {
                    delta_ratio.emplace_back(rep.delta, *rep.perimeter_ratio);
                    if (rep.ratio_slope) fitted_c = std::max(fitted_c, *rep.ratio_slope);
                }
            }
        }

        // The family interpolates to the cap, so the ratio excess must fade
        // as delta does: compare the extreme nonrigid rows.
        std::sort(delta_ratio.begin(), delta_ratio.end());
        out.expect(delta_ratio.size() >= 3, strf("N=%g: only %zu nonrigid rows carry a ratio", N,
                                                 delta_ratio.size()));
        if (delta_ratio.size() >= 3) {
            double low = std::abs(delta_ratio.front().second - 1.0);
            double high = std::abs(delta_ratio.back().second - 1.0);
            out.expect(low <= high + 1e-9,
                       strf("N=%g: ratio excess %.3g at smallest delta vs %.3g at largest", N, low,
                            high));
        }
    }
    out.summary = strf("fitted c %.3f, %d witness rows in regime, min gap %.2g", fitted_c,
                       witness_rows, min_gap);
    return out;
}

}  // namespace

int main() {
    SuiteCache cache;
    struct Criterion {
        int id;
        const char* label;
        double budget;  // seconds; 0 means unbudgeted
        std::function<Outcome()> body;
    };
    const Criterion criteria[] = {
        {1, "hemisphere anchors", 2.0, hemisphere_anchors},
        {2, "shooting vs finite difference oracle", 30.0, oracle_agreement},
        {3, "rearrangement invariants", 5.0, rearrangement_invariants},
        {4, "interval comparison suite", 120.0, [&] { return interval_comparison_suite(cache); }},
        {5, "cap equality and rigidity", 0.0, [&] { return cap_equality(cache); }},
        {6, "discrete differential inequalities", 0.0,
         [&] { return differential_inequalities(cache); }},
        {7, "coarea identity convergence", 0.0, coarea_convergence},
        {8, "stability diagnostics", 0.0, stability_diagnostics},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.body();
        } catch (const std::exception& e) {
            out.pass = false;
            out.first_failure = strf("unhandled %s", e.what());
        }
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget > 0.0 && dt > c.budget) {
            out.pass = false;
            if (out.first_failure.empty())
                out.first_failure = strf("over time budget (%.2f s > %.0f s)", dt, c.budget);
        }
        std::string note = out.summary;
        if (!out.pass && !out.first_failure.empty()) {
            if (out.failures > 1)
                note = strf("%d/%d checks failed; first: %s", out.failures, out.checks,
                            out.first_failure.c_str());
            else
                note = out.first_failure;
        }
        std::printf("[%s] %d %s (%.2f s)%s%s\n", out.pass ? "PASS" : "FAIL", c.id, c.label, dt,
                    note.empty() ? "" : ": ", note.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failed;
    }
    return failed;
}
