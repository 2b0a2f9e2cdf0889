#include "rholder/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rholder {

namespace {

constexpr double kPi = std::numbers::pi;

struct Rhs {
    double N;
    double lambda;
    detail::OdeState operator()(double t, const detail::OdeState& y) const {
        double s = std::sin(t), c = std::cos(t);
        return {y.p, -(N - 1.0) * (c / s) * y.p - lambda * y.z};
    }
};

detail::OdeState rk4_step(const Rhs& f, double t, const detail::OdeState& y, double h) {
    auto k1 = f(t, y);
    auto k2 = f(t + 0.5 * h, {y.z + 0.5 * h * k1.z, y.p + 0.5 * h * k1.p});
    auto k3 = f(t + 0.5 * h, {y.z + 0.5 * h * k2.z, y.p + 0.5 * h * k2.p});
    auto k4 = f(t + h, {y.z + h * k3.z, y.p + h * k3.p});
    return {y.z + h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
            y.p + h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p)};
}

// Offset of the series seed from a weight zero. Kept well above the step
// size so the cot singularity never enters the RK4 stages.
double seed_offset(double span) { return std::min(1e-4 * kPi, span / 16.0); }

int step_count(int grid_n, double span) {
    int n = static_cast<int>(std::ceil(grid_n * span / kPi));
    return std::max(n, 64);
}

// Refine the first zero inside [t_lo, t_hi] given the state at t_lo.
// One RK4 step per probe is plenty: the bracket is already one step wide.
double refine_zero(double N, double lambda, double t_lo, detail::OdeState y_lo, double t_hi) {
    Rhs f{N, lambda};
    double lo = t_lo, hi = t_hi;
    for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
        double mid = 0.5 * (lo + hi);
        auto y = rk4_step(f, t_lo, y_lo, mid - t_lo);
        if (y.z > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct Bracket {
    double lo, hi;
};

// Grow [lo, hi] around guess until pred(lo) is false and pred(hi) is true.
template <class Pred>
Bracket bracket_eigenvalue(double guess, const Pred& pred, int max_expansions) {
    double lo = guess, hi = guess;
    if (pred(guess)) {
        int it = 0;
        while (pred(lo)) {
            hi = lo;
            lo *= 0.5;
            if (++it > max_expansions)
                throw SolverError("eigen: bracket never opened below the guess");
        }
    } else {
        int it = 0;
        while (!pred(hi)) {
            lo = hi;
            hi *= 2.0;
            if (++it > max_expansions)
                throw SolverError("eigen: bracket never closed above the guess");
        }
    }
    return {lo, hi};
}

template <class Pred>
double bisect_eigenvalue(Bracket b, const Pred& pred, double rel_tol) {
    while (b.hi - b.lo > rel_tol * b.hi) {
        double mid = 0.5 * (b.lo + b.hi);
        if (pred(mid))
            b.hi = mid;
        else
            b.lo = mid;
    }
    return 0.5 * (b.lo + b.hi);
}

void check_positivity(const std::vector<double>& values) {
    double mx = 0.0, mn = 0.0;
    for (double v : values) {
        mx = std::max(mx, v);
        mn = std::min(mn, v);
    }
    if (mx <= 0.0 || mn < -1e-8 * mx)
        throw SolverError("eigen: converged mode is not positive inside the domain");
}

// Normalize to unit sup, zero out the sub-tolerance negatives left by the
// final bisection residual, and pin Dirichlet endpoint values to 0.
void finalize_values(std::vector<double>& values, bool dirichlet_left, bool dirichlet_right) {
    check_positivity(values);
    double mx = *std::max_element(values.begin(), values.end());
    for (double& v : values) {
        v /= mx;
        if (v < 0.0) v = 0.0;
    }
    if (dirichlet_left) values.front() = 0.0;
    if (dirichlet_right) values.back() = 0.0;
}

EigenPair assemble_pair(const ModelParams& mp, double lambda_canonical,
                        std::vector<double> nodes_canonical, std::vector<double> values,
                        Domain dom, bool dirichlet_left, bool dirichlet_right) {
    finalize_values(values, dirichlet_left, dirichlet_right);
    double s = mp.scale();
    EigenPair ep;
    ep.lambda = lambda_canonical * s * s;
    ep.domain = dom;
    ep.values = std::move(values);
    ep.grid.nodes.resize(nodes_canonical.size());
    ep.grid.weights.resize(nodes_canonical.size());
    for (std::size_t i = 0; i < nodes_canonical.size(); ++i) {
        double t = std::clamp(nodes_canonical[i] / s, 0.0, mp.L);
        ep.grid.nodes[i] = t;
        ep.grid.weights[i] = density(mp, t);
    }
    return ep;
}

}  // namespace

namespace detail {

OdeState series_seed(double N, double lambda, double h) {
    double a2 = -lambda / (2.0 * N);
    double a4 = lambda * (lambda - 2.0 * (N - 1.0) / 3.0) / (8.0 * N * (N + 2.0));
    double h2 = h * h;
    return {1.0 + h2 * (a2 + h2 * a4), h * (2.0 * a2 + h2 * 4.0 * a4)};
}

ShotResult integrate_radial(double N, double lambda, double t0, OdeState y0, double t1,
                            int steps, std::vector<double>* nodes, std::vector<double>* values) {
    Rhs f{N, lambda};
    double h = (t1 - t0) / steps;
    ShotResult res;
    OdeState y = y0;
    double t = t0;
    for (int i = 0; i < steps; ++i) {
        double tn = i + 1 == steps ? t1 : t0 + (i + 1) * h;
        OdeState yn = rk4_step(f, t, y, tn - t);
        bool last = i + 1 == steps;
        if (!res.interior_flip && y.z > 0.0 && yn.z < 0.0 && !last) {
            res.interior_flip = true;
            res.flip_lo = t;
            res.flip_hi = tn;
            res.flip_state = y;
        }
        if (nodes) nodes->push_back(tn);
        if (values) values->push_back(yn.z);
        t = tn;
        y = yn;
    }
    res.end = y;
    return res;
}

}  // namespace detail

EigenPair first_eigen_cap(const ModelParams& mp, double v, const SolveOptions& opt) {
    if (!(v > 0.0) || !(v < 1.0))
        throw std::domain_error("first_eigen_cap: mass fraction must lie in (0, 1)");
    if (opt.grid_n < 100) throw std::domain_error("first_eigen_cap: grid too coarse");

    ModelParams canon = make_canonical_model(mp.N);
    double r = quantile(canon, v);
    double h0 = seed_offset(r);
    int steps = step_count(opt.grid_n, r - h0);
    double N = mp.N;

    auto pred = [&](double lam) {
        auto seed = detail::series_seed(N, lam, h0);
        auto shot = detail::integrate_radial(N, lam, h0, seed, r, steps);
        return shot.interior_flip || shot.end.z <= 0.0;
    };

    double guess = (kPi / r) * (kPi / r);
    double lam = bisect_eigenvalue(bracket_eigenvalue(guess, pred, opt.max_expansions), pred,
                                   opt.rel_tol);

    std::vector<double> nodes{0.0, h0}, values;
    auto seed = detail::series_seed(N, lam, h0);
    values = {1.0, seed.z};
    detail::integrate_radial(N, lam, h0, seed, r, steps, &nodes, &values);
    return assemble_pair(mp, lam, std::move(nodes), std::move(values), Cap{v},
                         /*dirichlet_left=*/false, /*dirichlet_right=*/true);
}

EigenPair first_eigen_interval(const ModelParams& mp, double a, double b,
                               const SolveOptions& opt) {
    if (!(a >= 0.0) || !(b <= mp.L) || !(a < b))
        throw std::domain_error("first_eigen_interval: need 0 <= a < b <= L");
    if (a == 0.0 && b == mp.L)
        throw std::domain_error("first_eigen_interval: the full space has no Dirichlet condition");
    if (opt.grid_n < 100) throw std::domain_error("first_eigen_interval: grid too coarse");

    double s = mp.scale();
    double N = mp.N;
    double ta = a * s, tb = b * s;
    bool left_pole = ta == 0.0, right_pole = tb >= kPi * (1.0 - 1e-15);
    double h0l = left_pole ? seed_offset(tb - ta) : 0.0;
    double h0r = right_pole ? seed_offset(tb - ta) : 0.0;
    double start_l = left_pole ? h0l : ta;
    double start_r = right_pole ? kPi - h0r : tb;
    double m = 0.5 * (ta + tb);
    if (!(start_l < m) || !(start_r > m))
        throw std::domain_error("first_eigen_interval: interval too thin for the solver");
    int steps_l = step_count(opt.grid_n, m - start_l);
    int steps_r = step_count(opt.grid_n, start_r - m);

    auto left_seed = [&](double lam) -> detail::OdeState {
        if (left_pole) return detail::series_seed(N, lam, h0l);
        return {0.0, 1.0};
    };
    auto right_seed = [&](double lam) -> detail::OdeState {
        if (right_pole) {
            auto sr = detail::series_seed(N, lam, h0r);
            return {sr.z, -sr.p};  // mirrored: z(pi - h) with d/dt flipped
        }
        return {0.0, -1.0};
    };

    auto pred = [&](double lam) {
        auto sl = detail::integrate_radial(N, lam, start_l, left_seed(lam), m, steps_l);
        if (sl.interior_flip || sl.end.z <= 0.0) return true;
        auto sr = detail::integrate_radial(N, lam, start_r, right_seed(lam), m, steps_r);
        if (sr.interior_flip || sr.end.z <= 0.0) return true;
        // Derivative matching at the midpoint: first eigenvalue is where the
        // one-sided logarithmic derivatives cross.
        return sl.end.p * sr.end.z - sr.end.p * sl.end.z <= 0.0;
    };

    double guess = (kPi / (tb - ta)) * (kPi / (tb - ta));
    double lam = bisect_eigenvalue(bracket_eigenvalue(guess, pred, opt.max_expansions), pred,
                                   opt.rel_tol);

    std::vector<double> nodes_l, vals_l, nodes_r, vals_r;
    nodes_l.push_back(left_pole ? 0.0 : ta);
    vals_l.push_back(left_pole ? 1.0 : 0.0);
    if (left_pole) {
        nodes_l.push_back(h0l);
        vals_l.push_back(left_seed(lam).z);
    }
    auto sl = detail::integrate_radial(N, lam, start_l, left_seed(lam), m, steps_l, &nodes_l,
                                       &vals_l);
    nodes_r.push_back(right_pole ? kPi : tb);
    vals_r.push_back(right_pole ? 1.0 : 0.0);
    if (right_pole) {
        nodes_r.push_back(kPi - h0r);
        vals_r.push_back(right_seed(lam).z);
    }
    auto sr = detail::integrate_radial(N, lam, start_r, right_seed(lam), m, steps_r, &nodes_r,
                                       &vals_r);
    if (!(sl.end.z > 0.0) || !(sr.end.z > 0.0))
        throw SolverError("first_eigen_interval: midpoint value vanished at the accepted mode");

    // Glue the two half-solutions continuously at the midpoint.
    double match = sl.end.z / sr.end.z;
    std::vector<double> nodes(nodes_l), values(vals_l);
    for (std::size_t i = nodes_r.size(); i-- > 0;) {
        if (nodes_r[i] <= m) continue;  // midpoint itself comes from the left path
        nodes.push_back(nodes_r[i]);
        values.push_back(vals_r[i] * match);
    }
    return assemble_pair(mp, lam, std::move(nodes), std::move(values), Interval{a, b},
                         /*dirichlet_left=*/!left_pole, /*dirichlet_right=*/!right_pole);
}

AlphaSolution find_alpha(const ModelParams& mp, double lambda, double v_upper, double tol,
                         const SolveOptions& opt) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::domain_error("find_alpha: eigenvalue must be positive and finite");
    if (!(v_upper > 0.0) || !(v_upper < 1.0))
        throw std::domain_error("find_alpha: upper mass must lie in (0, 1)");
    if (!(tol > 0.0)) throw std::domain_error("find_alpha: tolerance must be positive");

    ModelParams canon = make_canonical_model(mp.N);
    double s = mp.scale();
    double lam = lambda / (s * s);
    double r_up = quantile(canon, v_upper);
    double h0 = seed_offset(r_up);
    int steps = step_count(opt.grid_n, r_up - h0);

    auto seed = detail::series_seed(mp.N, lam, h0);
    auto shot = detail::integrate_radial(mp.N, lam, h0, seed, r_up, steps);

    AlphaSolution sol;
    sol.lambda = lambda;
    if (shot.interior_flip) {
        double tz = refine_zero(mp.N, lam, shot.flip_lo, shot.flip_state, shot.flip_hi);
        sol.alpha = std::min(cumulative(canon, tz), v_upper);
        sol.residual = std::abs(first_eigen_cap(mp, sol.alpha, opt).lambda - lambda);
    } else if (shot.end.z <= 0.0) {
        sol.alpha = v_upper;
        sol.residual = std::abs(first_eigen_cap(mp, v_upper, opt).lambda - lambda);
    } else {
        // No zero up to r(v_upper): feasible only if lambda sits within
        // tolerance of the boundary eigenvalue.
        double lam_up = first_eigen_cap(mp, v_upper, opt).lambda;
        if (lambda >= lam_up * (1.0 - 10.0 * tol)) {
            sol.alpha = v_upper;
            sol.residual = std::abs(lam_up - lambda);
        } else {
            throw InfeasibleError("find_alpha: eigenvalue below the cap value at v_upper");
        }
    }
    if (sol.residual > tol * lambda)
        throw SolverError("find_alpha: verification solve disagrees with the requested value");
    return sol;
}

EigenPair oracle_fd_eigen(const ModelParams& mp, const Domain& dom, int n) {
    if (n < 50) throw std::domain_error("oracle_fd_eigen: need at least 50 cells");

    double t_lo = 0.0, t_hi = 0.0;
    bool natural_left = false, natural_right = false;
    Domain out_dom = dom;
    if (const Cap* cap = std::get_if<Cap>(&dom)) {
        if (!(cap->v > 0.0) || !(cap->v < 1.0))
            throw std::domain_error("oracle_fd_eigen: cap mass outside (0, 1)");
        t_lo = 0.0;
        t_hi = quantile(mp, cap->v);
        natural_left = true;
    } else {
        const Interval& iv = std::get<Interval>(dom);
        if (!(iv.a >= 0.0) || !(iv.b <= mp.L) || !(iv.a < iv.b))
            throw std::domain_error("oracle_fd_eigen: need 0 <= a < b <= L");
        t_lo = iv.a;
        t_hi = iv.b;
        natural_left = iv.a == 0.0;
        natural_right = iv.b == mp.L;
        if (natural_left && natural_right)
            throw std::domain_error("oracle_fd_eigen: the full space has no Dirichlet condition");
    }

    double h = (t_hi - t_lo) / n;
    std::vector<double> wm(n);  // weight at cell midpoints
    for (int i = 0; i < n; ++i) wm[i] = density(mp, t_lo + (i + 0.5) * h);

    // Unknowns: nodes 1..n-1, plus a boundary node wherever the weight
    // vanishes (no flux through a weight zero, so the condition is natural).
    int first = natural_left ? 0 : 1;
    int last = natural_right ? n : n - 1;
    int m = last - first + 1;
    std::vector<double> diag_a(m), diag_b(m), off(m - 1);
    for (int k = 0; k < m; ++k) {
        int i = first + k;
        double wl = i > 0 ? wm[i - 1] : 0.0;
        double wr = i < n ? wm[i] : 0.0;
        diag_a[k] = (wl + wr) / h;
        diag_b[k] = 0.5 * h * (wl + wr);
        if (k + 1 < m) off[k] = -wr / h;
    }

    auto negative_pivots = [&](double x) {
        int count = 0;
        double d = 0.0;
        for (int k = 0; k < m; ++k) {
            double mk = diag_a[k] - x * diag_b[k];
            if (k > 0) mk -= off[k - 1] * off[k - 1] / d;
            if (mk == 0.0) mk = -1e-300;
            if (mk < 0.0) ++count;
            d = mk;
        }
        return count;
    };

    double hi = 0.0;
    for (int k = 0; k < m; ++k) {
        double row = diag_a[k] + (k > 0 ? std::abs(off[k - 1]) : 0.0) +
                     (k + 1 < m ? std::abs(off[k]) : 0.0);
        hi = std::max(hi, row / diag_b[k]);
    }
    int guard = 0;
    while (negative_pivots(hi) < 1) {
        hi *= 2.0;
        if (++guard > 60) throw SolverError("oracle_fd_eigen: spectrum bound failed");
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (negative_pivots(mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    double lam = 0.5 * (lo + hi);

    // Inverse iteration at a shift just inside the bracket. The near-singular
    // solve is the mechanism, not a defect; pivots are guarded the same way.
    double shift = lam * (1.0 + 1e-9) + 1e-30;
    std::vector<double> x(m, 1.0), dd(m), ee(m > 1 ? m - 1 : 0), rhs(m);
    for (int iter = 0; iter < 4; ++iter) {
        for (int k = 0; k < m; ++k) rhs[k] = diag_b[k] * x[k];
        for (int k = 0; k < m; ++k) dd[k] = diag_a[k] - shift * diag_b[k];
        for (int k = 0; k + 1 < m; ++k) ee[k] = off[k];
        for (int k = 1; k < m; ++k) {
            if (dd[k - 1] == 0.0) dd[k - 1] = 1e-300;
            double f = ee[k - 1] / dd[k - 1];
            dd[k] -= f * ee[k - 1];
            rhs[k] -= f * rhs[k - 1];
        }
        if (dd[m - 1] == 0.0) dd[m - 1] = 1e-300;
        x[m - 1] = rhs[m - 1] / dd[m - 1];
        for (int k = m - 2; k >= 0; --k) x[k] = (rhs[k] - ee[k] * x[k + 1]) / dd[k];
        double mx = 0.0;
        for (double xv : x) mx = std::max(mx, std::abs(xv));
        if (mx == 0.0) throw SolverError("oracle_fd_eigen: inverse iteration collapsed");
        for (double& xv : x) xv /= mx;
    }
    double mx = 0.0;
    for (double xv : x) mx = std::max(mx, std::abs(xv));
    double sign = 0.0;
    for (double xv : x)
        if (std::abs(xv) == mx) sign = xv > 0.0 ? 1.0 : -1.0;

    EigenPair ep;
    ep.lambda = lam;
    ep.domain = out_dom;
    ep.grid.nodes.resize(n + 1);
    ep.grid.weights.resize(n + 1);
    ep.values.assign(n + 1, 0.0);
    for (int i = 0; i <= n; ++i) {
        double t = i == n ? t_hi : t_lo + i * h;
        ep.grid.nodes[i] = t;
        ep.grid.weights[i] = density(mp, t);
    }
    for (int k = 0; k < m; ++k) ep.values[first + k] = sign * x[k] / mx;
    check_positivity(ep.values);
    for (double& v : ep.values)
        if (v < 0.0) v = 0.0;
    return ep;
}

}  // namespace rholder
