#include "rholder/model_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rholder {

namespace {

constexpr double kPi = std::numbers::pi;

// Total canonical mass int_0^pi sin^(N-1), closed form via log-gamma.
double mass_constant_canonical(double N) {
    return std::sqrt(kPi) * std::exp(std::lgamma(0.5 * N) - std::lgamma(0.5 * (N + 1.0)));
}

// int_0^x sin^(N-1)(u) du / c_canonical for x in [0, pi/2]; the caller folds.
double cumulative_canonical_lower(double N, double x) {
    if (x <= 0.0) return 0.0;
    double c = mass_constant_canonical(N);
    // The integrand behaves like u^(N-1) at the origin; adaptive Simpson
    // handles that fine for N > 1 since the integrand stays bounded.
    double val = detail::integrate([N](double u) { return std::pow(std::sin(u), N - 1.0); },
                                   0.0, x, 1e-14);
    return val / c;
}

}  // namespace

double detail::weight_canonical(double N, double x) {
    double y = x <= 0.5 * kPi ? x : kPi - x;
    if (y < 0.0) y = 0.0;
    return std::pow(std::sin(y), N - 1.0);
}

double ModelParams::scale() const { return std::sqrt(K / (N - 1.0)); }

bool ModelParams::is_canonical() const { return K == N - 1.0; }

ModelParams make_model(double K, double N) {
    if (!(K > 0.0) || !std::isfinite(K))
        throw std::domain_error("model: curvature bound K must be positive and finite");
    if (!(N > 1.0) || !std::isfinite(N))
        throw std::domain_error("model: dimension N must exceed 1 and be finite");
    ModelParams mp;
    mp.K = K;
    mp.N = N;
    double s = std::sqrt(K / (N - 1.0));
    mp.L = kPi / s;
    mp.c = mass_constant_canonical(N) / s;
    return mp;
}

ModelParams make_canonical_model(double N) { return make_model(N - 1.0, N); }

double density(const ModelParams& mp, double t) {
    if (!(t >= 0.0) || !(t <= mp.L))
        throw std::domain_error("density: point outside [0, L]");
    double s = mp.scale();
    return detail::weight_canonical(mp.N, t * s) * s / (mass_constant_canonical(mp.N));
}

double cumulative(const ModelParams& mp, double x) {
    if (!(x >= 0.0) || !(x <= mp.L))
        throw std::domain_error("cumulative: point outside [0, L]");
    double xc = x * mp.scale();
    // Fold about the midpoint so V(L - t) == 1 - V(t) exactly.
    if (xc <= 0.5 * kPi) return cumulative_canonical_lower(mp.N, xc);
    return 1.0 - cumulative_canonical_lower(mp.N, kPi - xc);
}

double quantile(const ModelParams& mp, double v) {
    if (!(v >= 0.0) || !(v <= 1.0))
        throw std::domain_error("quantile: mass fraction outside [0, 1]");
    if (v == 0.0) return 0.0;
    if (v == 1.0) return mp.L;
    if (v > 0.5) return mp.L - quantile(mp, 1.0 - v);

    // Bisection on the canonical cumulative; the function is strictly
    // increasing so this is unconditionally safe.
    double lo = 0.0, hi = 0.5 * kPi;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double vm = cumulative_canonical_lower(mp.N, mid);
        if (vm < v)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-16 * kPi) break;
    }
    return 0.5 * (lo + hi) / mp.scale();
}

double isoperimetric_profile(const ModelParams& mp, double v) {
    if (!(v >= 0.0) || !(v <= 1.0))
        throw std::domain_error("isoperimetric_profile: mass fraction outside [0, 1]");
    if (v == 0.0 || v == 1.0) return 0.0;
    return density(mp, quantile(mp, v));
}

void validate_grid(const ModelParams& mp, const RadialGrid& grid) {
    if (grid.nodes.size() != grid.weights.size())
        throw std::domain_error("grid: node/weight size mismatch");
    if (grid.nodes.size() < 2) throw std::domain_error("grid: need at least two nodes");
    const double slack = 1e-12 * mp.L;
    if (grid.nodes.front() < -slack || grid.nodes.back() > mp.L + slack)
        throw std::domain_error("grid: nodes outside [0, L]");
    for (std::size_t i = 1; i < grid.nodes.size(); ++i)
        if (!(grid.nodes[i] > grid.nodes[i - 1]))
            throw std::domain_error("grid: nodes not strictly increasing");
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        double t = std::clamp(grid.nodes[i], 0.0, mp.L);
        double w = density(mp, t);
        if (std::abs(grid.weights[i] - w) > 1e-10 * (1.0 + w))
            throw std::domain_error("grid: stored weight disagrees with density");
    }
}

// Width of the endpoint region handled by the series. The weight's higher
// derivatives blow up like x^(N-5) at the zeros, so per-cell Simpson loses
// eight digits there for N < 2; the series is uniformly accurate out to
// here, and Simpson is back to machine accuracy beyond it.
constexpr double kSeriesEdge = 0.05;

double CumulativeTable::series_mass(double x) const {
    double N = mp_.N;
    double x2 = x * x;
    double a4 = (N - 1.0) * ((N - 1.0) / 72.0 - 1.0 / 180.0);
    return std::pow(x, N) / (N * c_) *
           (1.0 - N * (N - 1.0) * x2 / (6.0 * (N + 2.0)) + N * a4 * x2 * x2 / (N + 4.0));
}

double CumulativeTable::cell_increment(double xa, double xb) const {
    if (xb <= kSeriesEdge) return series_mass(xb) - series_mass(xa);
    if (xa >= kPi - kSeriesEdge) return series_mass(kPi - xa) - series_mass(kPi - xb);
    auto wn = [&](double x) { return detail::weight_canonical(mp_.N, x) / c_; };
    return (xb - xa) / 6.0 * (wn(xa) + 4.0 * wn(0.5 * (xa + xb)) + wn(xb));
}

CumulativeTable::CumulativeTable(const ModelParams& mp, int cells) : mp_(mp) {
    if (cells < 64) throw std::domain_error("cumulative table: too few cells");
    c_ = mass_constant_canonical(mp.N);
    x_.resize(cells + 1);
    mass_.resize(cells + 1);
    double h = kPi / cells;
    x_[0] = 0.0;
    mass_[0] = 0.0;
    for (int k = 1; k <= cells; ++k) {
        x_[k] = k == cells ? kPi : k * h;
        mass_[k] = mass_[k - 1] + cell_increment(x_[k - 1], x_[k]);
    }
    // Normalize the accumulated drift so mass_of(L) is exactly 1.
    total_ = mass_.back();
    for (double& mv : mass_) mv /= total_;
}

double CumulativeTable::mass_of(double t) const {
    if (!(t >= 0.0) || !(t <= mp_.L))
        throw std::domain_error("cumulative table: point outside [0, L]");
    double x = t * mp_.scale();
    if (x >= kPi) return 1.0;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
    return mass_[k] + cell_increment(x_[k], x) / total_;
}

double CumulativeTable::invert(double s) const {
    double N = mp_.N;
    if (s <= mass_[1]) return std::pow(N * c_ * s, 1.0 / N);
    if (s >= mass_[mass_.size() - 2]) return kPi - std::pow(N * c_ * (1.0 - s), 1.0 / N);
    auto it = std::upper_bound(mass_.begin(), mass_.end(), s);
    std::size_t k = static_cast<std::size_t>(it - mass_.begin()) - 1;
    double xa = x_[k], sa = mass_[k];
    // Safeguarded Newton inside the bracketing cell; the secant through the
    // cell endpoints is a good start even where the weight is steep.
    double lo = xa, hi = x_[k + 1];
    double x = lo + (s - sa) / (mass_[k + 1] - sa) * (hi - lo);
    for (int round = 0; round < 4; ++round) {
        double g = sa + cell_increment(xa, x) / total_ - s;
        if (g > 0.0)
            hi = x;
        else
            lo = x;
        double step = g * c_ / detail::weight_canonical(mp_.N, x);
        double xn = x - step;
        x = (xn > lo && xn < hi) ? xn : 0.5 * (lo + hi);
    }
    return std::clamp(x, 0.0, kPi);
}

double CumulativeTable::iso_of_mass(double s) const {
    if (!(s >= 0.0) || !(s <= 1.0))
        throw std::domain_error("cumulative table: mass outside [0, 1]");
    if (s == 0.0 || s == 1.0) return 0.0;
    double x = invert(s);
    return detail::weight_canonical(mp_.N, x) * mp_.scale() / c_;
}

RadialGrid make_uniform_grid(const ModelParams& mp, double a, double b, int n) {
    if (!(a >= 0.0) || !(b <= mp.L) || !(a < b))
        throw std::domain_error("grid: invalid span");
    if (n < 1) throw std::domain_error("grid: need at least one cell");
    RadialGrid g;
    g.nodes.resize(n + 1);
    g.weights.resize(n + 1);
    double h = (b - a) / n;
    for (int i = 0; i <= n; ++i) {
        double t = i == n ? b : a + i * h;
        g.nodes[i] = t;
        g.weights[i] = density(mp, t);
    }
    return g;
}

}  // namespace rholder
