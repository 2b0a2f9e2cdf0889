#include "rholder/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rholder {

double WeightedSamples::total_mass() const {
    return std::accumulate(masses.begin(), masses.end(), 0.0);
}

double StepProfile::value_at(double s) const {
    if (s <= 0.0) return levels.front();
    if (s > breakpoints.back()) return 0.0;
    // First breakpoint >= s bounds the piece containing s from the right.
    auto it = std::lower_bound(breakpoints.begin() + 1, breakpoints.end(), s);
    return levels[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

void validate_profile(const StepProfile& prof) {
    if (prof.levels.empty() || prof.breakpoints.size() != prof.levels.size() + 1)
        throw std::domain_error("profile: breakpoints must be levels plus one");
    if (prof.breakpoints.front() != 0.0)
        throw std::domain_error("profile: breakpoints must start at 0");
    for (std::size_t i = 1; i < prof.breakpoints.size(); ++i)
        if (!(prof.breakpoints[i] > prof.breakpoints[i - 1]))
            throw std::domain_error("profile: breakpoints must strictly increase");
    for (std::size_t i = 0; i < prof.levels.size(); ++i) {
        if (!(prof.levels[i] >= 0.0))
            throw std::domain_error("profile: levels must be nonnegative");
        if (i > 0 && !(prof.levels[i] < prof.levels[i - 1]))
            throw std::domain_error("profile: levels must strictly decrease");
    }
}

namespace {

void check_samples(const WeightedSamples& u) {
    if (u.values.empty() || u.values.size() != u.masses.size())
        throw std::domain_error("samples: need matching nonempty values and masses");
    for (double m : u.masses)
        if (!(m > 0.0)) throw std::domain_error("samples: masses must be positive");
    for (double v : u.values)
        if (!(v >= 0.0)) throw std::domain_error("samples: values must be nonnegative");
}

// Indices of u.values in descending value order. Shared by the distribution
// function and the rearrangement so both accumulate masses in the same
// floating-point order, making equimeasurability exact rather than
// round-off-equal.
std::vector<std::size_t> descending_order(const WeightedSamples& u) {
    std::vector<std::size_t> idx(u.values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return u.values[a] > u.values[b]; });
    return idx;
}

}  // namespace

double distribution_function(const WeightedSamples& u, double t) {
    if (!(t >= 0.0)) throw std::domain_error("distribution_function: level must be >= 0");
    check_samples(u);
    double acc = 0.0;
    for (std::size_t i : descending_order(u)) {
        if (!(u.values[i] > t)) break;
        acc += u.masses[i];
    }
    return acc;
}

double distribution_function(const StepProfile& prof, double t) {
    if (!(t >= 0.0)) throw std::domain_error("distribution_function: level must be >= 0");
    for (std::size_t i = prof.levels.size(); i-- > 0;)
        if (prof.levels[i] > t) return prof.breakpoints[i + 1];
    return 0.0;
}

StepProfile decreasing_rearrangement(const WeightedSamples& u) {
    check_samples(u);
    StepProfile prof;
    prof.breakpoints.push_back(0.0);
    double acc = 0.0;
    for (std::size_t i : descending_order(u)) {
        acc += u.masses[i];
        if (!prof.levels.empty() && prof.levels.back() == u.values[i]) {
            prof.breakpoints.back() = acc;  // tie: widen the current piece
        } else {
            prof.levels.push_back(u.values[i]);
            prof.breakpoints.push_back(acc);
        }
    }
    validate_profile(prof);
    return prof;
}

StepProfile decreasing_rearrangement(const StepProfile& prof) {
    validate_profile(prof);
    return prof;
}

double Symmetrized::operator()(double x) const {
    if (!(x >= 0.0)) throw std::domain_error("symmetrization: negative radius");
    if (x > radius) return 0.0;
    return sharp.value_at(cumulative(params, x));
}

Symmetrized schwartz_symmetrization(const WeightedSamples& u, const ModelParams& mp) {
    double v = u.total_mass();
    if (!(v > 0.0) || v > 1.0 + 1e-12)
        throw std::domain_error("symmetrization: total mass must lie in (0, 1]");
    Symmetrized sym{decreasing_rearrangement(u), mp, quantile(mp, std::min(v, 1.0))};
    return sym;
}

StepProfile merge_equal_levels(const StepProfile& prof) {
    StepProfile out;
    out.breakpoints.push_back(prof.breakpoints.front());
    for (std::size_t i = 0; i < prof.levels.size(); ++i) {
        if (!out.levels.empty() && prof.levels[i] == out.levels.back()) {
            out.breakpoints.back() = prof.breakpoints[i + 1];
        } else {
            out.levels.push_back(prof.levels[i]);
            out.breakpoints.push_back(prof.breakpoints[i + 1]);
        }
    }
    return out;
}

double lp_norm(const StepProfile& prof, double p) {
    validate_profile(prof);
    if (std::isinf(p)) return prof.levels.front();
    if (!(p > 0.0)) throw std::domain_error("lp_norm: exponent must be positive");
    double acc = 0.0;
    for (std::size_t i = 0; i < prof.levels.size(); ++i)
        acc += std::pow(prof.levels[i], p) * (prof.breakpoints[i + 1] - prof.breakpoints[i]);
    return std::pow(acc, 1.0 / p);
}

double lp_norm(const WeightedSamples& u, double p) {
    check_samples(u);
    if (std::isinf(p)) return *std::max_element(u.values.begin(), u.values.end());
    if (!(p > 0.0)) throw std::domain_error("lp_norm: exponent must be positive");
    double acc = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i)
        acc += std::pow(u.values[i], p) * u.masses[i];
    return std::pow(acc, 1.0 / p);
}

WeightedSamples weighted_cell_samples(const EigenPair& ep, const ModelParams& mp) {
    const auto& nodes = ep.grid.nodes;
    const auto& w = ep.grid.weights;
    if (nodes.size() < 2) throw std::domain_error("cell_samples: need at least one cell");
    WeightedSamples out;
    out.values.reserve(nodes.size() - 1);
    out.masses.reserve(nodes.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        double h = nodes[i + 1] - nodes[i];
        if (!(h > 0.0)) continue;
        double wm = density(mp, 0.5 * (nodes[i] + nodes[i + 1]));
        double mass = h / 6.0 * (w[i] + 4.0 * wm + w[i + 1]);
        if (!(mass > 0.0)) continue;  // cells collapsed onto a weight zero
        out.values.push_back(0.5 * (ep.values[i] + ep.values[i + 1]));
        out.masses.push_back(mass);
    }
    return out;
}

}  // namespace rholder
