#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "rholder/model_space.hpp"

using namespace rholder;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("model construction validates parameters") {
    CHECK_THROWS_AS(make_model(0.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(make_model(-1.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(make_model(1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(make_model(1.0, 0.5), std::domain_error);

    ModelParams mp = make_canonical_model(2.0);
    CHECK(mp.K == doctest::Approx(1.0));
    CHECK(mp.L == doctest::Approx(kPi));
    CHECK(mp.is_canonical());
    // N = 2: weight sin(t)/c integrates to c = 2.
    CHECK(mp.c == doctest::Approx(2.0).epsilon(1e-14));
    // N = 3: c = pi/2.
    CHECK(make_canonical_model(3.0).c == doctest::Approx(kPi / 2).epsilon(1e-14));
}

TEST_CASE("density closed forms and exact symmetry") {
    ModelParams m2 = make_canonical_model(2.0);
    CHECK(density(m2, 1.0) == doctest::Approx(std::sin(1.0) / 2).epsilon(1e-14));
    CHECK(density(m2, 0.0) == 0.0);
    CHECK(density(m2, m2.L) == 0.0);
    CHECK_THROWS_AS(density(m2, -0.1), std::domain_error);
    CHECK_THROWS_AS(density(m2, m2.L + 0.1), std::domain_error);

    // The weight is folded about the midpoint. For t in the upper half the
    // subtraction L - t is exact, so the symmetry there is bitwise; below
    // the midpoint L - t itself rounds, and the residual stays within a few
    // ulps amplified by the weight's logarithmic derivative.
    ModelParams m65 = make_canonical_model(6.5);
    for (double t : {1.6, 1.9, 2.2, 2.7, 3.0}) {
        CHECK(density(m65, t) == density(m65, m65.L - t));
    }
    for (double t : {0.1, 0.4, 1.0, 1.5}) {
        CHECK(density(m65, t) == doctest::Approx(density(m65, m65.L - t)).epsilon(1e-12));
    }
}

TEST_CASE("cumulative closed forms") {
    ModelParams m2 = make_canonical_model(2.0);
    ModelParams m3 = make_canonical_model(3.0);
    for (double t : {0.2, 0.7, 1.3, 2.0, 2.9}) {
        CHECK(cumulative(m2, t) ==
              doctest::Approx(0.5 * (1.0 - std::cos(t))).epsilon(1e-12));
        CHECK(cumulative(m3, t) ==
              doctest::Approx((t - std::sin(t) * std::cos(t)) / kPi).epsilon(1e-12));
    }
    CHECK(cumulative(m2, 0.0) == 0.0);
    CHECK(cumulative(m2, m2.L) == doctest::Approx(1.0).epsilon(1e-14));
    // Complement identity holds to full precision through the folding.
    for (double t : {0.3, 1.1, 1.9}) {
        CHECK(cumulative(m3, m3.L - t) ==
              doctest::Approx(1.0 - cumulative(m3, t)).epsilon(1e-14));
    }
}

TEST_CASE("quantile inverts cumulative; frozen reference values") {
    ModelParams m3 = make_canonical_model(3.0);
    // Independent reference (30-digit quadrature + brentq).
    CHECK(quantile(m3, 0.1) == doctest::Approx(0.8133766726165724).epsilon(1e-12));

    // Physical coordinates at K = 1, N = 3: canonical radius times sqrt(2).
    ModelParams phys = make_model(1.0, 3.0);
    CHECK(phys.L == doctest::Approx(kPi * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(quantile(phys, 0.1) == doctest::Approx(1.1502883217322577).epsilon(1e-12));

    std::mt19937 rng(20240816);
    std::uniform_real_distribution<double> uv(1e-4, 1.0 - 1e-4);
    for (int i = 0; i < 40; ++i) {
        double v = uv(rng);
        double x = quantile(m3, v);
        CHECK(cumulative(m3, x) == doctest::Approx(v).epsilon(1e-11));
    }
    CHECK(quantile(m3, 0.0) == 0.0);
    CHECK(quantile(m3, 1.0) == m3.L);
    CHECK_THROWS_AS(quantile(m3, -0.1), std::domain_error);
    CHECK_THROWS_AS(quantile(m3, 1.1), std::domain_error);
}

TEST_CASE("isoperimetric profile is the density at the quantile") {
    ModelParams m2 = make_canonical_model(2.0);
    // N = 2: I(v) = sin(acos(1-2v))/2 = sqrt(v(1-v)).
    for (double v : {0.1, 0.25, 0.5, 0.8}) {
        CHECK(isoperimetric_profile(m2, v) ==
              doctest::Approx(std::sqrt(v * (1.0 - v))).epsilon(1e-11));
    }
    ModelParams m4 = make_canonical_model(4.0);
    for (double v : {0.2, 0.35}) {
        CHECK(isoperimetric_profile(m4, v) ==
              doctest::Approx(isoperimetric_profile(m4, 1.0 - v)).epsilon(1e-10));
    }
    CHECK(isoperimetric_profile(m4, 0.0) == 0.0);
    CHECK(isoperimetric_profile(m4, 1.0) == 0.0);
}

TEST_CASE("uniform grid carries consistent weights") {
    ModelParams mp = make_canonical_model(2.5);
    RadialGrid g = make_uniform_grid(mp, 0.3, 2.1, 64);
    REQUIRE(g.nodes.size() == 65);
    REQUIRE(g.weights.size() == 65);
    CHECK(g.nodes.front() == doctest::Approx(0.3));
    CHECK(g.nodes.back() == doctest::Approx(2.1));
    CHECK_NOTHROW(validate_grid(mp, g));

    RadialGrid bad = g;
    bad.weights[10] *= 1.5;
    CHECK_THROWS_AS(validate_grid(mp, bad), std::domain_error);
    bad = g;
    std::swap(bad.nodes[3], bad.nodes[4]);
    CHECK_THROWS_AS(validate_grid(mp, bad), std::domain_error);
}

TEST_CASE("cumulative table matches the adaptive-quadrature entry points") {
    for (double N : {2.0, 3.0, 6.0, 1.4}) {
        ModelParams mp = make_canonical_model(N);
        CumulativeTable table(mp);
        std::mt19937 rng(7 + static_cast<int>(10 * N));
        std::uniform_real_distribution<double> ut(0.0, mp.L);
        for (int i = 0; i < 30; ++i) {
            double t = ut(rng);
            CHECK(table.mass_of(t) == doctest::Approx(cumulative(mp, t)).epsilon(1e-10));
        }
        std::uniform_real_distribution<double> us(0.01, 0.99);
        for (int i = 0; i < 30; ++i) {
            double s = us(rng);
            CHECK(table.iso_of_mass(s) ==
                  doctest::Approx(isoperimetric_profile(mp, s)).epsilon(1e-7));
        }
        // Endpoint masses: tiny caps have tiny boundary, with the local
        // series keeping the relative error usable.
        CHECK(table.iso_of_mass(1e-6) ==
              doctest::Approx(isoperimetric_profile(mp, 1e-6)).epsilon(1e-5));
        CHECK(table.mass_of(0.0) == 0.0);
        CHECK(table.mass_of(mp.L) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("cumulative table in physical coordinates") {
    ModelParams mp = make_model(1.0, 3.0);  // L = pi*sqrt(2)
    CumulativeTable table(mp);
    for (double t : {0.4, 1.2, 2.8, 4.0}) {
        CHECK(table.mass_of(t) == doctest::Approx(cumulative(mp, t)).epsilon(1e-10));
    }
}
