#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "mvlab/counterexample.hpp"
#include "mvlab/potential.hpp"

using namespace mvlab;
using Catch::Approx;

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50);
}

// Quadrature route to the annulus potential, independent of the asinh/log
// closed forms.
double annulus_potential_by_quadrature(int i, const Point& x) {
    const double s = x[0];
    const double rho2 = x[1] * x[1] + x[2] * x[2];
    const auto integrand = [&](double t) { return -1.0 / std::sqrt((s - t) * (s - t) + rho2); };
    const double inv = 1.0 / i;
    return adaptive_simpson(integrand, -static_cast<double>(i), -inv, 1e-13) +
           adaptive_simpson(integrand, inv, static_cast<double>(i), 1e-13);
}

}  // namespace

TEST_CASE("annulus potential closed forms") {
    CHECK(annulus_potential(2, {0.0, 0.0, 0.0}) == Approx(-4.0 * std::log(2.0)).epsilon(1e-13));
    CHECK(is_neg_infinity(annulus_potential(2, {1.0, 0.0, 0.0})));
    CHECK(is_neg_infinity(annulus_potential(2, {-1.7, 0.0, 0.0})));
    CHECK(is_neg_infinity(annulus_potential(2, {0.5, 0.0, 0.0})));  // endpoint of the support

    const double off = annulus_potential(2, {0.0, 1.0, 0.0});
    CHECK(off < 0.0);
    CHECK(std::isfinite(off));
    CHECK(off == Approx(annulus_potential_by_quadrature(2, {0.0, 1.0, 0.0})).epsilon(1e-10));

    CHECK_THROWS_AS(annulus_potential(1, {0.0, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(annulus_potential(2, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("closed form matches quadrature at frozen off-axis points") {
    const std::vector<Point> frozen = {
        {0.0, 1.0, 0.0},  {0.3, 0.2, 0.1},   {-0.7, 0.05, 0.0}, {1.4, 0.6, -0.3}, {2.5, 1.5, 2.0},
        {0.0, 0.01, 0.0}, {-3.0, 0.4, 0.25}, {0.9, 0.0, 0.35},  {5.0, 2.0, 1.0},  {-1.2, 0.8, -0.6}};
    for (int i : {2, 3, 7}) {
        for (const Point& x : frozen) {
            const double closed = annulus_potential(i, x);
            const double oracle = annulus_potential_by_quadrature(i, x);
            CHECK(closed == Approx(oracle).epsilon(1e-10));
        }
    }
}

TEST_CASE("normalized potentials") {
    for (int i : {2, 5, 40}) {
        CHECK(annulus_potential_normalized(i, {0.0, 0.0, 0.0}) == -1.0);  // exact by construction
        CHECK(annulus_potential_normalized(i, {0.2, 0.7, -0.1}) <= 0.0);
    }
    CHECK(is_neg_infinity(annulus_potential_normalized(2, {1.0, 0.0, 0.0})));
    const double v = annulus_potential_normalized(2, {0.0, 1.0, 0.0});
    CHECK(v > neg_infinity());
    CHECK(v < 0.0);
}

TEST_CASE("truncated series and clamp") {
    CounterexampleConfig ten;
    ten.N = 10;
    CHECK(potential_series(ten, {0.0, 0.0, 0.0}) == -(1.0 - std::pow(2.0, -9)));
    CHECK(is_neg_infinity(potential_series(ten, {0.5, 0.0, 0.0})));
    CHECK(clamped_series(ten, {0.5, 0.0, 0.0}) == -2.0);
    // Off the covered range of the axis the series stays finite.
    CHECK(std::isfinite(potential_series(ten, {0.05, 0.0, 0.0})));
    CHECK(std::isfinite(potential_series(ten, {11.0, 0.0, 0.0})));

    CounterexampleConfig big;
    big.N = 1000;
    CHECK(clamped_series(big, {0.0, 0.0, 0.0}) == Approx(-1.0).margin(1e-12));

    // Sign at scattered points.
    for (const Point& x : std::vector<Point>{{0.1, 0.4, 0.0}, {-2.0, 0.0, 1.0}, {0.0, 0.0, 3.0}}) {
        CHECK(potential_series(ten, x) <= 0.0);
        CHECK(clamped_series(ten, x) >= -2.0);
        CHECK(clamped_series(ten, x) <= 0.0);
    }

    CounterexampleConfig bad;
    bad.N = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.N = 10;
    bad.clamp = -0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("gap demonstration") {
    CounterexampleConfig cfg;
    cfg.N = 400;
    const auto rep = counterexample_demo(cfg, 0.1, 20000);
    CHECK(rep.pass);
    CHECK(rep.line_mean <= rep.clamp + rep.delta);
    CHECK(rep.value_at_0 == Approx(-(1.0 - std::pow(2.0, 1.0 - 400))).margin(1e-12));
    CHECK(rep.gap > 0.9);
    CHECK(rep.unclamped_fraction == Approx(1.0 / (cfg.N * 0.1)).epsilon(0.05));

    // The tiny truncation: the mean sits near the clamp, the origin near the
    // single-term value; the gap is smaller but still positive.
    CounterexampleConfig tiny;
    tiny.N = 2;
    const auto rep2 = counterexample_demo(tiny, 0.6, 20000);
    CHECK(rep2.pass);
    CHECK(rep2.value_at_0 == Approx(-0.5).margin(1e-12));
    CHECK(rep2.gap > 0.0);
    CHECK(rep2.gap < rep.gap);

    CHECK_THROWS_AS(counterexample_demo(cfg, 1.0 / 400, 100), std::invalid_argument);
}

TEST_CASE("line mean is non-increasing in the truncation depth") {
    double prev = 1.0;
    for (int N : {5, 10, 50, 200}) {
        CounterexampleConfig cfg;
        cfg.N = N;
        const auto rep = counterexample_demo(cfg, 0.3, 8000);
        CHECK(rep.line_mean <= prev + 1e-15);
        prev = rep.line_mean;
    }
}

TEST_CASE("clamped series keeps the sphere sub-mean property off the line") {
    CounterexampleConfig cfg;
    cfg.N = 50;
    const auto f = [&](const Point& p) { return clamped_series(cfg, p); };
    struct Probe {
        Point center;
        double radius;
    };
    // Away from the clamp tube the series is a potential of an axis measure,
    // hence harmonic: the sphere mean reproduces the center value up to
    // quadrature noise.
    for (const Probe& pr : {Probe{{0.5, 1.0, 0.0}, 0.3}, Probe{{-1.0, 0.0, 1.2}, 0.4},
                            Probe{{0.0, 1.2, 0.5}, 0.5}, Probe{{2.0, -0.8, 0.3}, 0.4}}) {
        const double mean = sphere_mean(f, pr.center, pr.radius, 8192);
        CHECK(std::abs(mean - f(pr.center)) < 2e-6);
        CHECK(mean >= f(pr.center) - 2e-6);
    }
    // A ball fully inside the clamp tube: both sides equal the clamp exactly.
    CHECK(sphere_mean(f, {1.0, 0.05, 0.0}, 0.02, 1024) == -2.0);
    CHECK(f({1.0, 0.05, 0.0}) == -2.0);
    // A ball crossing the tube: the clamp lifts the deep values, the
    // inequality turns strict with a margin far above quadrature noise.
    const double mean_cross = sphere_mean(f, {1.0, 0.35, 0.0}, 0.33, 8192);
    CHECK(mean_cross - f({1.0, 0.35, 0.0}) > 5e-3);
}
