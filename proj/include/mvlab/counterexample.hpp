#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvlab/core.hpp"
#include "mvlab/measure.hpp"

namespace mvlab {

/// The co-dimension-2 demonstration lives in R^3, where the annulus line
/// potentials have complete asinh/log closed forms and the headline numbers
/// are exact rather than quadrature approximations. The series over annulus
/// indices i = 2..N is truncated at N with tail 2^(1-N) at the origin.
struct CounterexampleConfig {
    int N = 1000;        // series truncation, terms i = 2..N
    double clamp = -2.0; // active on the line, inactive at the origin

    void validate() const {
        if (N < 2) throw std::invalid_argument("CounterexampleConfig: N must be >= 2");
        if (!(clamp < -1.0)) throw std::invalid_argument("CounterexampleConfig: clamp must be < -1");
    }

    double origin_tail_bound() const { return std::pow(2.0, 1.0 - N); }
};

namespace detail {

// int_a^b dt / sqrt((s-t)^2 + rho^2), the potential of one line interval.
// rho = 0 on the axis: logarithmic form, +infinity when s lies in [a, b].
inline double interval_inverse_distance_integral(double a, double b, double s, double rho) {
    if (rho > 0.0) return std::asinh((b - s) / rho) - std::asinh((a - s) / rho);
    if (s >= a && s <= b) return pos_infinity();
    if (s < a) return std::log((b - s) / (a - s));
    return std::log((s - a) / (s - b));
}

}  // namespace detail

/// Potential of the i-th annulus line measure: 1-dimensional Lebesgue
/// measure on ([-i, -1/i] union [1/i, i]) x {0} x {0}, integrated against
/// -1/|x - w|. Nonpositive everywhere, -infinity exactly on the support.
inline double annulus_potential(int i, const Point& x) {
    if (i < 2) throw std::invalid_argument("annulus_potential: index must be >= 2");
    if (x.size() != 3) throw std::invalid_argument("annulus_potential: point must be in R^3");
    const double s = x[0];
    const double rho = std::hypot(x[1], x[2]);
    const double inv = 1.0 / static_cast<double>(i);
    const double left = detail::interval_inverse_distance_integral(-static_cast<double>(i), -inv, s, rho);
    const double right = detail::interval_inverse_distance_integral(inv, static_cast<double>(i), s, rho);
    if (is_pos_infinity(left) || is_pos_infinity(right)) return neg_infinity();
    return -(left + right);
}

/// The i-th normalized potential: -annulus_potential(i, x) / annulus_potential(i, 0).
/// Dividing by the same computed closed form makes the normalization exact:
/// the value at the origin is -1 to the last bit. Nonpositive everywhere,
/// -infinity on the annulus support.
inline double annulus_potential_normalized(int i, const Point& x) {
    const double p = annulus_potential(i, x);
    if (is_neg_infinity(p)) return neg_infinity();
    const double p0 = annulus_potential(i, {0.0, 0.0, 0.0});
    return -p / p0;
}

/// Truncated weighted series  sum_{i=2}^{N} 2^(1-i) * normalized potential.
/// -infinity on the axis exactly where 1/N <= |s| <= N (some annulus covers
/// s); at the origin the value is -(1 - 2^(1-N)).
inline double potential_series(const CounterexampleConfig& cfg, const Point& x) {
    cfg.validate();
    if (x.size() != 3) throw std::invalid_argument("potential_series: point must be in R^3");
    // Axis fast path: s is covered by annulus i iff 1/i <= |s| <= i for some
    // i in [2, N], which collapses to 1/N <= |s| <= N.
    if (x[1] == 0.0 && x[2] == 0.0) {
        const double s = std::abs(x[0]);
        if (s >= 1.0 / cfg.N && s <= static_cast<double>(cfg.N)) return neg_infinity();
    }
    double sum = 0.0, coeff = 0.5;
    for (int i = 2; i <= cfg.N; ++i, coeff *= 0.5) {
        const double ui = annulus_potential_normalized(i, x);
        if (is_neg_infinity(ui)) return neg_infinity();
        sum += coeff * ui;
    }
    return sum;
}

/// max(series, clamp): finite everywhere, equal to the clamp on the covered
/// part of the axis and close to -1 at the origin.
inline double clamped_series(const CounterexampleConfig& cfg, const Point& x) {
    return std::max(potential_series(cfg, x), cfg.clamp);
}

/// Uniform line measure on [-eps, eps] x {0} x {0} with `resolution` midpoint
/// atoms (an even resolution leaves no atom at the origin) and total mass
/// 2 eps.
inline DiscreteMeasure counterexample_line_measure(double eps, int resolution) {
    if (!(eps > 0.0)) throw std::invalid_argument("counterexample_line_measure: eps must be > 0");
    if (resolution < 2) throw std::invalid_argument("counterexample_line_measure: resolution must be >= 2");
    const double step = 2.0 * eps / resolution;
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(resolution));
    for (int j = 0; j < resolution; ++j)
        atoms.push_back({{-eps + (j + 0.5) * step, 0.0, 0.0}, step});
    return DiscreteMeasure(Dimension(3), std::move(atoms),
                           "line-segment(eps=" + std::to_string(eps) + ")",
                           DiscreteMeasure::kResolutionSafetyFactor * step);
}

/// Outcome of the gap demonstration: the line average of the clamped series
/// sits at the clamp (up to the explicit slack from the uncovered hole
/// around the origin) while the value at the origin stays near -1, so no
/// shrinking-ball average over the line can reproduce the value at 0.
struct CounterexampleReport {
    int N = 0;
    double eps = 0.0;
    int resolution = 0;
    double clamp = 0.0;
    double line_mean = 0.0;
    double value_at_0 = 0.0;
    double gap = 0.0;               // value_at_0 - line_mean
    double unclamped_fraction = 0.0;  // mass fraction of atoms with |s| < 1/N
    double delta = 0.0;               // |clamp| * unclamped_fraction, the mean's slack
    double origin_tail_bound = 0.0;   // 2^(1-N), truncation error at the origin
    bool pass = false;
};

inline CounterexampleReport counterexample_demo(const CounterexampleConfig& cfg, double eps, int resolution) {
    cfg.validate();
    if (!(eps > 1.0 / cfg.N))
        throw std::invalid_argument("counterexample_demo: eps must exceed 1/N = " +
                                    std::to_string(1.0 / cfg.N) +
                                    " so the clamp region dominates the line segment");
    if (!(eps < static_cast<double>(cfg.N)))
        throw std::invalid_argument("counterexample_demo: eps must stay below N");
    const DiscreteMeasure line = counterexample_line_measure(eps, resolution);

    CounterexampleReport rep;
    rep.N = cfg.N;
    rep.eps = eps;
    rep.resolution = resolution;
    rep.clamp = cfg.clamp;
    rep.origin_tail_bound = cfg.origin_tail_bound();

    double sum = 0.0;
    std::size_t unclamped = 0;
    for (const Atom& a : line.atoms()) {
        const double v = clamped_series(cfg, a.p);
        sum += v;
        if (std::abs(a.p[0]) < 1.0 / cfg.N) ++unclamped;
    }
    rep.line_mean = sum / static_cast<double>(resolution);
    rep.value_at_0 = clamped_series(cfg, {0.0, 0.0, 0.0});
    rep.gap = rep.value_at_0 - rep.line_mean;
    rep.unclamped_fraction = static_cast<double>(unclamped) / static_cast<double>(resolution);
    rep.delta = std::abs(cfg.clamp) * rep.unclamped_fraction;
    rep.pass = rep.line_mean <= cfg.clamp + rep.delta && rep.gap > 0.0;
    return rep;
}

}  // namespace mvlab
