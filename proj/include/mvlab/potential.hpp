#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mvlab/core.hpp"
#include "mvlab/kernel.hpp"
#include "mvlab/measure.hpp"

namespace mvlab {

// ---------------------------------------------------------------------------
// Harmonic parts
// ---------------------------------------------------------------------------

struct HarmonicConstant {
    double value = 0.0;
};

struct HarmonicLinear {
    std::vector<double> coeffs;
};

/// Re or Im of (x + iy)^m; harmonic in the plane only.
struct HarmonicPlanarPower {
    int m = 1;
    enum class Part { re, im } part = Part::re;
};

using HarmonicTerm = std::variant<HarmonicConstant, HarmonicLinear, HarmonicPlanarPower>;

/// A finite sum of harmonic terms. Empty means the zero function.
struct HarmonicSpec {
    std::vector<HarmonicTerm> terms;

    static HarmonicSpec zero() { return {}; }
    static HarmonicSpec constant(double v) { return {{HarmonicConstant{v}}}; }
    static HarmonicSpec linear(std::vector<double> c) { return {{HarmonicLinear{std::move(c)}}}; }
    static HarmonicSpec planar_power(int m, HarmonicPlanarPower::Part part) {
        return {{HarmonicPlanarPower{m, part}}};
    }
};

inline double harmonic_eval(const HarmonicSpec& h, const Point& x) {
    double sum = 0.0;
    for (const HarmonicTerm& term : h.terms) {
        if (const auto* c = std::get_if<HarmonicConstant>(&term)) {
            sum += c->value;
        } else if (const auto* l = std::get_if<HarmonicLinear>(&term)) {
            if (l->coeffs.size() != x.size())
                throw std::invalid_argument("harmonic_eval: linear coefficient count does not match dimension");
            sum += std::inner_product(l->coeffs.begin(), l->coeffs.end(), x.begin(), 0.0);
        } else {
            const auto& pp = std::get<HarmonicPlanarPower>(term);
            if (x.size() != 2) throw std::invalid_argument("harmonic_eval: planar-power requires n = 2");
            if (pp.m < 1) throw std::invalid_argument("harmonic_eval: planar-power exponent must be >= 1");
            double re = 1.0, im = 0.0;
            for (int j = 0; j < pp.m; ++j) {
                const double nre = re * x[0] - im * x[1];
                im = re * x[1] + im * x[0];
                re = nre;
            }
            sum += (pp.part == HarmonicPlanarPower::Part::re) ? re : im;
        }
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Riesz-form subharmonic functions
// ---------------------------------------------------------------------------

struct NuAtom {
    Point p;
    double mass = 0.0;
};

/// A subharmonic function represented by its potential data: an atomic
/// nonnegative measure nu inside the validity ball U = B(0, domain_radius)
/// plus a harmonic part,
///
///   u(x) = -(1/riesz_normalization(n)) * sum_j mass_j * g(|x - w_j|) + phi(x).
///
/// Evaluation at an atom with positive mass is -infinity, a legal value.
class RieszFunction {
public:
    RieszFunction(Dimension dim, std::vector<NuAtom> nu, HarmonicSpec harmonic, double domain_radius)
        : RieszFunction(dim, std::move(nu), std::move(harmonic), domain_radius, Checked::yes) {}

    /// Bypasses the nonnegative-mass invariant. Exists so diagnostics and
    /// tests can build deliberately broken (superharmonic) inputs; anything
    /// built here is outside the library's guarantees.
    static RieszFunction unchecked(Dimension dim, std::vector<NuAtom> nu, HarmonicSpec harmonic,
                                   double domain_radius) {
        return RieszFunction(dim, std::move(nu), std::move(harmonic), domain_radius, Checked::no);
    }

    const Dimension& dim() const { return dim_; }
    const std::vector<NuAtom>& nu_atoms() const { return nu_; }
    const HarmonicSpec& harmonic() const { return harmonic_; }
    double domain_radius() const { return domain_radius_; }

private:
    enum class Checked { yes, no };

    RieszFunction(Dimension dim, std::vector<NuAtom> nu, HarmonicSpec harmonic, double domain_radius,
                  Checked checked)
        : dim_(dim), nu_(std::move(nu)), harmonic_(std::move(harmonic)), domain_radius_(domain_radius) {
        if (!(domain_radius_ > 0.0)) throw std::invalid_argument("RieszFunction: domain radius must be > 0");
        for (const NuAtom& a : nu_) {
            require_dimension(a.p, dim_, "RieszFunction");
            if (checked == Checked::yes && !(a.mass >= 0.0))
                throw std::invalid_argument("RieszFunction: nu must be a nonnegative measure");
            if (!(norm(a.p) < domain_radius_))
                throw std::invalid_argument("RieszFunction: nu atom outside the validity ball");
        }
    }

    Dimension dim_;
    std::vector<NuAtom> nu_;
    HarmonicSpec harmonic_;
    double domain_radius_;
};

inline double eval_riesz(const RieszFunction& rf, const Point& x) {
    require_dimension(x, rf.dim(), "eval_riesz");
    if (!(norm(x) < rf.domain_radius()))
        throw std::domain_error("eval_riesz: point outside the validity ball B(0, " +
                                std::to_string(rf.domain_radius()) + ")");
    const double scale = -1.0 / riesz_normalization(rf.dim());
    double pot = 0.0;
    for (const NuAtom& a : rf.nu_atoms()) {
        if (a.mass == 0.0) continue;
        const double d2 = squared_distance(a.p, x);
        if (d2 == 0.0) return a.mass > 0.0 ? neg_infinity() : pos_infinity();
        pot += a.mass * kernel_g(rf.dim(), std::sqrt(d2));
    }
    return scale * pot + harmonic_eval(rf.harmonic(), x);
}

/// Function handle adapter so measure-side operations can consume any
/// pointwise-evaluable function.
inline std::function<double(const Point&)> as_function(const RieszFunction& rf) {
    return [rf](const Point& x) { return eval_riesz(rf, x); };
}

// ---------------------------------------------------------------------------
// Sphere means
// ---------------------------------------------------------------------------

namespace detail {

/// Gauss-Legendre nodes and weights on (-1, 1) by Newton iteration on the
/// recurrence; deterministic, symmetric, weights summing to 2.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(i)] = -x;
        nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[static_cast<std::size_t>(i)] = w;
        weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
}

struct WeightedNode {
    Point p;
    double w;  // normalized: weights sum to 1
};

inline std::vector<WeightedNode> sphere_nodes(const Point& center, double r, int quad_order) {
    const int n = static_cast<int>(center.size());
    std::vector<WeightedNode> nodes;
    if (n == 2) {
        nodes.reserve(static_cast<std::size_t>(quad_order));
        for (int k = 0; k < quad_order; ++k) {
            const double th = 2.0 * std::numbers::pi * (k + 0.5) / quad_order;
            nodes.push_back({{center[0] + r * std::cos(th), center[1] + r * std::sin(th)},
                             1.0 / quad_order});
        }
    } else if (n == 3) {
        // Product rule: Gauss-Legendre in the polar cosine, equal-angle
        // trapezoid in azimuth. Spectrally accurate on smooth integrands and
        // symmetric, so constants and linear functions integrate exactly.
        const int nz = std::max(4, static_cast<int>(std::sqrt(quad_order / 2.0)));
        const int nphi = 2 * nz;
        std::vector<double> z, wz;
        gauss_legendre(nz, z, wz);
        nodes.reserve(static_cast<std::size_t>(nz) * nphi);
        for (int i = 0; i < nz; ++i) {
            const double rho = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
            const double w = wz[i] / (2.0 * nphi);
            for (int j = 0; j < nphi; ++j) {
                const double phi = 2.0 * std::numbers::pi * (j + 0.5) / nphi;
                nodes.push_back({{center[0] + r * rho * std::cos(phi),
                                  center[1] + r * rho * std::sin(phi), center[2] + r * z[i]},
                                 w});
            }
        }
    } else {
        throw std::invalid_argument("sphere_mean: node sets are available for n = 2 and n = 3 only");
    }
    return nodes;
}

}  // namespace detail

/// Quadrature average of f over the sphere of radius r about x. n=2 uses the
/// equal-angle trapezoid rule, n=3 a Gauss-Legendre x trapezoid product rule;
/// both are deterministic and spectrally accurate on smooth integrands, and
/// exact for constants at any order. A node evaluating to -infinity makes
/// the mean -infinity. `quad_order` is the total node budget.
inline double sphere_mean(const std::function<double(const Point&)>& f, const Point& x, double r,
                          int quad_order) {
    if (quad_order < 8) throw std::invalid_argument("sphere_mean: quad_order must be >= 8");
    if (!(r > 0.0)) throw std::invalid_argument("sphere_mean: radius must be > 0");
    const std::vector<detail::WeightedNode> nodes = detail::sphere_nodes(x, r, quad_order);
    // Accumulate deviations from the first node's value: constants come out
    // exact regardless of the weight normalization.
    const double anchor = f(nodes.front().p);
    if (is_neg_infinity(anchor)) return neg_infinity();
    double sum = 0.0, wsum = 0.0;
    for (const detail::WeightedNode& node : nodes) {
        const double v = f(node.p);
        if (is_neg_infinity(v)) return neg_infinity();
        sum += node.w * (v - anchor);
        wsum += node.w;
    }
    return anchor + sum / wsum;
}

// ---------------------------------------------------------------------------
// Sub-mean-value certification
// ---------------------------------------------------------------------------

/// Certificate that u(x) <= mean of u over the sphere of each radius, the
/// operational subharmonicity test. Quadrature is self-policed by order
/// doubling: each mean is accepted only if doubling the order moves it by
/// less than tol/2.
struct SubmeanReport {
    Point center;
    std::vector<double> radii;
    std::vector<double> means;       // at the doubled order
    std::vector<double> quad_diffs;  // |mean(q) - mean(2q)| per radius
    double value_at_center = 0.0;
    double worst_margin = 0.0;       // min over radii of mean - value
    double tolerance = 0.0;
    bool vacuous = false;            // center sits on an atom, value -infinity
    bool quadrature_ok = true;
    bool pass = false;
};

inline SubmeanReport submean_check(const RieszFunction& rf, const Point& x, const std::vector<double>& radii,
                                   int quad_order = 0, double tol = 1e-6) {
    require_dimension(x, rf.dim(), "submean_check");
    if (radii.empty()) throw std::invalid_argument("submean_check: empty radius list");
    if (quad_order == 0) quad_order = rf.dim().n() == 2 ? 512 : 4096;
    const double xnorm = norm(x);
    for (double r : radii)
        if (!(r > 0.0) || !(xnorm + r < rf.domain_radius()))
            throw std::invalid_argument("submean_check: sphere of radius " + std::to_string(r) +
                                        " is not inside the validity ball");

    SubmeanReport rep;
    rep.center = x;
    rep.radii = radii;
    rep.tolerance = tol;
    rep.value_at_center = eval_riesz(rf, x);
    if (is_neg_infinity(rep.value_at_center)) {
        rep.vacuous = true;
        rep.pass = true;  // u(x) = -infinity lies below every mean
        rep.worst_margin = pos_infinity();
        return rep;
    }
    const auto f = as_function(rf);
    rep.worst_margin = pos_infinity();
    for (double r : radii) {
        const double coarse = sphere_mean(f, x, r, quad_order);
        const double fine = sphere_mean(f, x, r, 2 * quad_order);
        const double diff = std::abs(fine - coarse);
        rep.means.push_back(fine);
        rep.quad_diffs.push_back(diff);
        if (!(diff < tol / 2.0)) rep.quadrature_ok = false;
        rep.worst_margin = std::min(rep.worst_margin, fine - rep.value_at_center);
    }
    rep.pass = rep.quadrature_ok && rep.worst_margin >= -tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Layer-cake identity
// ---------------------------------------------------------------------------

struct LayerCakeResult {
    double lhs = 0.0;  // sum of weight * f(atom)
    double rhs = 0.0;  // integral of mass{f >= t} dt, evaluated exactly
    double gap = 0.0;
};

/// Both sides of  integral f dmu = integral_0^inf mu({f >= t}) dt  for a
/// nonnegative f on a finite atom measure. The right side sorts the atom
/// values and integrates the piecewise-constant superlevel masses exactly,
/// so the gap is a pure floating-point residue.
inline LayerCakeResult verify_layer_cake(const std::function<double(const Point&)>& f,
                                         const DiscreteMeasure& mu) {
    const auto& atoms = mu.atoms();
    std::vector<std::pair<double, double>> vw;  // (value, weight)
    vw.reserve(atoms.size());
    LayerCakeResult res;
    for (const Atom& a : atoms) {
        const double v = f(a.p);
        if (!(v >= 0.0))
            throw std::invalid_argument("verify_layer_cake: f must be nonnegative on every atom");
        res.lhs += a.w * v;
        vw.emplace_back(v, a.w);
    }
    std::sort(vw.begin(), vw.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // Suffix masses: mass({f >= t}) is constant between consecutive sorted values.
    std::vector<double> suffix(vw.size() + 1, 0.0);
    for (std::size_t i = vw.size(); i-- > 0;) suffix[i] = suffix[i + 1] + vw[i].second;
    double prev = 0.0;
    for (std::size_t i = 0; i < vw.size(); ++i) {
        res.rhs += (vw[i].first - prev) * suffix[i];
        prev = vw[i].first;
    }
    res.gap = std::abs(res.lhs - res.rhs);
    return res;
}

}  // namespace mvlab
