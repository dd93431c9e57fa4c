#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mvlab/admissible.hpp"
#include "mvlab/core.hpp"
#include "mvlab/kernel.hpp"
#include "mvlab/measure.hpp"
#include "mvlab/potential.hpp"

namespace mvlab {

// ---------------------------------------------------------------------------
// Shrinking-ball schedules
// ---------------------------------------------------------------------------

/// Geometric radius schedule eps_j = start * factor^j, j = 0..steps-1.
struct EpsSchedule {
    double start = 0.0;
    double factor = 0.0;  // in (0,1)
    int steps = 0;

    std::vector<double> values() const {
        if (!(start > 0.0)) throw std::invalid_argument("EpsSchedule: start must be > 0");
        if (!(factor > 0.0 && factor < 1.0)) throw std::invalid_argument("EpsSchedule: factor must be in (0,1)");
        if (steps < 1) throw std::invalid_argument("EpsSchedule: steps must be >= 1");
        std::vector<double> v(static_cast<std::size_t>(steps));
        double e = start;
        for (int j = 0; j < steps; ++j, e *= factor) v[static_cast<std::size_t>(j)] = e;
        return v;
    }
};

// ---------------------------------------------------------------------------
// The shrinking-ball mean value
// ---------------------------------------------------------------------------

/// Weighted average of u over the atoms in the open ball B(x0, eps).
/// Returns -infinity when a contributing atom of positive weight carries
/// u = -infinity. Radii below the measure's resolution validity are refused:
/// ball averages at those scales are sampling noise, not estimates.
inline double mean_value(const std::function<double(const Point&)>& u, const DiscreteMeasure& mu,
                         const Point& x0, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("mean_value: eps must be > 0");
    if (eps < mu.resolution_radius())
        throw std::invalid_argument("mean_value: eps = " + std::to_string(eps) +
                                    " is below the measure's resolution validity radius " +
                                    std::to_string(mu.resolution_radius()));
    require_dimension(x0, mu.dim(), "mean_value");

    double mass = 0.0, weighted = 0.0;
    bool hit_minus_infinity = false;
    const double e2 = eps * eps;
    for (const Atom& a : mu.atoms()) {
        if (!(squared_distance(a.p, x0) < e2) || a.w == 0.0) continue;
        mass += a.w;
        if (hit_minus_infinity) continue;
        const double v = u(a.p);
        if (is_neg_infinity(v))
            hit_minus_infinity = true;
        else
            weighted += a.w * v;
    }
    if (!(mass > 0.0))
        throw std::invalid_argument(
            "mean_value: the ball B(x0, " + std::to_string(eps) +
            ") carries no mass, so the lower mass-bound hypothesis mu(K intersect B(x0,eps)) >= A h(eps) "
            "fails at this center");
    return hit_minus_infinity ? neg_infinity() : weighted / mass;
}

/// Count of positive-weight atoms in the open ball; reports carry it so
/// flaky convergence is diagnosable as thin sampling.
inline std::size_t atoms_in_ball(const DiscreteMeasure& mu, const Point& x0, double eps) {
    std::size_t k = 0;
    const double e2 = eps * eps;
    for (const Atom& a : mu.atoms())
        if (a.w > 0.0 && squared_distance(a.p, x0) < e2) ++k;
    return k;
}

// ---------------------------------------------------------------------------
// Convergence studies
// ---------------------------------------------------------------------------

/// Record of one shrinking-ball limit experiment. The limit estimate is the
/// final schedule mean; `converged` certifies a decreasing error tail plus a
/// final error under tolerance, never an extrapolation. A target of
/// -infinity switches to threshold mode: the means must be non-increasing
/// over the tail and end below every supplied threshold.
struct ConvergenceReport {
    Point x0;
    std::vector<double> eps_values;
    std::vector<double> means;
    std::vector<std::size_t> ball_counts;
    double target = 0.0;
    std::vector<double> errors;  // |mean - target|; +infinity entries when the mean is -infinity
    double limit_estimate = 0.0;
    double tolerance = 0.0;
    bool converged = false;
};

inline ConvergenceReport convergence_study(const std::function<double(const Point&)>& u,
                                           const DiscreteMeasure& mu, const Point& x0,
                                           const EpsSchedule& sched, double target, double tol,
                                           const std::vector<double>& neg_infinity_thresholds = {}) {
    ConvergenceReport rep;
    rep.x0 = x0;
    rep.eps_values = sched.values();
    rep.target = target;
    rep.tolerance = tol;
    for (double eps : rep.eps_values) {
        rep.means.push_back(mean_value(u, mu, x0, eps));
        rep.ball_counts.push_back(atoms_in_ball(mu, x0, eps));
    }
    rep.limit_estimate = rep.means.back();
    for (double m : rep.means)
        rep.errors.push_back(std::abs(m - target));  // |(-inf) - (-inf)| is NaN; fixed below
    if (is_neg_infinity(target))
        for (std::size_t j = 0; j < rep.means.size(); ++j)
            rep.errors[j] = is_neg_infinity(rep.means[j]) ? 0.0 : pos_infinity();

    const std::size_t tail_from = rep.means.size() - std::max<std::size_t>(1, rep.means.size() / 2);
    if (is_neg_infinity(target)) {
        bool ok = true;
        for (std::size_t j = tail_from + 1; j < rep.means.size(); ++j)
            if (!(rep.means[j] <= rep.means[j - 1])) ok = false;
        if (neg_infinity_thresholds.empty()) ok = false;
        for (double t : neg_infinity_thresholds)
            if (!(rep.limit_estimate < t)) ok = false;
        rep.converged = ok;
    } else {
        bool ok = rep.errors.back() < tol;
        for (std::size_t j = tail_from + 1; j < rep.errors.size(); ++j)
            if (!(rep.errors[j] <= rep.errors[j - 1])) ok = false;
        rep.converged = ok;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// The averaged-kernel function of the limit argument
// ---------------------------------------------------------------------------

/// f_eps(w) = average over the atoms of B(x0, eps) of g(|x - w|).
/// Returns +infinity if w sits exactly on a contributing atom.
inline double f_eps(const DiscreteMeasure& mu, const Point& x0, double eps, const Point& w) {
    if (!(eps > 0.0)) throw std::invalid_argument("f_eps: eps must be > 0");
    require_dimension(x0, mu.dim(), "f_eps");
    require_dimension(w, mu.dim(), "f_eps");
    const double e2 = eps * eps;
    double mass = 0.0, sum = 0.0;
    bool singular = false;
    for (const Atom& a : mu.atoms()) {
        if (!(squared_distance(a.p, x0) < e2) || a.w == 0.0) continue;
        mass += a.w;
        if (singular) continue;
        const double d2 = squared_distance(a.p, w);
        if (d2 == 0.0)
            singular = true;
        else
            sum += a.w * kernel_g(mu.dim(), std::sqrt(d2));
    }
    if (!(mass > 0.0))
        throw std::invalid_argument(
            "f_eps: the ball B(x0, " + std::to_string(eps) +
            ") carries no mass, so the lower mass-bound hypothesis mu(K intersect B(x0,eps)) >= A h(eps) "
            "fails at this center");
    return singular ? pos_infinity() : sum / mass;
}

// ---------------------------------------------------------------------------
// Bound verification for the two-case domination argument
// ---------------------------------------------------------------------------

/// Constants of the domination argument: p, gamma > 1 give the case split
/// radius p*eps and the covering constant c = 2 gamma (1+p) (> 4 follows),
/// A and B are the two-sided mass constants, M the gauge constant, eps1 the
/// largest radius the argument is run at.
struct ProofBoundConfig {
    double p = 2.0;
    double gamma = 1.5;
    double A = 1.0;
    double B = 1.0;
    double M = 1.0;
    double eps1 = 0.1;

    double c() const { return 2.0 * gamma * (1.0 + p); }

    void validate() const {
        if (!(p > 1.0)) throw std::invalid_argument("ProofBoundConfig: p must be > 1");
        if (!(gamma > 1.0)) throw std::invalid_argument("ProofBoundConfig: gamma must be > 1");
        if (!(A > 0.0 && B > 0.0 && A <= B))
            throw std::invalid_argument("ProofBoundConfig: need 0 < A <= B");
        if (!(M > 0.0)) throw std::invalid_argument("ProofBoundConfig: M must be > 0");
        if (!(eps1 > 0.0)) throw std::invalid_argument("ProofBoundConfig: eps1 must be > 0");
    }
};

struct CaseMargin {
    Point w;
    double eps = 0.0;
    int case_id = 0;      // 1: |w-x0| > p eps, 2: |w-x0| <= p eps
    double f_value = 0.0; // f_eps(w)
    double bound = 0.0;   // the dominating right-hand side
    double margin = 0.0;  // bound - f_value
};

/// Outcome of checking f_eps(w) against its two dominating bounds over a
/// (w, eps) grid. A violated mass condition is a precondition report, not a
/// bound failure: margins are only meaningful under the two-sided condition.
struct ProofBoundsReport {
    bool mass_condition_ok = false;
    std::string mass_diagnostic;
    std::vector<CaseMargin> margins;
    double worst_margin = 0.0;
    std::size_t case1_count = 0;
    std::size_t case2_count = 0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Case I (|w - x0| > p eps):  f_eps(w) <= g((p-1)/p |w - x0|).
/// Case II (|w - x0| <= p eps):
///   f_eps(w) <= g(|w - x0|) + (2 gamma p)^(n-2) max(1,n-2) B M / (A |w - x0|^(n-2)).
/// The two-sided mass condition A h(r) <= mass <= B h(r) is verified first at
/// the tested radii and at the covering scale c*eps (the largest radius the
/// domination argument touches); w samples must avoid x0 and the atoms.
inline ProofBoundsReport proof_bounds_check(const DiscreteMeasure& mu, const Point& x0,
                                            const ProofBoundConfig& cfg, const GaugeFunction& h,
                                            const std::vector<Point>& w_samples,
                                            const std::vector<double>& eps_samples, double tol = 1e-9) {
    cfg.validate();
    require_dimension(x0, mu.dim(), "proof_bounds_check");
    if (w_samples.empty() || eps_samples.empty())
        throw std::invalid_argument("proof_bounds_check: need nonempty w and eps samples");

    ProofBoundsReport rep;
    rep.tolerance = tol;
    const int n = mu.dim().n();
    const double c = cfg.c();

    // Two-sided mass precheck. Lower bound at the center, upper bound at a
    // deterministic stride of atoms, both at eps and at the covering scale.
    const double fp_slack = 1.0 + 1e-12;
    rep.mass_condition_ok = true;
    for (double eps : eps_samples) {
        if (!(eps > 0.0) || !(eps < cfg.eps1)) {
            rep.mass_condition_ok = false;
            rep.mass_diagnostic = "eps sample " + std::to_string(eps) + " outside (0, eps1)";
            break;
        }
        for (double r : {eps, c * eps}) {
            const double lower_here = mu.ball_mass(x0, r);
            if (!(lower_here * fp_slack >= cfg.A * h.eval(r))) {
                rep.mass_condition_ok = false;
                rep.mass_diagnostic = "lower mass bound fails at the center for r = " + std::to_string(r) +
                                      ": mass = " + std::to_string(lower_here) +
                                      " < A h(r) = " + std::to_string(cfg.A * h.eval(r));
            }
        }
        const std::size_t natoms = mu.atoms().size();
        const std::size_t samples = std::min<std::size_t>(natoms, 512);
        const std::size_t stride = natoms / samples;
        for (std::size_t s = 0; s < samples && rep.mass_condition_ok; ++s) {
            const Point& x = mu.atoms()[s * stride].p;
            for (double r : {eps, c * eps}) {
                const double m = mu.ball_mass(x, r);
                if (!(m <= cfg.B * h.eval(r) * fp_slack)) {
                    rep.mass_condition_ok = false;
                    rep.mass_diagnostic = "upper mass bound fails at a support point for r = " + std::to_string(r) +
                                          ": mass = " + std::to_string(m) +
                                          " > B h(r) = " + std::to_string(cfg.B * h.eval(r));
                }
            }
        }
        if (!rep.mass_condition_ok) break;
    }
    if (!rep.mass_condition_ok) return rep;

    rep.worst_margin = pos_infinity();
    for (const Point& w : w_samples) {
        const double d = distance(w, x0);
        if (!(d > 0.0))
            throw std::invalid_argument("proof_bounds_check: w samples must avoid the center x0");
        for (double eps : eps_samples) {
            const double fe = f_eps(mu, x0, eps, w);
            if (is_pos_infinity(fe))
                throw std::invalid_argument("proof_bounds_check: a w sample coincides with a support atom");
            CaseMargin m;
            m.w = w;
            m.eps = eps;
            m.f_value = fe;
            if (d > cfg.p * eps) {
                m.case_id = 1;
                m.bound = kernel_g(mu.dim(), (cfg.p - 1.0) / cfg.p * d);
                ++rep.case1_count;
            } else {
                m.case_id = 2;
                m.bound = kernel_g(mu.dim(), d) + std::pow(2.0 * cfg.gamma * cfg.p, n - 2) *
                                                      std::max(1, n - 2) * cfg.B * cfg.M /
                                                      (cfg.A * std::pow(d, n - 2));
                ++rep.case2_count;
            }
            m.margin = m.bound - fe;
            rep.worst_margin = std::min(rep.worst_margin, m.margin);
            rep.margins.push_back(std::move(m));
        }
    }
    rep.pass = rep.worst_margin >= -tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Comparison of two functions along shrinking balls
// ---------------------------------------------------------------------------

struct ComparisonPointResult {
    Point x0;
    std::vector<double> u_means;
    std::vector<double> v_means;
    double u_value = 0.0;  // pointwise value at x0
    double v_value = 0.0;
    bool means_ok = false;       // u-mean >= v-mean - tol at every eps
    bool conclusion_ok = false;  // u(x0) >= v(x0) - tol
};

/// The hypothesis audit (u >= v on the support off the null set) plus the
/// per-point chain: mean comparison along the schedule and the pointwise
/// conclusion u(x0) >= v(x0). An audit failure is reported with the
/// offending atoms; it makes the overall verdict fail but the point data is
/// still filled in so expected-failure demonstrations stay inspectable.
struct ComparisonReport {
    double null_set_weight = 0.0;
    bool audit_ok = false;
    std::vector<std::size_t> audit_violations;  // atom indices with u < v - tol off the null set
    std::vector<ComparisonPointResult> points;
    double tolerance = 0.0;
    bool pass = false;
};

inline ComparisonReport comparison_check(const std::function<double(const Point&)>& u,
                                         const std::function<double(const Point&)>& v,
                                         const DiscreteMeasure& mu,
                                         const std::function<bool(const Point&)>& null_set,
                                         const std::vector<Point>& check_points, const EpsSchedule& sched,
                                         double tol) {
    ComparisonReport rep;
    rep.tolerance = tol;

    for (const Atom& a : mu.atoms())
        if (null_set(a.p)) rep.null_set_weight += a.w;
    if (rep.null_set_weight > 0.0)
        throw std::invalid_argument("comparison_check: the declared null set carries positive mass " +
                                    std::to_string(rep.null_set_weight) +
                                    "; the a.e. hypothesis requires mu(N) = 0");

    rep.audit_ok = true;
    const auto& atoms = mu.atoms();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].w == 0.0 || null_set(atoms[i].p)) continue;
        const double uv = u(atoms[i].p);
        const double vv = v(atoms[i].p);
        const bool ok = is_neg_infinity(vv) || uv >= vv - tol;
        if (!ok) {
            rep.audit_ok = false;
            rep.audit_violations.push_back(i);
        }
    }

    bool all_points_ok = true;
    for (const Point& x0 : check_points) {
        ComparisonPointResult pr;
        pr.x0 = x0;
        pr.means_ok = true;
        for (double eps : sched.values()) {
            const double um = mean_value(u, mu, x0, eps);
            const double vm = mean_value(v, mu, x0, eps);
            pr.u_means.push_back(um);
            pr.v_means.push_back(vm);
            const bool ok = is_neg_infinity(vm) || um >= vm - tol;
            if (!ok) pr.means_ok = false;
        }
        pr.u_value = u(x0);
        pr.v_value = v(x0);
        pr.conclusion_ok = is_neg_infinity(pr.v_value) || pr.u_value >= pr.v_value - tol;
        if (!(pr.means_ok && pr.conclusion_ok)) all_points_ok = false;
        rep.points.push_back(std::move(pr));
    }
    rep.pass = rep.audit_ok && all_points_ok;
    return rep;
}

// ---------------------------------------------------------------------------
// Density-form finiteness condition
// ---------------------------------------------------------------------------

struct DensityConditionResult {
    double value = 0.0;  // the normalized density sum; +infinity when singular
    bool finite = false;
    std::vector<std::size_t> singular_atoms;  // nu atoms sitting exactly at x0
    double lower_density_at_x0 = 0.0;
};

/// Evaluates [1/lower-density(mu_K, x0)] * sum over nu atoms w of
/// upper-density(mu_K, w) * mass(w) / |w - x0|^(n-2), the finiteness
/// hypothesis of the density-form limit statement. The distance is taken
/// from x0 (the per-point form); a nu atom exactly at x0 with positive upper
/// density makes the sum singular.
inline DensityConditionResult density_condition(const RieszFunction& rf, const DiscreteMeasure& mu, double s,
                                                const Point& x0, const std::vector<double>& radii) {
    const int n = mu.dim().n();
    if (!(s > n - 2))
        throw std::invalid_argument("density_condition: s must exceed n - 2 = " + std::to_string(n - 2));
    require_dimension(x0, mu.dim(), "density_condition");

    const DensityEstimate at_x0 = densities(mu, s, x0, radii);
    if (!(at_x0.lower > 0.0))
        throw std::invalid_argument(
            "density_condition: lower density estimate at x0 is zero; the normalizing division is undefined");

    DensityConditionResult res;
    res.lower_density_at_x0 = at_x0.lower;
    res.finite = true;
    double sum = 0.0;
    const auto& nu = rf.nu_atoms();
    for (std::size_t j = 0; j < nu.size(); ++j) {
        if (nu[j].mass == 0.0) continue;
        const double d = distance(nu[j].p, x0);
        const double upper = densities(mu, s, nu[j].p, radii).upper;
        if (d == 0.0) {
            if (n > 2 && upper > 0.0) {
                res.finite = false;
                res.singular_atoms.push_back(j);
            } else if (n == 2) {
                sum += upper * nu[j].mass;  // |w - x0|^0 = 1
            }
            continue;
        }
        sum += upper * nu[j].mass / std::pow(d, n - 2);
    }
    res.value = res.finite ? sum / at_x0.lower : pos_infinity();
    return res;
}

}  // namespace mvlab
