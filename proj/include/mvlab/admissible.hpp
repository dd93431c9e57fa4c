#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mvlab/core.hpp"

namespace mvlab {

// ---------------------------------------------------------------------------
// Gauge functions h : (0, inf) -> (0, inf)
// ---------------------------------------------------------------------------

/// Candidate gauge for the admissible family: the named power-like forms
/// plus positive scaling, sums, and tabulated data interpolated linearly in
/// log-log space. (r^k |log r| vanishes at r = 1 exactly; callers probing
/// admissibility work at small radii where the family lives.)
class GaugeFunction {
public:
    struct Power {
        double k;
    };
    struct PowerLog {
        double k;
    };
    struct Scaled {
        double a;
        std::shared_ptr<const GaugeFunction> inner;
    };
    struct Sum {
        std::shared_ptr<const GaugeFunction> lhs;
        std::shared_ptr<const GaugeFunction> rhs;
    };
    struct Table {
        std::vector<double> r;  // strictly increasing
        std::vector<double> h;  // strictly positive
    };
    using Form = std::variant<Power, PowerLog, Scaled, Sum, Table>;

    static GaugeFunction power(double k) { return GaugeFunction(Power{k}); }
    static GaugeFunction power_log(double k) { return GaugeFunction(PowerLog{k}); }
    static GaugeFunction scaled(double a, GaugeFunction inner) {
        if (!(a > 0.0)) throw std::invalid_argument("GaugeFunction::scaled: factor must be > 0");
        return GaugeFunction(Scaled{a, std::make_shared<const GaugeFunction>(std::move(inner))});
    }
    static GaugeFunction sum(GaugeFunction lhs, GaugeFunction rhs) {
        return GaugeFunction(Sum{std::make_shared<const GaugeFunction>(std::move(lhs)),
                                 std::make_shared<const GaugeFunction>(std::move(rhs))});
    }
    static GaugeFunction table(std::vector<double> r, std::vector<double> h) {
        if (r.size() != h.size() || r.size() < 2)
            throw std::invalid_argument("GaugeFunction::table: need matching r/h samples, at least two");
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (!(r[i] > 0.0) || !(h[i] > 0.0))
                throw std::invalid_argument("GaugeFunction::table: samples must be strictly positive");
            if (i > 0 && !(r[i] > r[i - 1]))
                throw std::invalid_argument("GaugeFunction::table: r grid must be strictly increasing");
        }
        return GaugeFunction(Table{std::move(r), std::move(h)});
    }

    const Form& form() const { return form_; }

    double eval(double r) const {
        if (!(r > 0.0)) throw std::domain_error("gauge_eval: r must be > 0");
        if (const auto* p = std::get_if<Power>(&form_)) return std::pow(r, p->k);
        if (const auto* pl = std::get_if<PowerLog>(&form_)) return std::pow(r, pl->k) * std::abs(std::log(r));
        if (const auto* sc = std::get_if<Scaled>(&form_)) return sc->a * sc->inner->eval(r);
        if (const auto* su = std::get_if<Sum>(&form_)) return su->lhs->eval(r) + su->rhs->eval(r);
        const auto& t = std::get<Table>(form_);
        if (r < t.r.front() || r > t.r.back())
            throw std::domain_error("gauge_eval: r = " + std::to_string(r) + " outside the tabulated range [" +
                                    std::to_string(t.r.front()) + ", " + std::to_string(t.r.back()) + "]");
        const auto it = std::upper_bound(t.r.begin(), t.r.end(), r);
        std::size_t i = (it == t.r.end()) ? t.r.size() - 2 : static_cast<std::size_t>(it - t.r.begin()) - 1;
        const double s = (std::log(t.h[i + 1]) - std::log(t.h[i])) / (std::log(t.r[i + 1]) - std::log(t.r[i]));
        return t.h[i] * std::pow(r / t.r[i], s);
    }

private:
    explicit GaugeFunction(Form f) : form_(std::move(f)) {}
    Form form_;
};

inline double gauge_eval(const GaugeFunction& h, double r) { return h.eval(r); }

inline GaugeFunction gauge_combine(GaugeFunction a, GaugeFunction b) {
    return GaugeFunction::sum(std::move(a), std::move(b));
}

inline GaugeFunction gauge_scale(GaugeFunction a, double factor) {
    return GaugeFunction::scaled(factor, std::move(a));
}

// ---------------------------------------------------------------------------
// The admissibility integral  int_0^upper h(r) / r^(n-1) dr
// ---------------------------------------------------------------------------

namespace detail {

// Dyadic divergence rule near 0: contributions over [U 2^-(j+1), U 2^-j] of a
// power integrand r^(kappa-1) form a geometric sequence with dyad-to-dyad
// factor 2^-kappa. "Grows without bound" at desk scale means that factor
// stays >= 1/1.05 over every dyad, i.e. kappa <= log2(1.05).
inline bool power_tail_divergent(double kappa) { return kappa <= std::log2(1.05); }

// int_0^U r^(kappa-1) (-log r) dr for 0 < U <= 1, kappa > 0.
inline double power_log_integral_below_one(double U, double kappa) {
    return std::pow(U, kappa) * (-std::log(U) / kappa + 1.0 / (kappa * kappa));
}

}  // namespace detail

/// Exact value of the admissibility integral, or +infinity when it diverges
/// at 0. Power and power-log forms use closed-form antiderivatives; sums and
/// scalings recurse; tabulated gauges integrate their log-log interpolant
/// segment by segment in closed form (each segment is an exact power) and
/// apply the dyadic divergence rule to the power law extrapolated below the
/// table from its lowest segment's slope.
inline double admissible_integral(const GaugeFunction& h, const Dimension& dim, double upper) {
    if (!(upper > 0.0)) throw std::invalid_argument("admissible_integral: upper limit must be > 0");
    const int n = dim.n();
    const auto& form = h.form();

    if (const auto* p = std::get_if<GaugeFunction::Power>(&form)) {
        const double kappa = p->k - n + 2.0;
        if (kappa <= 0.0) return pos_infinity();
        return std::pow(upper, kappa) / kappa;
    }
    if (const auto* pl = std::get_if<GaugeFunction::PowerLog>(&form)) {
        const double kappa = pl->k - n + 2.0;
        if (kappa <= 0.0) return pos_infinity();
        if (upper <= 1.0) return detail::power_log_integral_below_one(upper, kappa);
        // Split at 1 where |log| changes sign.
        const double head = 1.0 / (kappa * kappa);
        const double tail = std::pow(upper, kappa) * (std::log(upper) / kappa - 1.0 / (kappa * kappa)) +
                            1.0 / (kappa * kappa);
        return head + tail;
    }
    if (const auto* sc = std::get_if<GaugeFunction::Scaled>(&form)) {
        const double inner = admissible_integral(*sc->inner, dim, upper);
        return is_pos_infinity(inner) ? pos_infinity() : sc->a * inner;
    }
    if (const auto* su = std::get_if<GaugeFunction::Sum>(&form)) {
        const double a = admissible_integral(*su->lhs, dim, upper);
        const double b = admissible_integral(*su->rhs, dim, upper);
        if (is_pos_infinity(a) || is_pos_infinity(b)) return pos_infinity();
        return a + b;
    }

    const auto& t = std::get<GaugeFunction::Table>(form);
    if (upper > t.r.back())
        throw std::domain_error("admissible_integral: upper limit exceeds the tabulated range");
    double total = 0.0;
    // Below the table: power law extrapolated from the lowest segment.
    const double k_lo =
        (std::log(t.h[1]) - std::log(t.h[0])) / (std::log(t.r[1]) - std::log(t.r[0]));
    const double kappa_lo = k_lo - n + 2.0;
    if (detail::power_tail_divergent(kappa_lo)) return pos_infinity();
    const double cut = std::min(upper, t.r.front());
    total += t.h[0] / std::pow(t.r[0], k_lo) * std::pow(cut, kappa_lo) / kappa_lo;
    // Inside the table: each segment of the interpolant is an exact power.
    for (std::size_t i = 0; i + 1 < t.r.size() && t.r[i] < upper; ++i) {
        const double a = t.r[i];
        const double b = std::min(upper, t.r[i + 1]);
        if (!(b > a)) continue;
        const double s = (std::log(t.h[i + 1]) - std::log(t.h[i])) / (std::log(t.r[i + 1]) - std::log(t.r[i]));
        const double coeff = t.h[i] / std::pow(a, s);
        const double kappa = s - n + 2.0;
        if (std::abs(kappa) < 1e-14)
            total += coeff * (std::log(b) - std::log(a));
        else
            total += coeff * (std::pow(b, kappa) - std::pow(a, kappa)) / kappa;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Membership checks
// ---------------------------------------------------------------------------

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "inconclusive";
    }
}

/// Finite-grid membership evidence for the admissible family. `ratios`
/// holds the hypothesis quotient per grid point; the verdict is a statement
/// about the tail trend of that sequence, with an explicit inconclusive
/// state because membership is an asymptotic property.
struct AdmissibilityReport {
    double c = 0.0;
    std::vector<double> eps_grid;
    std::vector<double> ratios;
    double m_estimate = 0.0;  // max ratio over the grid
    Verdict verdict = Verdict::inconclusive;
    bool divergent = false;
};

namespace detail {

// Scale factors cancel algebraically in the admissibility and (*) ratios;
// peeling them here keeps the cancellation exact in floating point too.
inline const GaugeFunction& strip_scaling(const GaugeFunction& g, double& factor) {
    if (const auto* sc = std::get_if<GaugeFunction::Scaled>(&g.form())) {
        factor *= sc->a;
        return strip_scaling(*sc->inner, factor);
    }
    return g;
}

inline Verdict trend_verdict(const std::vector<double>& ratios, bool divergent) {
    if (divergent) return Verdict::fail;
    // Tail = the smaller half of the eps grid.
    const std::size_t tail_len = ratios.size() / 2;
    const std::size_t from = ratios.size() - tail_len;
    double max_factor = 0.0, min_factor = pos_infinity(), last_factor = 1.0;
    for (std::size_t j = std::max<std::size_t>(from, 1); j < ratios.size(); ++j) {
        if (!(ratios[j - 1] > 0.0)) return Verdict::inconclusive;
        const double f = ratios[j] / ratios[j - 1];
        max_factor = std::max(max_factor, f);
        min_factor = std::min(min_factor, f);
        last_factor = f;
    }
    if (min_factor > 1.05) return Verdict::fail;       // sustained growth
    if (max_factor <= 1.05 && last_factor <= 1.01) return Verdict::pass;
    return Verdict::inconclusive;
}

inline void validate_grid(double c, const std::vector<double>& eps_grid) {
    if (!(c > 4.0))
        throw std::invalid_argument("check_admissible: the admissibility hypothesis requires c > 4, got c = " +
                                    std::to_string(c));
    if (eps_grid.size() < 8) throw std::invalid_argument("check_admissible: eps grid needs at least 8 points");
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] > 0.0)) throw std::invalid_argument("check_admissible: eps grid must be positive");
        if (i > 0 && !(eps_grid[i] < eps_grid[i - 1]))
            throw std::invalid_argument("check_admissible: eps grid must be strictly decreasing");
    }
}

}  // namespace detail

/// Evaluates  [int_0^(c eps) h(r)/r^(n-1) dr] / [h(eps)/eps^(n-2)]  over the
/// grid and judges whether the quotient stays bounded as eps shrinks.
inline AdmissibilityReport check_admissible(const GaugeFunction& h, const Dimension& dim, double c,
                                            const std::vector<double>& eps_grid) {
    detail::validate_grid(c, eps_grid);
    double scale = 1.0;
    const GaugeFunction& core = detail::strip_scaling(h, scale);

    AdmissibilityReport rep;
    rep.c = c;
    rep.eps_grid = eps_grid;
    rep.ratios.reserve(eps_grid.size());
    for (double eps : eps_grid) {
        const double integral = admissible_integral(core, dim, c * eps);
        if (is_pos_infinity(integral)) {
            rep.divergent = true;
            rep.ratios.push_back(pos_infinity());
            continue;
        }
        rep.ratios.push_back(integral * std::pow(eps, dim.n() - 2) / core.eval(eps));
    }
    rep.m_estimate = *std::max_element(rep.ratios.begin(), rep.ratios.end());
    rep.verdict = detail::trend_verdict(rep.ratios, rep.divergent);
    return rep;
}

/// The one-dimensional averaged form of the same hypothesis: with
/// F(r) = h(r)/r^(n-1), the quotient  [(1/(c eps)) int_0^(c eps) F] / F(eps).
/// Membership via this route and via check_admissible must agree; the report
/// carries both runs and flags disagreement as an internal inconsistency.
struct StarReport {
    AdmissibilityReport star;        // ratios of the averaged form
    AdmissibilityReport admissible;  // companion direct run
    bool verdicts_agree = false;
};

inline StarReport check_star(const GaugeFunction& h, const Dimension& dim, double c,
                             const std::vector<double>& eps_grid) {
    detail::validate_grid(c, eps_grid);
    double scale = 1.0;
    const GaugeFunction& core = detail::strip_scaling(h, scale);

    StarReport rep;
    rep.star.c = c;
    rep.star.eps_grid = eps_grid;
    for (double eps : eps_grid) {
        const double integral = admissible_integral(core, dim, c * eps);
        if (is_pos_infinity(integral)) {
            rep.star.divergent = true;
            rep.star.ratios.push_back(pos_infinity());
            continue;
        }
        const double f_eps = core.eval(eps) / std::pow(eps, dim.n() - 1);
        rep.star.ratios.push_back(integral / (c * eps) / f_eps);
    }
    rep.star.m_estimate = *std::max_element(rep.star.ratios.begin(), rep.star.ratios.end());
    rep.star.verdict = detail::trend_verdict(rep.star.ratios, rep.star.divergent);

    rep.admissible = check_admissible(h, dim, c, eps_grid);
    rep.verdicts_agree = rep.star.verdict == rep.admissible.verdict;
    return rep;
}

}  // namespace mvlab
