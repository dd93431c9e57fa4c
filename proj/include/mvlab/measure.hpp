#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mvlab/core.hpp"

namespace mvlab {

struct Atom {
    Point p;
    double w = 0.0;
};

/// Finite weighted atom cloud approximating a measure restricted to a set K.
///
/// Immutable after construction. Every measure carries the smallest ball
/// radius at which its ball masses are trustworthy (generator atom spacing
/// times a safety factor of 10); operations that estimate limits refuse
/// smaller radii. Balls are open everywhere: an atom at distance exactly
/// eps from the center does not count.
class DiscreteMeasure {
public:
    static constexpr double kResolutionSafetyFactor = 10.0;

    DiscreteMeasure(Dimension dim, std::vector<Atom> atoms, std::string label, double resolution_radius)
        : dim_(dim), atoms_(std::move(atoms)), label_(std::move(label)), resolution_radius_(resolution_radius) {
        if (atoms_.empty()) throw std::invalid_argument("DiscreteMeasure: empty atom cloud");
        if (!(resolution_radius_ >= 0.0))
            throw std::invalid_argument("DiscreteMeasure: resolution radius must be >= 0");
        total_mass_ = 0.0;
        for (const Atom& a : atoms_) {
            require_dimension(a.p, dim_, "DiscreteMeasure");
            if (!(a.w >= 0.0)) throw std::invalid_argument("DiscreteMeasure: negative atom weight");
            total_mass_ += a.w;
        }
        if (!(total_mass_ > 0.0)) throw std::invalid_argument("DiscreteMeasure: total mass must be > 0");
    }

    const Dimension& dim() const { return dim_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::string& label() const { return label_; }
    double resolution_radius() const { return resolution_radius_; }
    double total_mass() const { return total_mass_; }

    /// Bounding-box diagonal; an upper surrogate for the cloud diameter that
    /// is exact enough for radius validation and reports.
    double diameter() const {
        const int n = dim_.n();
        std::vector<double> lo(n, pos_infinity()), hi(n, neg_infinity());
        for (const Atom& a : atoms_)
            for (int i = 0; i < n; ++i) {
                lo[i] = std::min(lo[i], a.p[i]);
                hi[i] = std::max(hi[i], a.p[i]);
            }
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
        return std::sqrt(s);
    }

    /// Mass of the open ball B(center, eps): sum of weights of atoms with
    /// |atom - center| < eps, accumulated in atom order (deterministic).
    double ball_mass(const Point& center, double eps) const {
        if (!(eps > 0.0)) throw std::invalid_argument("ball_mass: eps must be > 0");
        require_dimension(center, dim_, "ball_mass");
        const double e2 = eps * eps;
        double m = 0.0;
        for (const Atom& a : atoms_)
            if (squared_distance(a.p, center) < e2) m += a.w;
        return m;
    }

    /// Indices of atoms inside the open ball, in atom order.
    std::vector<std::size_t> ball_atoms(const Point& center, double eps) const {
        if (!(eps > 0.0)) throw std::invalid_argument("ball_atoms: eps must be > 0");
        require_dimension(center, dim_, "ball_atoms");
        const double e2 = eps * eps;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            if (squared_distance(atoms_[i].p, center) < e2) idx.push_back(i);
        return idx;
    }

    /// Keeps exactly the atoms satisfying `member`. Restricting away every
    /// atom is flagged as an error: a measure with no support is useless here.
    DiscreteMeasure restricted(const std::function<bool(const Point&)>& member, const std::string& sublabel = "") const {
        std::vector<Atom> kept;
        for (const Atom& a : atoms_)
            if (member(a.p)) kept.push_back(a);
        if (kept.empty())
            throw std::invalid_argument("restricted: no atom satisfies the membership predicate (trivial restriction)");
        std::string lab = label_ + (sublabel.empty() ? " (restricted)" : " | " + sublabel);
        return DiscreteMeasure(dim_, std::move(kept), std::move(lab), resolution_radius_);
    }

private:
    Dimension dim_;
    std::vector<Atom> atoms_;
    std::string label_;
    double resolution_radius_;
    double total_mass_;
};

// ---------------------------------------------------------------------------
// Hypersurface sampling
// ---------------------------------------------------------------------------

struct SphereSurface {
    Point center;
    double radius = 0.0;
};

/// Flat (n-1)-patch: base + sum_i t_i frame[i], |t_i| <= extent.
struct HyperplanePatch {
    Point base;
    std::vector<Point> frame;  // n-1 orthonormal tangent vectors
    double extent = 0.0;       // half-width per tangent direction
};

/// Graph patch (params, f(params)) over an axis-aligned parameter box of
/// dimension n-1; the area element sqrt(1 + |grad f|^2) is evaluated by
/// central differences on the sampling grid.
struct GraphPatch {
    std::function<double(const std::vector<double>&)> height;
    std::vector<std::array<double, 2>> box;  // n-1 parameter intervals
};

struct SurfaceSpec {
    Dimension dim;
    std::variant<SphereSurface, HyperplanePatch, GraphPatch> kind;
};

namespace detail {

constexpr double kGoldenAngle = 2.399963229728653;  // pi * (3 - sqrt(5))

inline void check_orthonormal(const std::vector<Point>& frame, int n) {
    if (static_cast<int>(frame.size()) != n - 1)
        throw std::invalid_argument("hyperplane patch: frame must have n-1 tangent vectors");
    for (std::size_t i = 0; i < frame.size(); ++i) {
        if (static_cast<int>(frame[i].size()) != n)
            throw std::invalid_argument("hyperplane patch: tangent vector dimension mismatch");
        for (std::size_t j = 0; j <= i; ++j) {
            double dot = 0.0;
            for (int c = 0; c < n; ++c) dot += frame[i][c] * frame[j][c];
            const double want = (i == j) ? 1.0 : 0.0;
            if (std::abs(dot - want) > 1e-12)
                throw std::invalid_argument("hyperplane patch: tangent frame is not orthonormal to 1e-12");
        }
    }
}

}  // namespace detail

/// Atom cloud on a hypersurface whose weights approximate the surface
/// measure. `resolution` is a per-axis density: the circle in n=2 gets
/// `resolution` nodes, the sphere in n=3 gets resolution^2 golden-angle
/// spiral nodes, patches get a midpoint grid with `resolution` cells per
/// parameter axis. Total mass converges to the surface area.
inline DiscreteMeasure sample_hypersurface(const SurfaceSpec& spec, int resolution) {
    if (resolution < 2) throw std::invalid_argument("sample_hypersurface: resolution must be >= 2");
    const int n = spec.dim.n();

    if (const auto* sph = std::get_if<SphereSurface>(&spec.kind)) {
        if (!(sph->radius > 0.0)) throw std::invalid_argument("sample_hypersurface: sphere radius must be > 0");
        require_dimension(sph->center, spec.dim, "sample_hypersurface");
        const double R = sph->radius;
        std::vector<Atom> atoms;
        double spacing = 0.0;
        if (n == 2) {
            const double w = 2.0 * std::numbers::pi * R / resolution;
            atoms.reserve(resolution);
            for (int k = 0; k < resolution; ++k) {
                const double th = 2.0 * std::numbers::pi * (k + 0.5) / resolution;
                atoms.push_back({{sph->center[0] + R * std::cos(th), sph->center[1] + R * std::sin(th)}, w});
            }
            spacing = 2.0 * std::numbers::pi * R / resolution;
        } else if (n == 3) {
            const long long N = static_cast<long long>(resolution) * resolution;
            const double w = 4.0 * std::numbers::pi * R * R / static_cast<double>(N);
            atoms.reserve(static_cast<std::size_t>(N));
            for (long long k = 0; k < N; ++k) {
                const double z = 1.0 - 2.0 * (k + 0.5) / static_cast<double>(N);
                const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
                const double phi = detail::kGoldenAngle * static_cast<double>(k);
                atoms.push_back({{sph->center[0] + R * rho * std::cos(phi),
                                  sph->center[1] + R * rho * std::sin(phi),
                                  sph->center[2] + R * z},
                                 w});
            }
            spacing = std::sqrt(4.0 * std::numbers::pi * R * R / static_cast<double>(N));
        } else {
            throw std::invalid_argument("sample_hypersurface: sphere sampling supports n = 2 and n = 3");
        }
        return DiscreteMeasure(spec.dim, std::move(atoms),
                               "sphere(R=" + std::to_string(R) + ", n=" + std::to_string(n) + ")",
                               DiscreteMeasure::kResolutionSafetyFactor * spacing);
    }

    if (const auto* pl = std::get_if<HyperplanePatch>(&spec.kind)) {
        if (!(pl->extent > 0.0)) throw std::invalid_argument("sample_hypersurface: patch extent must be > 0");
        require_dimension(pl->base, spec.dim, "sample_hypersurface");
        detail::check_orthonormal(pl->frame, n);
        const int d = n - 1;
        const double h = 2.0 * pl->extent / resolution;
        const double w = std::pow(h, d);
        std::vector<Atom> atoms;
        std::vector<int> ix(d, 0);
        while (true) {
            Point p = pl->base;
            for (int a = 0; a < d; ++a) {
                const double t = -pl->extent + (ix[a] + 0.5) * h;
                for (int c = 0; c < n; ++c) p[c] += t * pl->frame[a][c];
            }
            atoms.push_back({std::move(p), w});
            int a = 0;
            while (a < d && ++ix[a] == resolution) ix[a++] = 0;
            if (a == d) break;
        }
        return DiscreteMeasure(spec.dim, std::move(atoms), "hyperplane-patch",
                               DiscreteMeasure::kResolutionSafetyFactor * h);
    }

    const auto& gp = std::get<GraphPatch>(spec.kind);
    if (static_cast<int>(gp.box.size()) != n - 1)
        throw std::invalid_argument("sample_hypersurface: graph patch needs an (n-1)-dimensional parameter box");
    if (!gp.height) throw std::invalid_argument("sample_hypersurface: graph patch has no height function");
    const int d = n - 1;
    std::vector<double> step(d);
    for (int a = 0; a < d; ++a) {
        if (!(gp.box[a][1] > gp.box[a][0]))
            throw std::invalid_argument("sample_hypersurface: empty parameter interval");
        step[a] = (gp.box[a][1] - gp.box[a][0]) / resolution;
    }
    double cell = 1.0;
    for (int a = 0; a < d; ++a) cell *= step[a];
    std::vector<Atom> atoms;
    std::vector<int> ix(d, 0);
    while (true) {
        std::vector<double> t(d);
        for (int a = 0; a < d; ++a) t[a] = gp.box[a][0] + (ix[a] + 0.5) * step[a];
        double grad2 = 0.0;
        for (int a = 0; a < d; ++a) {
            std::vector<double> tp = t, tm = t;
            tp[a] += 0.5 * step[a];
            tm[a] -= 0.5 * step[a];
            const double g = (gp.height(tp) - gp.height(tm)) / step[a];
            grad2 += g * g;
        }
        Point p(t.begin(), t.end());
        p.push_back(gp.height(t));
        atoms.push_back({std::move(p), cell * std::sqrt(1.0 + grad2)});
        int a = 0;
        while (a < d && ++ix[a] == resolution) ix[a++] = 0;
        if (a == d) break;
    }
    const double hmax = *std::max_element(step.begin(), step.end());
    return DiscreteMeasure(spec.dim, std::move(atoms), "graph-patch",
                           DiscreteMeasure::kResolutionSafetyFactor * hmax);
}

// ---------------------------------------------------------------------------
// Ahlfors-David generator: four-corner Cantor set
// ---------------------------------------------------------------------------

/// Four-corner Cantor measure in the plane: 4 branches with contraction 1/4,
/// dimension 1. Level L places 4^L atoms at the level-L cell centers, each
/// weighted 4^-L; the limit measure is Ahlfors-David regular with k = 1.
inline DiscreteMeasure cantor_ad_set(const Dimension& dim, double k, int level) {
    if (dim.n() != 2 || k != 1.0)
        throw std::invalid_argument(
            "cantor_ad_set: unsupported (n, k); supported generators: four-corner Cantor (n=2, k=1)");
    if (level < 1 || level > 12)
        throw std::invalid_argument("cantor_ad_set: level must be in [1, 12]");

    const std::size_t count = std::size_t{1} << (2 * level);  // 4^level
    const double side = std::pow(0.25, level);
    const double w = side * side * std::pow(4.0, level);  // 4^-level, written to stay exact
    std::vector<Atom> atoms;
    atoms.reserve(count);
    for (std::size_t code = 0; code < count; ++code) {
        double x = 0.0, y = 0.0, scale = 0.75;
        std::size_t c = code;
        for (int j = 0; j < level; ++j) {
            x += scale * static_cast<double>(c & 1);
            y += scale * static_cast<double>((c >> 1) & 1);
            c >>= 2;
            scale *= 0.25;
        }
        atoms.push_back({{x + 0.5 * side, y + 0.5 * side}, w});
    }
    // Nearest sibling centers are 3 * 4^-level apart.
    const double spacing = 3.0 * side;
    return DiscreteMeasure(dim, std::move(atoms), "four-corner-cantor(level=" + std::to_string(level) + ")",
                           DiscreteMeasure::kResolutionSafetyFactor * spacing);
}

// ---------------------------------------------------------------------------
// Densities and Ahlfors-David regularity
// ---------------------------------------------------------------------------

/// Finite-scale surrogate for the upper/lower s-densities at a point:
/// mass(B(x,r)) / (2r)^s evaluated over a declared radius schedule, with the
/// limsup/liminf estimated over the tail of the schedule. The raw ratio
/// sequence is kept so callers can assert trends instead of trusting a
/// single number.
struct DensityEstimate {
    double s = 0.0;
    Point point;
    std::vector<double> radii;   // strictly decreasing
    std::vector<double> ratios;  // mass/(2r)^s per radius
    double upper = 0.0;          // max over the schedule tail
    double lower = 0.0;          // min over the schedule tail
};

inline DensityEstimate densities(const DiscreteMeasure& mu, double s, const Point& x,
                                 const std::vector<double>& radii, double tail_fraction = 0.5) {
    if (radii.empty()) throw std::invalid_argument("densities: empty radius schedule");
    if (!(s > 0.0)) throw std::invalid_argument("densities: s must be > 0");
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw std::invalid_argument("densities: tail fraction must be in (0, 1]");
    require_dimension(x, mu.dim(), "densities");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw std::invalid_argument("densities: radii must be positive");
        if (i > 0 && !(radii[i] < radii[i - 1]))
            throw std::invalid_argument("densities: radii must be strictly decreasing");
    }
    if (radii.back() < mu.resolution_radius())
        throw std::invalid_argument("densities: smallest radius " + std::to_string(radii.back()) +
                                    " is below the measure's resolution validity radius " +
                                    std::to_string(mu.resolution_radius()));

    DensityEstimate est;
    est.s = s;
    est.point = x;
    est.radii = radii;
    est.ratios.reserve(radii.size());
    for (double r : radii) est.ratios.push_back(mu.ball_mass(x, r) / std::pow(2.0 * r, s));

    const std::size_t tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tail_fraction * radii.size())));
    const std::size_t from = radii.size() - tail;
    est.upper = *std::max_element(est.ratios.begin() + from, est.ratios.end());
    est.lower = *std::min_element(est.ratios.begin() + from, est.ratios.end());
    return est;
}

/// Two-sided ball-mass regularity certificate at dimension k.
///
/// Sampled atoms x and radii R give ratios mass(B(x,R))/R^k; the report
/// carries the tightest observed two-sided constants. At finite scale the
/// pass verdict is a trend statement: every sampled ball carries mass and
/// the log-log slope of the mean ratio against R stays near zero, i.e.
/// masses scale like R^k with bounded constants rather than drifting to 0
/// or infinity as R shrinks.
struct AdReport {
    double k = 0.0;
    double c0_lower = 0.0;  // smallest observed mass/R^k
    double c0_upper = 0.0;  // largest observed mass/R^k
    bool pass = false;
    std::size_t sampled_points = 0;
    double diameter = 0.0;
    bool sample_clamped = false;        // requested more samples than atoms
    double loglog_slope = 0.0;          // fitted d log(ratio) / d log(R)
    std::vector<double> mean_ratios;    // per-radius mean over samples
    std::vector<double> radii;
};

inline AdReport ad_regularity_check(const DiscreteMeasure& mu, double k, std::size_t sample_count,
                                    const std::vector<double>& radii, double slope_tolerance = 0.2) {
    if (!(k > 0.0)) throw std::invalid_argument("ad_regularity_check: k must be > 0");
    if (sample_count == 0) throw std::invalid_argument("ad_regularity_check: sample_count must be > 0");
    if (radii.size() < 2) throw std::invalid_argument("ad_regularity_check: need at least two radii");

    AdReport rep;
    rep.k = k;
    rep.diameter = mu.diameter();
    rep.radii = radii;
    for (double r : radii) {
        if (!(r > 0.0) || r > rep.diameter)
            throw std::invalid_argument("ad_regularity_check: radii must lie in (0, diameter]");
        if (r < mu.resolution_radius())
            throw std::invalid_argument("ad_regularity_check: radius " + std::to_string(r) +
                                        " is below the resolution validity radius");
    }

    const std::size_t natoms = mu.atoms().size();
    if (sample_count > natoms) {
        sample_count = natoms;
        rep.sample_clamped = true;
    }
    rep.sampled_points = sample_count;

    rep.c0_lower = pos_infinity();
    rep.c0_upper = 0.0;
    rep.mean_ratios.assign(radii.size(), 0.0);
    const std::size_t stride = natoms / sample_count;
    for (std::size_t s = 0; s < sample_count; ++s) {
        const Point& x = mu.atoms()[s * stride].p;
        for (std::size_t j = 0; j < radii.size(); ++j) {
            const double ratio = mu.ball_mass(x, radii[j]) / std::pow(radii[j], k);
            rep.c0_lower = std::min(rep.c0_lower, ratio);
            rep.c0_upper = std::max(rep.c0_upper, ratio);
            rep.mean_ratios[j] += ratio / static_cast<double>(sample_count);
        }
    }

    bool any_empty = !(rep.c0_lower > 0.0);
    // Least-squares slope of log(mean ratio) against log(R).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(radii.size());
    bool slope_defined = !any_empty;
    if (slope_defined) {
        for (std::size_t j = 0; j < radii.size(); ++j) {
            if (!(rep.mean_ratios[j] > 0.0)) { slope_defined = false; break; }
            const double lx = std::log(radii[j]);
            const double ly = std::log(rep.mean_ratios[j]);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        }
    }
    if (slope_defined) rep.loglog_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.pass = slope_defined && std::abs(rep.loglog_slope) <= slope_tolerance;
    return rep;
}

}  // namespace mvlab
