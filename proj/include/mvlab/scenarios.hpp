#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mvlab/admissible.hpp"
#include "mvlab/core.hpp"
#include "mvlab/measure.hpp"
#include "mvlab/potential.hpp"

namespace mvlab::scenarios {

/// Uniform midpoint discretization of the x-axis segment [-L, L] in the
/// plane, total mass 2L. An even atom count leaves no atom at the origin.
inline DiscreteMeasure segment_measure(double half_length, std::size_t atom_count) {
    if (!(half_length > 0.0)) throw std::invalid_argument("segment_measure: half_length must be > 0");
    if (atom_count < 2) throw std::invalid_argument("segment_measure: need at least 2 atoms");
    const double step = 2.0 * half_length / static_cast<double>(atom_count);
    std::vector<Atom> atoms;
    atoms.reserve(atom_count);
    for (std::size_t j = 0; j < atom_count; ++j)
        atoms.push_back({{-half_length + (static_cast<double>(j) + 0.5) * step, 0.0}, step});
    return DiscreteMeasure(Dimension(2), std::move(atoms),
                           "segment(L=" + std::to_string(half_length) + ")",
                           DiscreteMeasure::kResolutionSafetyFactor * step);
}

inline DiscreteMeasure unit_circle_measure(int resolution) {
    return sample_hypersurface({Dimension(2), SphereSurface{{0.0, 0.0}, 1.0}}, resolution);
}

inline DiscreteMeasure unit_sphere_measure(int resolution) {
    return sample_hypersurface({Dimension(3), SphereSurface{{0.0, 0.0, 0.0}, 1.0}}, resolution);
}

// ---------------------------------------------------------------------------
// Shipped Riesz functions: the named functions every whole-artifact test
// exercises (sub-mean certification, convergence studies, comparisons).
// ---------------------------------------------------------------------------

/// Pure harmonic saddle x^2 - y^2 in the plane; no potential part.
inline RieszFunction saddle_harmonic() {
    return RieszFunction(Dimension(2), {}, HarmonicSpec::planar_power(2, HarmonicPlanarPower::Part::re), 4.0);
}

/// One logarithmic atom of mass 2 pi at the origin: u(x) = log|x|.
inline RieszFunction log_atom() {
    return RieszFunction(Dimension(2), {{{0.0, 0.0}, 2.0 * std::numbers::pi}}, HarmonicSpec::zero(), 4.0);
}

/// Two planar atoms plus a linear tilt.
inline RieszFunction two_atom_plane() {
    return RieszFunction(Dimension(2), {{{0.3, 0.0}, 2.0}, {{-0.5, 0.6}, 1.5}},
                         HarmonicSpec::linear({0.5, -0.2}), 4.0);
}

/// Three nu atoms placed strictly inside/outside the unit sphere in R^3
/// (every atom at distance >= 0.75 from the sphere), with a gentle harmonic
/// tilt; the probe function of the sphere-surface convergence scenario.
inline RieszFunction sphere_probe() {
    HarmonicSpec h;
    h.terms.push_back(HarmonicLinear{{0.5, -0.25, 1.0}});
    h.terms.push_back(HarmonicConstant{2.0});
    return RieszFunction(Dimension(3),
                         {{{0.2, 0.1, -0.1}, 3.0}, {{1.8, 0.3, 0.2}, 5.0}, {{-0.4, -1.6, 0.9}, 4.0}},
                         std::move(h), 4.0);
}

/// Plane function finite on the unit square (nu atoms kept at distance >= 1
/// from it); the probe of the Cantor-set convergence scenario.
inline RieszFunction cantor_probe() {
    HarmonicSpec h;
    h.terms.push_back(HarmonicLinear{{1.0, -0.5}});
    h.terms.push_back(HarmonicConstant{2.0});
    return RieszFunction(Dimension(2), {{{2.0, 1.5}, 6.0}, {{-1.0, 0.8}, 3.0}, {{0.5, -2.2}, 4.0}},
                         std::move(h), 6.0);
}

inline std::vector<std::pair<std::string, RieszFunction>> shipped_riesz_functions() {
    std::vector<std::pair<std::string, RieszFunction>> out;
    out.emplace_back("saddle-harmonic", saddle_harmonic());
    out.emplace_back("log-atom", log_atom());
    out.emplace_back("two-atom-plane", two_atom_plane());
    out.emplace_back("sphere-probe", sphere_probe());
    out.emplace_back("cantor-probe", cantor_probe());
    return out;
}

// ---------------------------------------------------------------------------
// Shipped gauges: the membership-check exemplars around the k > n-2
// threshold, including the divergent boundary case k = n-2.
// ---------------------------------------------------------------------------

inline std::vector<std::pair<std::string, GaugeFunction>> shipped_gauges(const Dimension& dim) {
    const double n = dim.n();
    std::vector<std::pair<std::string, GaugeFunction>> out;
    out.emplace_back("power(n-1.5)", GaugeFunction::power(n - 1.5));
    out.emplace_back("power(n-1)", GaugeFunction::power(n - 1.0));
    out.emplace_back("power(n)", GaugeFunction::power(n));
    out.emplace_back("power(n-2)", GaugeFunction::power(n - 2.0));
    out.emplace_back("power-log(n-1)", GaugeFunction::power_log(n - 1.0));
    out.emplace_back("scaled(3, power(n-1))", GaugeFunction::scaled(3.0, GaugeFunction::power(n - 1.0)));
    out.emplace_back("power(n-1)+power(n)",
                     GaugeFunction::sum(GaugeFunction::power(n - 1.0), GaugeFunction::power(n)));
    // Log-spaced samples of r^(n-0.5); the log-log interpolant reproduces the
    // power law exactly.
    std::vector<double> r, h;
    for (int j = 0; j <= 60; ++j) {
        const double rv = 1e-6 * std::pow(10.0, 6.0 * j / 60.0);
        r.push_back(rv);
        h.push_back(std::pow(rv, n - 0.5));
    }
    out.emplace_back("table~power(n-0.5)", GaugeFunction::table(std::move(r), std::move(h)));
    return out;
}

}  // namespace mvlab::scenarios
