#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mvlab/core.hpp"

namespace mvlab {

/// Fundamental-solution profile: -log r in dimension 2, r^(2-n) above.
/// Positive and strictly decreasing on (0,1); the singularity at r = 0 is a
/// domain error here, callers decide how to treat coincident points.
inline double kernel_g(const Dimension& dim, double r) {
    if (!(r > 0.0)) throw std::domain_error("kernel_g: r must be > 0, got " + std::to_string(r));
    if (dim.n() == 2) return -std::log(r);
    return std::pow(r, 2.0 - dim.n());
}

/// Inverse of kernel_g: e^(-t) in dimension 2, t^(-1/(n-2)) above.
inline double kernel_g_inv(const Dimension& dim, double t) {
    if (dim.n() == 2) return std::exp(-t);
    if (!(t > 0.0)) throw std::domain_error("kernel_g_inv: t must be > 0 for n > 2, got " + std::to_string(t));
    return std::pow(t, -1.0 / (dim.n() - 2));
}

/// Gamma(n/2) for integer n >= 1 by the half-integer recurrence
/// Gamma(z+1) = z Gamma(z) starting from Gamma(1) = 1, Gamma(1/2) = sqrt(pi).
inline double gamma_half_integer(int twice_z) {
    if (twice_z < 1) throw std::invalid_argument("gamma_half_integer: argument must be >= 1/2");
    double z, g;
    if (twice_z % 2 == 0) {
        z = 1.0;
        g = 1.0;
    } else {
        z = 0.5;
        g = std::sqrt(std::numbers::pi);
    }
    while (2.0 * z < twice_z) {
        g *= z;
        z += 1.0;
    }
    return g;
}

/// Surface area of the unit sphere in R^n: 2 pi^(n/2) / Gamma(n/2).
inline double unit_sphere_area(const Dimension& dim) {
    const int n = dim.n();
    return 2.0 * std::pow(std::numbers::pi, n / 2.0) / gamma_half_integer(n);
}

/// Prefactor max(1, n-2) * sigma(unit sphere) of the potential representation.
inline double riesz_normalization(const Dimension& dim) {
    return std::max(1, dim.n() - 2) * unit_sphere_area(dim);
}

}  // namespace mvlab
