#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvlab {

/// Coordinate vector in R^n. All geometry flows through it.
using Point = std::vector<double>;

/// Ambient dimension n >= 2. Constructed once, validated once.
class Dimension {
public:
    explicit Dimension(int n) : n_(n) {
        if (n < 2) throw std::invalid_argument("Dimension: n must be >= 2, got " + std::to_string(n));
    }
    int n() const { return n_; }
    friend bool operator==(Dimension a, Dimension b) { return a.n_ == b.n_; }

private:
    int n_;
};

// Extended reals are IEEE doubles: -inf is the "value is minus infinity"
// sentinel (potentials at their atoms), +inf marks divergent integrals.
// IEEE arithmetic already gives (-inf) + finite = -inf and max(-inf, a) = a.
inline double neg_infinity() { return -std::numeric_limits<double>::infinity(); }
inline double pos_infinity() { return std::numeric_limits<double>::infinity(); }
inline bool is_neg_infinity(double x) { return std::isinf(x) && x < 0; }
inline bool is_pos_infinity(double x) { return std::isinf(x) && x > 0; }

inline double squared_distance(const Point& a, const Point& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("squared_distance: dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double distance(const Point& a, const Point& b) { return std::sqrt(squared_distance(a, b)); }

inline double norm(const Point& a) {
    double s = 0.0;
    for (double c : a) s += c * c;
    return std::sqrt(s);
}

inline void require_dimension(const Point& p, const Dimension& dim, const char* where) {
    if (static_cast<int>(p.size()) != dim.n())
        throw std::invalid_argument(std::string(where) + ": point has " + std::to_string(p.size()) +
                                    " coordinates, expected " + std::to_string(dim.n()));
}

}  // namespace mvlab
