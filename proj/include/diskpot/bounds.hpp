#pragma once

// Sharp envelopes for bounded harmonic functions and for solutions of
// |Laplacian f| <= c on the unit disk.
//
// With a = tan(b pi / 4):
//   A_b(r) = (1 - r^2)/(1 + r^2) b + (4/pi) atan r
//   B_b(r) = (1 - r^2)/(1 + r^2) b - (4/pi) atan r
//   M_b(r) = (4/pi) atan((a + r) / (1 + a r))
//   m_b(r) = M_b(-r) = (4/pi) atan((a - r) / (1 - a r))
//
// All parameters are validated; b must lie in the open interval (-1, 1).

#include <cmath>
#include <string>
#include <utility>

#include "kernels.hpp"

namespace diskpot {

namespace detail {

inline void require_center(double b, const char* what) {
    if (!(b > -1.0 && b < 1.0)) {
        throw DomainError(std::string(what) + ": b must lie in the open interval (-1, 1)");
    }
}

inline void require_radius(double r, const char* what) {
    if (!(r >= 0.0 && r <= 1.0)) {
        throw DomainError(std::string(what) + ": r must lie in [0, 1]");
    }
}

inline constexpr double four_over_pi = 4.0 / pi;

} // namespace detail

inline double coeff_a(double b) {
    detail::require_center(b, "coeff_a");
    return std::tan(b * pi / 4.0);
}

inline double envelope_M(double b, double r) {
    detail::require_radius(r, "envelope_M");
    const double a = coeff_a(b);
    return detail::four_over_pi * std::atan((a + r) / (1.0 + a * r));
}

inline double envelope_m(double b, double r) {
    detail::require_radius(r, "envelope_m");
    const double a = coeff_a(b);
    return detail::four_over_pi * std::atan((a - r) / (1.0 - a * r));
}

inline double envelope_A(double b, double r) {
    detail::require_center(b, "envelope_A");
    detail::require_radius(r, "envelope_A");
    return weight_A(r) * b + detail::four_over_pi * std::atan(r);
}

inline double envelope_B(double b, double r) {
    detail::require_center(b, "envelope_B");
    detail::require_radius(r, "envelope_B");
    return weight_A(r) * b - detail::four_over_pi * std::atan(r);
}

/// d/dr M_b(r) = (4/pi) (1 - a^2) / ((a^2 + 1) r^2 + 4 a r + a^2 + 1).
inline double envelope_M_prime(double b, double r) {
    detail::require_radius(r, "envelope_M_prime");
    const double a = coeff_a(b);
    const double a2 = a * a;
    return detail::four_over_pi * (1.0 - a2) / ((a2 + 1.0) * r * r + 4.0 * a * r + a2 + 1.0);
}

enum class BoundSide { upper, lower };

/// Envelope for real f with Laplacian f >= -c (upper) or <= c (lower), where
/// b = P[f*](0) and K >= sup |P[f*]|:
///   upper: K M_{b/K}(r) + (c/4)(1 - r^2)
///   lower: K m_{b/K}(r) - (c/4)(1 - r^2)
inline double bound_poisson_rhs(double K, double b, double c, double r, BoundSide side) {
    if (!(K > 0.0)) {
        throw DomainError("bound_poisson_rhs: K must be positive");
    }
    if (!(std::abs(b) < K)) {
        throw DomainError("bound_poisson_rhs: |b| must be smaller than K");
    }
    if (!(c >= 0.0)) {
        throw DomainError("bound_poisson_rhs: c must be non-negative");
    }
    detail::require_radius(r, "bound_poisson_rhs");
    const double source_term = 0.25 * c * (1.0 - r) * (1.0 + r);
    return side == BoundSide::upper ? K * envelope_M(b / K, r) + source_term
                                    : K * envelope_m(b / K, r) - source_term;
}

/// Admissible radius c/4 for b = P[f*](0) when f(0) = 0 and |Laplacian f| <= c.
inline double bound_center_estimate(double c) {
    if (!(c >= 0.0)) {
        throw DomainError("bound_center_estimate: c must be non-negative");
    }
    return 0.25 * c;
}

enum class SlopeVariant { exact, linearized, zero_center };

/// Lower bounds for the boundary slope f_x(1) (or the radial difference
/// quotient at a point where |f| reaches 1):
///   exact        (2/pi) tan(pi (1 - b) / 4) - c/2  =  M_b'(1) - c/2
///   linearized   -b + 2/pi - c/2
///   zero_center  -(3/4) c + 2/pi
inline double boundary_slope_bound(double b, double c, SlopeVariant variant) {
    detail::require_center(b, "boundary_slope_bound");
    if (!(c >= 0.0)) {
        throw DomainError("boundary_slope_bound: c must be non-negative");
    }
    constexpr double two_over_pi = 2.0 / pi;
    switch (variant) {
    case SlopeVariant::exact:
        return two_over_pi * std::tan(0.25 * pi * (1.0 - b)) - 0.5 * c;
    case SlopeVariant::linearized:
        return -b + two_over_pi - 0.5 * c;
    case SlopeVariant::zero_center:
        return -0.75 * c + two_over_pi;
    }
    return 0.0;
}

/// (A_b(r) - M_b(r), m_b(r) - B_b(r)); both components are non-negative.
inline std::pair<double, double> ordering_gap(double b, double r) {
    return {envelope_A(b, r) - envelope_M(b, r), envelope_m(b, r) - envelope_B(b, r)};
}

} // namespace diskpot
