#pragma once

// Closed-form kernels of potential theory on the unit disk: the Poisson
// kernel P(z, e^{it}), the Green function G(z, w) and the weight
// A(z) = (1 - |z|^2) / (1 + |z|^2).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace diskpot {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Argument outside the domain of an operation (e.g. a point off the open disk).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A point of the complex plane used as an argument on the unit disk.
struct DiskPoint {
    double re = 0.0;
    double im = 0.0;

    constexpr DiskPoint() = default;
    constexpr DiskPoint(double re_, double im_ = 0.0) : re(re_), im(im_) {}
    explicit DiskPoint(std::complex<double> z) : re(z.real()), im(z.imag()) {}

    static DiskPoint polar(double r, double theta) {
        return DiskPoint(r * std::cos(theta), r * std::sin(theta));
    }

    std::complex<double> complex() const { return {re, im}; }
    double modulus() const { return std::hypot(re, im); }
    double modulus_sq() const { return re * re + im * im; }
    double arg() const { return std::atan2(im, re); }

    friend bool operator==(const DiskPoint&, const DiskPoint&) = default;
};

/// A point e^{i theta} of the unit circle, carried by its angle.
struct CirclePoint {
    double theta = 0.0;

    std::complex<double> complex() const { return std::polar(1.0, theta); }
};

namespace detail {

inline void require_interior(const DiskPoint& z, const char* what) {
    if (!(z.modulus_sq() < 1.0)) {
        throw DomainError(std::string(what) + ": point must lie in the open unit disk");
    }
}

/// 1 - |z|^2 computed as (1 - r)(1 + r).
inline double one_minus_modsq(const DiskPoint& z) {
    const double r = z.modulus();
    return (1.0 - r) * (1.0 + r);
}

} // namespace detail

/// Poisson kernel (1 - |z|^2) / |z - e^{i theta}|^2 for |z| < 1.
///
/// The denominator is evaluated as (1 - r)^2 + 4 r sin^2((theta - arg z) / 2),
/// which has no cancellation when z approaches e^{i theta}.
inline double poisson_kernel(const DiskPoint& z, double theta) {
    detail::require_interior(z, "poisson_kernel");
    const double r = z.modulus();
    const double s = std::sin(0.5 * (theta - z.arg()));
    const double gap = 1.0 - r;
    return gap * (1.0 + r) / (gap * gap + 4.0 * r * s * s);
}

/// Points closer than this are treated as coincident by green().
inline constexpr double green_min_separation = 1e-15;

/// Green function of the unit disk, (1/2pi) log |(1 - z conj(w)) / (z - w)|.
///
/// Uses |1 - z conj(w)|^2 = |z - w|^2 + (1 - |z|^2)(1 - |w|^2), so that
/// G = (1/4pi) log1p((1 - |z|^2)(1 - |w|^2) / |z - w|^2). The argument of
/// log1p is positive, and small near the boundary where G itself is small.
inline double green(const DiskPoint& z, const DiskPoint& w) {
    detail::require_interior(z, "green");
    detail::require_interior(w, "green");
    const double dx = z.re - w.re;
    const double dy = z.im - w.im;
    const double dist_sq = dx * dx + dy * dy;
    if (!(dist_sq >= green_min_separation * green_min_separation)) {
        throw DomainError("green: arguments coincide (logarithmic singularity)");
    }
    const double q = detail::one_minus_modsq(z) * detail::one_minus_modsq(w) / dist_sq;
    return std::log1p(q) / (4.0 * pi);
}

/// A(r) = (1 - r^2) / (1 + r^2), 0 <= r <= 1.
inline double weight_A(double r) {
    if (!(r >= 0.0 && r <= 1.0 + 1e-12)) {
        throw DomainError("weight_A: radius must lie in [0, 1]");
    }
    r = std::min(r, 1.0);
    return (1.0 - r) * (1.0 + r) / (1.0 + r * r);
}

inline double weight_A(const DiskPoint& z) { return weight_A(z.modulus()); }

} // namespace diskpot
