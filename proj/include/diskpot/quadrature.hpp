#pragma once

// Quadrature rules for the circle and the disk.
//
//   CircleRule        uniform trapezoid on [0, 2pi), spectrally accurate for
//                     smooth periodic data
//   DiskRule          polar product rule (trapezoid x Gauss-Legendre in r)
//   integrate_disk_singular
//                     polar rule centred on a marked point, which absorbs a
//                     logarithmic singularity there into the Jacobian rho

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "kernels.hpp"

namespace diskpot {

/// A quadrature or search did not reach the requested accuracy.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, double achieved_error)
        : std::runtime_error(what + " (achieved error estimate " + std::to_string(achieved_error) + ")"),
          achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

/// Neumaier-compensated accumulator.
template <class T>
class CompensatedSum {
public:
    void add(T x) {
        if constexpr (std::is_floating_point_v<T>) {
            add_real(sum_, comp_, x);
        } else {
            double sr = sum_.real(), cr = comp_.real();
            double si = sum_.imag(), ci = comp_.imag();
            add_real(sr, cr, x.real());
            add_real(si, ci, x.imag());
            sum_ = T(sr, si);
            comp_ = T(cr, ci);
        }
    }

    T value() const { return sum_ + comp_; }

private:
    static void add_real(double& sum, double& comp, double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }

    T sum_{};
    T comp_{};
};

// ---------------------------------------------------------------------------
// Circle

/// Uniform periodic trapezoid rule: nodes 2 pi j / N, weights 2 pi / N.
class CircleRule {
public:
    static constexpr std::size_t default_nodes = 1024;

    explicit CircleRule(std::size_t node_count = default_nodes) : n_(node_count) {
        if (n_ == 0) {
            throw std::invalid_argument("CircleRule: node count must be positive");
        }
    }

    std::size_t size() const noexcept { return n_; }
    double node(std::size_t j) const { return two_pi * static_cast<double>(j) / static_cast<double>(n_); }
    double weight() const noexcept { return two_pi / static_cast<double>(n_); }

    std::vector<double> nodes() const {
        std::vector<double> out(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            out[j] = node(j);
        }
        return out;
    }

private:
    std::size_t n_;
};

/// (2 pi / N) * sum of samples taken at the nodes of `rule`.
template <class T>
T integrate_circle(const CircleRule& rule, std::span<const T> samples) {
    if (samples.size() != rule.size()) {
        throw std::invalid_argument("integrate_circle: expected " + std::to_string(rule.size()) +
                                    " samples, got " + std::to_string(samples.size()));
    }
    CompensatedSum<T> acc;
    for (const T& s : samples) {
        acc.add(s);
    }
    return acc.value() * rule.weight();
}

template <class T>
T integrate_circle(const CircleRule& rule, const std::vector<T>& samples) {
    return integrate_circle(rule, std::span<const T>(samples));
}

// ---------------------------------------------------------------------------
// One-dimensional rules

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
inline Rule1D gauss_legendre(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("gauss_legendre: need at least one node");
    }
    Rule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const auto nd = static_cast<double>(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const auto kd = static_cast<double>(k);
                const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
                p0 = p1;
                p1 = p2;
            }
            dp = nd * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const auto kd = static_cast<double>(k);
            const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
            p0 = p1;
            p1 = p2;
        }
        dp = nd * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = 0.0;
    }
    return rule;
}

/// Tanh-sinh (double exponential) rule on [0, 1] with step h in the
/// transformed variable. Endpoint singularities of logarithmic type are
/// integrated with near-exponential convergence as h is halved.
/// `complements` holds 1 - t for each node, computed without cancellation.
struct TanhSinhRule {
    std::vector<double> nodes;
    std::vector<double> complements;
    std::vector<double> weights;

    explicit TanhSinhRule(double h, double tau_max = 3.2) {
        if (!(h > 0.0)) {
            throw std::invalid_argument("TanhSinhRule: step must be positive");
        }
        const auto k_max = static_cast<long>(std::ceil(tau_max / h));
        for (long k = -k_max; k <= k_max; ++k) {
            const double tau = static_cast<double>(k) * h;
            const double u = 0.5 * pi * std::sinh(tau);
            const double e = std::exp(-2.0 * std::abs(u));
            // t = 1 / (1 + exp(-2u)),  1 - t = 1 / (1 + exp(2u))
            const double small = e / (1.0 + e);
            const double large = 1.0 / (1.0 + e);
            const double t = u >= 0.0 ? large : small;
            const double c = u >= 0.0 ? small : large;
            // dt / dtau = (pi / 4) cosh(tau) / cosh^2(u), 1 / cosh^2(u) = 4e / (1 + e)^2
            const double sech_sq = 4.0 * e / ((1.0 + e) * (1.0 + e));
            nodes.push_back(t);
            complements.push_back(c);
            weights.push_back(h * 0.25 * pi * std::cosh(tau) * sech_sq);
        }
    }

    std::size_t size() const noexcept { return nodes.size(); }
};

// ---------------------------------------------------------------------------
// Disk

/// Polar product rule on the unit disk: `angular_count` uniform angles times
/// `radial_count` Gauss-Legendre radii on [0, 1] with the Jacobian r folded
/// into the weights. Total weight is pi.
class DiskRule {
public:
    DiskRule(std::size_t angular_count, std::size_t radial_count)
        : angular_(angular_count) {
        if (angular_count == 0 || radial_count == 0) {
            throw std::invalid_argument("DiskRule: node counts must be positive");
        }
        const Rule1D gl = gauss_legendre(radial_count);
        radii_.resize(radial_count);
        radial_weights_.resize(radial_count);
        for (std::size_t i = 0; i < radial_count; ++i) {
            radii_[i] = 0.5 * (gl.nodes[i] + 1.0);
            radial_weights_[i] = 0.5 * gl.weights[i] * radii_[i];
        }
    }

    std::size_t angular_count() const noexcept { return angular_.size(); }
    std::size_t radial_count() const noexcept { return radii_.size(); }
    std::span<const double> radii() const noexcept { return radii_; }

    double total_weight() const {
        CompensatedSum<double> acc;
        for (double w : radial_weights_) {
            acc.add(w);
        }
        return acc.value() * two_pi;
    }

    template <class F>
    double integrate(F&& f) const {
        CompensatedSum<double> acc;
        for (std::size_t j = 0; j < angular_.size(); ++j) {
            const double theta = angular_.node(j);
            const double c = std::cos(theta);
            const double s = std::sin(theta);
            double ring = 0.0;
            for (std::size_t i = 0; i < radii_.size(); ++i) {
                ring += radial_weights_[i] * f(DiskPoint(radii_[i] * c, radii_[i] * s));
            }
            acc.add(ring);
        }
        return acc.value() * angular_.weight();
    }

private:
    CircleRule angular_;
    std::vector<double> radii_;
    std::vector<double> radial_weights_;
};

struct DiskIntegral {
    double value = 0.0;
    double error_estimate = 0.0;
    int level = 0;
    std::size_t evaluations = 0;
};

struct DiskQuadratureOptions {
    /// Angular node count of the first level; 0 picks it from the distance
    /// of the singular point to the circle.
    std::size_t initial_angular = 0;
    int max_level = 7;
    std::size_t max_evaluations = 40'000'000;
};

namespace detail {

/// Angular resolution for a polar rule centred at a point of modulus r.
/// The boundary distance R(alpha) is analytic in a strip of half-width
/// asinh(sqrt(1 - r^2) / r) around the real axis.
inline std::size_t singular_initial_angular(double r) {
    if (r < 1e-8) {
        return 16;
    }
    const double width = std::asinh(std::sqrt((1.0 - r) * (1.0 + r)) / r);
    const double m = std::ceil(24.0 / width);
    auto count = static_cast<std::size_t>(std::max(16.0, m));
    return (count + 7) / 8 * 8;
}

} // namespace detail

/// Area integral over the unit disk of an integrand with at worst a
/// logarithmic singularity at `singular`.
///
/// Uses polar coordinates w = s + rho e^{i alpha} centred on the singular
/// point: trapezoid in alpha, tanh-sinh in rho / R(alpha) where R(alpha) is
/// the distance to the circle. Each level doubles the angular count and
/// halves the tanh-sinh step; the error estimate is the difference between
/// consecutive levels. Nodes closer than 1e-14 to the singular point, or
/// rounding onto the circle, are dropped (their weight is below 1e-27).
template <class F>
DiskIntegral integrate_disk_singular(F&& integrand, const DiskPoint& singular, double tol,
                                     const DiskQuadratureOptions& options = {}) {
    detail::require_interior(singular, "integrate_disk_singular");
    if (!(tol > 0.0)) {
        throw std::invalid_argument("integrate_disk_singular: tolerance must be positive");
    }
    const double s_re = singular.re;
    const double s_im = singular.im;
    const double q = detail::one_minus_modsq(singular);
    const std::size_t m0 = options.initial_angular != 0 ? options.initial_angular
                                                        : detail::singular_initial_angular(singular.modulus());

    DiskIntegral out;
    double previous = std::numeric_limits<double>::quiet_NaN();
    double error = std::numeric_limits<double>::infinity();
    for (int level = 0; level <= options.max_level; ++level) {
        const std::size_t m = m0 << level;
        const TanhSinhRule radial(0.25 / static_cast<double>(1 << level));
        const std::size_t cost = m * radial.size();
        if (out.evaluations + cost > options.max_evaluations) {
            break;
        }
        out.evaluations += cost;

        CompensatedSum<double> acc;
        const double dalpha = two_pi / static_cast<double>(m);
        for (std::size_t j = 0; j < m; ++j) {
            const double alpha = dalpha * (static_cast<double>(j) + 0.5);
            const double ca = std::cos(alpha);
            const double sa = std::sin(alpha);
            const double p = s_re * ca + s_im * sa;
            // Positive root of rho^2 + 2 p rho - q = 0.
            const double root = std::sqrt(p * p + q);
            const double reach = p >= 0.0 ? q / (p + root) : root - p;
            double ray = 0.0;
            for (std::size_t k = 0; k < radial.size(); ++k) {
                const double rho = reach * radial.nodes[k];
                if (rho < 1e-14) {
                    continue;
                }
                const DiskPoint w(s_re + rho * ca, s_im + rho * sa);
                if (!(w.modulus_sq() < 1.0)) {
                    continue;
                }
                ray += radial.weights[k] * rho * integrand(w);
            }
            acc.add(ray * reach);
        }
        const double value = acc.value() * dalpha;
        if (level > 0) {
            error = std::abs(value - previous);
            if (error <= tol) {
                out.value = value;
                out.error_estimate = error;
                out.level = level;
                return out;
            }
        }
        previous = value;
    }
    throw NonConvergence("integrate_disk_singular: refinement cap reached", error);
}

} // namespace diskpot
