#pragma once

// Harmonic extension P[phi], Green potential G[g] and the Poisson-equation
// solution f = P[phi] - G[g] on the unit disk, together with the
// finite-difference probes used to verify them.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kernels.hpp"
#include "quadrature.hpp"

namespace diskpot {

namespace detail {

inline double wrap_angle(double theta) {
    double t = std::fmod(theta, two_pi);
    if (t < 0.0) {
        t += two_pi;
    }
    return t;
}

/// Maximum of a smooth 2pi-periodic function whose Fourier content is
/// limited to |k| <= bandwidth. A grid of 32 samples per unit of bandwidth
/// isolates every local maximum; each is then polished by golden-section
/// search inside its grid bracket.
template <class F>
double periodic_maximum(F&& f, std::size_t bandwidth) {
    const std::size_t m = std::max<std::size_t>(64, 32 * bandwidth);
    const double step = two_pi / static_cast<double>(m);
    std::vector<double> values(m);
    for (std::size_t j = 0; j < m; ++j) {
        values[j] = f(step * static_cast<double>(j));
    }
    double best = *std::max_element(values.begin(), values.end());
    constexpr double inv_phi = 0.6180339887498949;
    for (std::size_t j = 0; j < m; ++j) {
        const double prev = values[(j + m - 1) % m];
        const double next = values[(j + 1) % m];
        if (values[j] < prev || values[j] < next) {
            continue;
        }
        double lo = step * (static_cast<double>(j) - 1.0);
        double hi = step * (static_cast<double>(j) + 1.0);
        double x1 = hi - inv_phi * (hi - lo);
        double x2 = lo + inv_phi * (hi - lo);
        double f1 = f(x1);
        double f2 = f(x2);
        while (hi - lo > 1e-13) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = f(x1);
            }
        }
        best = std::max({best, f1, f2});
    }
    return best;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Boundary data

/// Real-valued data on the unit circle with a known supremum.
///
/// Kinds:
///   constant   phi = v
///   trig       phi = a0 + sum_k (a_k cos k theta + b_k sin k theta)
///   step       +1 on the open arc (theta1, theta2), -1 elsewhere
///   sampled    values on a uniform grid theta_j = 2 pi j / N, linearly
///              interpolated between nodes
class BoundaryFunction {
public:
    enum class Kind { constant, trig, step, sampled };

    BoundaryFunction() : BoundaryFunction(constant(0.0)) {}

    static BoundaryFunction constant(double v) {
        BoundaryFunction f(Kind::constant);
        f.value_ = v;
        f.sup_norm_ = std::abs(v);
        return f;
    }

    /// `cos_coeffs` = {a0, a1, ..., an}; `sin_coeffs` = {b1, ..., bn}.
    static BoundaryFunction trig(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs = {}) {
        BoundaryFunction f(Kind::trig);
        const std::size_t n = std::max(cos_coeffs.empty() ? 0 : cos_coeffs.size() - 1, sin_coeffs.size());
        f.coeffs_.assign(n + 1, {0.0, 0.0});
        for (std::size_t k = 0; k < cos_coeffs.size(); ++k) {
            f.coeffs_[k] += cos_coeffs[k];
        }
        // a cos + b sin = Re((a - i b) e^{ik theta})
        for (std::size_t k = 0; k < sin_coeffs.size(); ++k) {
            f.coeffs_[k + 1] -= std::complex<double>(0.0, sin_coeffs[k]);
        }
        f.sup_norm_ = f.trig_supremum();
        return f;
    }

    static BoundaryFunction cosine(int k) { return harmonic(k, false); }
    static BoundaryFunction sine(int k) { return harmonic(k, true); }

    /// +1 on (theta1, theta2), -1 on the complementary arc; 0 < theta2 - theta1 < 2 pi.
    static BoundaryFunction step_arc(double theta1, double theta2) {
        const double length = theta2 - theta1;
        if (!(length > 0.0 && length < two_pi)) {
            throw DomainError("step boundary: arc length must lie in (0, 2pi)");
        }
        BoundaryFunction f(Kind::step);
        f.theta1_ = theta1;
        f.theta2_ = theta2;
        f.sup_norm_ = 1.0;
        return f;
    }

    /// +1 on the arc of length pi (1 + b) centred at `rotation`, -1 elsewhere.
    /// The mean value is b.
    static BoundaryFunction step(double b, double rotation) {
        if (!(b > -1.0 && b < 1.0)) {
            throw DomainError("step boundary: b must lie in (-1, 1)");
        }
        const double half = 0.5 * pi * (1.0 + b);
        return step_arc(rotation - half, rotation + half);
    }

    static BoundaryFunction sampled(std::vector<double> values) {
        if (values.empty()) {
            throw std::invalid_argument("sampled boundary: need at least one sample");
        }
        BoundaryFunction f(Kind::sampled);
        double m = 0.0;
        for (double v : values) {
            m = std::max(m, std::abs(v));
        }
        f.samples_ = std::move(values);
        f.sup_norm_ = m * (1.0 + 1e-9);
        return f;
    }

    Kind kind() const noexcept { return kind_; }
    double sup_norm() const noexcept { return sup_norm_; }

    /// Highest harmonic present (0 for constants; 0 for step and sampled data,
    /// whose extension is not computed from a Fourier expansion).
    std::size_t degree() const noexcept { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }

    /// Complex Fourier coefficients c_k with phi = Re(sum c_k e^{ik theta}).
    std::span<const std::complex<double>> coefficients() const noexcept { return coeffs_; }

    double constant_value() const noexcept { return value_; }
    std::pair<double, double> arc() const noexcept { return {theta1_, theta2_}; }
    std::span<const double> samples() const noexcept { return samples_; }

    bool is_zero() const noexcept { return kind_ == Kind::constant && value_ == 0.0; }

    double operator()(double theta) const {
        switch (kind_) {
        case Kind::constant:
            return value_;
        case Kind::trig:
            return on_circle(std::polar(1.0, theta));
        case Kind::step: {
            const double offset = detail::wrap_angle(theta - theta1_);
            return offset < theta2_ - theta1_ ? 1.0 : -1.0;
        }
        case Kind::sampled: {
            const auto n = samples_.size();
            const double x = detail::wrap_angle(theta) / two_pi * static_cast<double>(n);
            const auto j = std::min(static_cast<std::size_t>(x), n - 1);
            const double frac = x - static_cast<double>(j);
            return (1.0 - frac) * samples_[j] + frac * samples_[(j + 1) % n];
        }
        }
        return 0.0;
    }

    /// Trig kind only: value at the unit complex number zeta = e^{i theta}.
    double on_circle(std::complex<double> zeta) const { return on_circle(zeta.real(), zeta.imag()); }

    double on_circle(double zr, double zi) const {
        // Horner in real arithmetic; std::complex products carry NaN recovery
        // branches that dominate the cost of the trapezoid loop.
        double ar = coeffs_.back().real();
        double ai = coeffs_.back().imag();
        for (std::size_t k = coeffs_.size() - 1; k-- > 0;) {
            const double tr = ar * zr - ai * zi + coeffs_[k].real();
            ai = ar * zi + ai * zr + coeffs_[k].imag();
            ar = tr;
        }
        return ar;
    }

private:
    explicit BoundaryFunction(Kind kind) : kind_(kind) {}

    static BoundaryFunction harmonic(int k, bool use_sine) {
        if (k < 0) {
            throw DomainError("trig boundary: harmonic index must be non-negative");
        }
        if (k == 0) {
            return constant(use_sine ? 0.0 : 1.0);
        }
        const auto ku = static_cast<std::size_t>(k);
        BoundaryFunction f(Kind::trig);
        f.coeffs_.assign(ku + 1, {0.0, 0.0});
        f.coeffs_[ku] = use_sine ? std::complex<double>(0.0, -1.0) : std::complex<double>(1.0, 0.0);
        f.sup_norm_ = 1.0;
        return f;
    }

    double trig_supremum() const {
        std::size_t nonzero = 0;
        for (const auto& c : coeffs_) {
            nonzero += (c != std::complex<double>(0.0, 0.0)) ? 1 : 0;
        }
        if (nonzero == 0) {
            return 0.0;
        }
        if (nonzero == 1) {
            // A single harmonic |c_k| cos(k theta + arg) (or a constant) attains |c_k|.
            for (const auto& c : coeffs_) {
                if (c != std::complex<double>(0.0, 0.0)) {
                    return std::abs(c);
                }
            }
        }
        const double m = detail::periodic_maximum(
            [this](double t) { return std::abs(on_circle(std::polar(1.0, t))); }, degree());
        return m * (1.0 + 1e-12);
    }

    Kind kind_;
    double value_ = 0.0;
    std::vector<std::complex<double>> coeffs_;
    double theta1_ = 0.0;
    double theta2_ = 0.0;
    std::vector<double> samples_;
    double sup_norm_ = 0.0;
};

/// Complex boundary data as a pair of real components; all operators act
/// componentwise. `sup_norm` bounds the modulus.
struct ComplexBoundary {
    BoundaryFunction re;
    BoundaryFunction im;
    double sup_norm = 0.0;

    ComplexBoundary() = default;

    ComplexBoundary(BoundaryFunction re_, BoundaryFunction im_) : re(std::move(re_)), im(std::move(im_)) {
        if (im.is_zero()) {
            sup_norm = re.sup_norm();
        } else if (re.kind() == BoundaryFunction::Kind::trig && im.kind() == BoundaryFunction::Kind::trig) {
            // |phi|^2 has bandwidth 2n.
            const std::size_t n = std::max(re.degree(), im.degree());
            sup_norm = detail::periodic_maximum(
                           [this](double t) {
                               const auto zeta = std::polar(1.0, t);
                               return std::hypot(re.on_circle(zeta), im.on_circle(zeta));
                           },
                           2 * n) *
                       (1.0 + 1e-12);
        } else {
            sup_norm = std::hypot(re.sup_norm(), im.sup_norm());
        }
    }

    explicit ComplexBoundary(BoundaryFunction re_) : ComplexBoundary(std::move(re_), BoundaryFunction::constant(0.0)) {}

    bool is_real() const noexcept { return im.is_zero(); }

    std::complex<double> operator()(double theta) const { return {re(theta), im(theta)}; }
};

// ---------------------------------------------------------------------------
// Sources

/// Polynomial in (x, y) with coefficients in graded order:
/// 1; x, y; x^2, xy, y^2; x^3, x^2 y, x y^2, y^3; ...
class Polynomial2 {
public:
    static constexpr int max_degree = 15;

    Polynomial2() = default;

    explicit Polynomial2(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) {
            coeffs_.push_back(0.0);
        }
        int d = 0;
        std::size_t full = 1;
        while (full < coeffs_.size()) {
            ++d;
            full += static_cast<std::size_t>(d) + 1;
        }
        if (d > max_degree) {
            throw std::invalid_argument("Polynomial2: degree exceeds " + std::to_string(max_degree));
        }
        degree_ = d;
        coeffs_.resize(full, 0.0);
    }

    int degree() const noexcept { return degree_; }
    std::span<const double> coefficients() const noexcept { return coeffs_; }

    double operator()(double x, double y) const {
        std::array<double, max_degree + 1> px{};
        std::array<double, max_degree + 1> py{};
        px[0] = py[0] = 1.0;
        for (int k = 1; k <= degree_; ++k) {
            px[k] = px[k - 1] * x;
            py[k] = py[k - 1] * y;
        }
        double acc = 0.0;
        std::size_t idx = 0;
        for (int d = 0; d <= degree_; ++d) {
            for (int j = 0; j <= d; ++j) {
                acc += coeffs_[idx++] * px[d - j] * py[j];
            }
        }
        return acc;
    }

private:
    std::vector<double> coeffs_{0.0};
    int degree_ = 0;
};

namespace detail {

/// Supremum of |p| over the closed disk: 201 x 201 polar grid, then compass
/// search from the best grid points, times a 1.000001 safety factor.
inline double polynomial_disk_supremum(const Polynomial2& p) {
    constexpr int n_r = 201;
    constexpr int n_t = 201;
    auto value = [&p](double r, double t) { return std::abs(p(r * std::cos(t), r * std::sin(t))); };
    std::vector<std::tuple<double, double, double>> grid;
    grid.reserve(static_cast<std::size_t>(n_r * n_t));
    for (int i = 0; i < n_r; ++i) {
        const double r = static_cast<double>(i) / (n_r - 1);
        for (int j = 0; j < n_t; ++j) {
            const double t = two_pi * j / n_t;
            grid.emplace_back(value(r, t), r, t);
        }
    }
    const std::size_t keep = std::min<std::size_t>(8, grid.size());
    std::partial_sort(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(keep), grid.end(),
                      [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
    double best = std::get<0>(grid.front());
    for (std::size_t c = 0; c < keep; ++c) {
        auto [v, r, t] = grid[c];
        double dr = 1.0 / (n_r - 1);
        double dt = two_pi / n_t;
        while (dr > 1e-13 || dt > 1e-13) {
            bool moved = false;
            for (const auto& [sr, st] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
                const double r2 = std::clamp(r + sr * dr, 0.0, 1.0);
                const double t2 = t + st * dt;
                const double v2 = value(r2, t2);
                if (v2 > v) {
                    v = v2;
                    r = r2;
                    t = t2;
                    moved = true;
                }
            }
            if (!moved) {
                dr *= 0.5;
                dt *= 0.5;
            }
        }
        best = std::max(best, v);
    }
    return best * 1.000001;
}

} // namespace detail

/// Real-valued source g on the closed disk together with a bound c >= |g|.
class SourceField {
public:
    enum class Kind { constant, polynomial, callable };
    using Callable = std::function<double(const DiskPoint&)>;

    SourceField() : SourceField(constant(0.0)) {}

    static SourceField constant(double v) {
        SourceField g(Kind::constant);
        g.value_ = v;
        g.bound_ = std::abs(v);
        return g;
    }

    static SourceField polynomial(Polynomial2 p) {
        if (p.degree() == 0) {
            return constant(p.coefficients()[0]);
        }
        SourceField g(Kind::polynomial);
        g.bound_ = detail::polynomial_disk_supremum(p);
        g.poly_ = std::move(p);
        return g;
    }

    /// An arbitrary continuous source; `sup_norm_bound` is trusted as given.
    static SourceField callable(Callable fn, double sup_norm_bound) {
        if (!fn) {
            throw std::invalid_argument("callable source: empty function");
        }
        if (!(sup_norm_bound >= 0.0)) {
            throw std::invalid_argument("callable source: bound must be non-negative");
        }
        SourceField g(Kind::callable);
        g.fn_ = std::move(fn);
        g.bound_ = sup_norm_bound;
        return g;
    }

    Kind kind() const noexcept { return kind_; }
    double sup_norm_bound() const noexcept { return bound_; }
    bool is_constant() const noexcept { return kind_ == Kind::constant; }
    bool is_zero() const noexcept { return kind_ == Kind::constant && value_ == 0.0; }
    double constant_value() const noexcept { return value_; }
    const Polynomial2& poly() const noexcept { return poly_; }

    double operator()(const DiskPoint& w) const {
        switch (kind_) {
        case Kind::constant:
            return value_;
        case Kind::polynomial:
            return poly_(w.re, w.im);
        case Kind::callable:
            return fn_(w);
        }
        return 0.0;
    }

private:
    explicit SourceField(Kind kind) : kind_(kind) {}

    Kind kind_;
    double value_ = 0.0;
    Polynomial2 poly_;
    Callable fn_;
    double bound_ = 0.0;
};

/// Complex source as a pair of real components; `sup_norm_bound` bounds |g|.
struct ComplexSource {
    SourceField re;
    SourceField im;
    double sup_norm_bound = 0.0;

    ComplexSource() = default;
    ComplexSource(SourceField re_, SourceField im_, std::optional<double> bound = std::nullopt)
        : re(std::move(re_)), im(std::move(im_)) {
        sup_norm_bound = bound.value_or(im.is_zero() ? re.sup_norm_bound()
                                                     : std::hypot(re.sup_norm_bound(), im.sup_norm_bound()));
    }
    explicit ComplexSource(SourceField re_) : ComplexSource(std::move(re_), SourceField::constant(0.0)) {}

    bool is_zero() const noexcept { return re.is_zero() && im.is_zero(); }

    std::complex<double> operator()(const DiskPoint& w) const { return {re(w), im(w)}; }
};

// ---------------------------------------------------------------------------
// Harmonic extension

struct CircleOptions {
    std::size_t nodes = CircleRule::default_nodes;
    std::size_t max_nodes = std::size_t{1} << 28;
};

namespace detail {

/// Trapezoid rule for P[phi](z) with nodes rotated to start at arg z, so that
/// the angle differences theta_j - arg z = 2 pi j / N are exact multiples and
/// the kernel denominator (1 - r)^2 + 4 r sin^2(pi j / N) keeps full relative
/// accuracy at the peak. Nodes j and N - j share a kernel value and are
/// summed together. `phi` holds one or two trig components evaluated on the
/// same rule.
inline std::array<double, 2> poisson_trapezoid_trig(std::span<const BoundaryFunction* const> phi, const DiskPoint& z,
                                                    std::size_t n) {
    const double r = z.modulus();
    const double t = z.arg();
    const double gap = 1.0 - r;
    const auto nd = static_cast<double>(n);
    const double rot_re = std::cos(t);
    const double rot_im = std::sin(t);
    const double om_re = std::cos(two_pi / nd);
    const double om_im = std::sin(two_pi / nd);
    // Near the kernel peak the half-angle sine is evaluated directly.
    const std::size_t direct = std::max<std::size_t>(2048, n / 64);
    constexpr std::size_t block = 64;
    const std::size_t parts = std::min<std::size_t>(phi.size(), 2);
    const std::size_t half = n / 2;

    auto kernel = [&](std::size_t j, double u_re) {
        double s2;
        if (j <= direct) {
            const double s = std::sin(pi * static_cast<double>(j) / nd);
            s2 = s * s;
        } else {
            s2 = 0.5 * (1.0 - u_re);
        }
        return 1.0 / (gap * gap + 4.0 * r * s2);
    };

    std::array<CompensatedSum<double>, 2> acc;
    for (std::size_t p = 0; p < parts; ++p) {
        // j = 0, and j = N/2 when N is even (those nodes have no partner).
        acc[p].add(phi[p]->on_circle(rot_re, rot_im) * kernel(0, 1.0));
        if (n % 2 == 0) {
            acc[p].add(phi[p]->on_circle(-rot_re, -rot_im) * kernel(half, -1.0));
        }
    }
    const std::size_t last = n % 2 == 0 ? half - 1 : half;
    for (std::size_t start = 1; start <= last; start += block) {
        const double start_angle = two_pi * static_cast<double>(start) / nd;
        double u_re = std::cos(start_angle);
        double u_im = std::sin(start_angle);
        const std::size_t stop = std::min(last + 1, start + block);
        std::array<double, 2> partial{0.0, 0.0};
        for (std::size_t j = start; j < stop; ++j) {
            const double w = kernel(j, u_re);
            // zeta_j = rot u and zeta_{N-j} = rot conj(u).
            const double a_re = rot_re * u_re - rot_im * u_im;
            const double a_im = rot_re * u_im + rot_im * u_re;
            const double b_re = rot_re * u_re + rot_im * u_im;
            const double b_im = rot_im * u_re - rot_re * u_im;
            for (std::size_t p = 0; p < parts; ++p) {
                partial[p] += w * (phi[p]->on_circle(a_re, a_im) + phi[p]->on_circle(b_re, b_im));
            }
            const double next_re = u_re * om_re - u_im * om_im;
            u_im = u_re * om_im + u_im * om_re;
            u_re = next_re;
        }
        for (std::size_t p = 0; p < parts; ++p) {
            acc[p].add(partial[p]);
        }
    }
    const double scale = gap * (1.0 + r) / nd;
    return {scale * acc[0].value(), scale * acc[1].value()};
}

inline double poisson_trapezoid_trig(const BoundaryFunction& phi, const DiskPoint& z, std::size_t n) {
    const BoundaryFunction* parts[] = {&phi};
    return poisson_trapezoid_trig(parts, z, n)[0];
}

inline double poisson_step(const BoundaryFunction& phi, const DiskPoint& z) {
    // Harmonic measure of the arc (theta1, theta2) at z is alpha / pi - L / 2pi,
    // where alpha in [L/2, L/2 + pi] is the angle the arc subtends at z.
    const auto [theta1, theta2] = phi.arc();
    const double length = theta2 - theta1;
    const std::complex<double> zc = z.complex();
    const std::complex<double> q = (std::polar(1.0, theta2) - zc) * std::conj(std::polar(1.0, theta1) - zc);
    const double centre = 0.5 * length + 0.5 * pi;
    const double alpha = centre + std::arg(q * std::polar(1.0, -centre));
    const double omega = alpha / pi - length / two_pi;
    return 2.0 * omega - 1.0;
}

inline double poisson_sampled(const BoundaryFunction& phi, const DiskPoint& z) {
    const auto samples = phi.samples();
    const std::size_t n = samples.size();
    const double r = z.modulus();
    // Neglected aliasing terms are of size r^N.
    const double aliasing = std::pow(r, static_cast<double>(n)) * phi.sup_norm();
    if (aliasing > 1e-12) {
        throw NonConvergence("poisson_extension: sampled data too coarse for |z| = " + std::to_string(r),
                             aliasing);
    }
    const CircleRule rule(n);
    CompensatedSum<double> acc;
    for (std::size_t j = 0; j < n; ++j) {
        acc.add(poisson_kernel(z, rule.node(j)) * samples[j]);
    }
    return acc.value() / static_cast<double>(n);
}

} // namespace detail

/// Node count used for the trapezoid evaluation of P[phi] at radius r:
/// at least `options.nodes`, at least 64 / (1 - r), and enough to resolve
/// the data's highest harmonic.
inline std::size_t poisson_node_count(double r, std::size_t degree, const CircleOptions& options = {}) {
    const double needed = std::ceil(64.0 / (1.0 - r));
    std::size_t n = std::max(options.nodes, 4 * degree + 8);
    if (needed > static_cast<double>(n)) {
        if (needed > static_cast<double>(options.max_nodes)) {
            const double achieved = std::pow(r, static_cast<double>(options.max_nodes));
            throw NonConvergence("poisson_extension: node cap reached near the boundary", achieved);
        }
        n = static_cast<std::size_t>(needed);
    }
    return n;
}

/// Harmonic extension P[phi](z) = (1/2pi) int P(z, e^{it}) phi(e^{it}) dt.
inline double poisson_extension(const BoundaryFunction& phi, const DiskPoint& z, const CircleOptions& options = {}) {
    detail::require_interior(z, "poisson_extension");
    switch (phi.kind()) {
    case BoundaryFunction::Kind::constant:
        return phi.constant_value();
    case BoundaryFunction::Kind::step:
        return detail::poisson_step(phi, z);
    case BoundaryFunction::Kind::sampled:
        return detail::poisson_sampled(phi, z);
    case BoundaryFunction::Kind::trig:
        return detail::poisson_trapezoid_trig(phi, z, poisson_node_count(z.modulus(), phi.degree(), options));
    }
    return 0.0;
}

inline std::complex<double> poisson_extension(const ComplexBoundary& phi, const DiskPoint& z,
                                              const CircleOptions& options = {}) {
    if (phi.re.kind() == BoundaryFunction::Kind::trig && phi.im.kind() == BoundaryFunction::Kind::trig) {
        detail::require_interior(z, "poisson_extension");
        const BoundaryFunction* parts[] = {&phi.re, &phi.im};
        const std::size_t n = poisson_node_count(z.modulus(), std::max(phi.re.degree(), phi.im.degree()), options);
        const auto v = detail::poisson_trapezoid_trig(parts, z, n);
        return {v[0], v[1]};
    }
    const double re = poisson_extension(phi.re, z, options);
    const double im = phi.im.is_zero() ? 0.0 : poisson_extension(phi.im, z, options);
    return {re, im};
}

// ---------------------------------------------------------------------------
// Green potential

/// G[g](z) = int_U G(z, w) g(w) dm(w), with the value at z subtracted:
/// G[g](z) = g(z) (1 - |z|^2) / 4 + int G(z, w) (g(w) - g(z)) dm(w).
/// The remainder is integrated by integrate_disk_singular to `tol`.
inline DiskIntegral green_potential_detailed(const SourceField& g, const DiskPoint& z, double tol,
                                             const DiskQuadratureOptions& options = {}) {
    detail::require_interior(z, "green_potential");
    const double one_minus = 1.0 - z.modulus_sq();
    if (g.is_constant()) {
        return DiskIntegral{g.constant_value() * one_minus / 4.0, 0.0, 0, 0};
    }
    const double gz = g(z);
    const double zq = one_minus;
    const auto remainder = integrate_disk_singular(
        [&](const DiskPoint& w) {
            const double dx = z.re - w.re;
            const double dy = z.im - w.im;
            const double q = zq * (1.0 - w.modulus_sq()) / (dx * dx + dy * dy);
            return std::log1p(q) * (g(w) - gz);
        },
        z, tol * 4.0 * pi, options);
    DiskIntegral out = remainder;
    out.value = gz * one_minus / 4.0 + remainder.value / (4.0 * pi);
    out.error_estimate = remainder.error_estimate / (4.0 * pi);
    return out;
}

inline double green_potential(const SourceField& g, const DiskPoint& z, double tol = 1e-6,
                              const DiskQuadratureOptions& options = {}) {
    return green_potential_detailed(g, z, tol, options).value;
}

inline std::complex<double> green_potential(const ComplexSource& g, const DiskPoint& z, double tol = 1e-6,
                                            const DiskQuadratureOptions& options = {}) {
    const double re = green_potential(g.re, z, tol, options);
    const double im = g.im.is_zero() ? 0.0 : green_potential(g.im, z, tol, options);
    return {re, im};
}

// ---------------------------------------------------------------------------
// Fields

struct FieldInfo {
    bool is_harmonic = false;
    bool is_complex = false;
    /// Bound c with |Laplacian f| <= c, when known.
    std::optional<double> laplacian_bound;
    /// Continuous boundary data, when the field is built from one.
    std::optional<ComplexBoundary> boundary;
    /// Source of the Poisson equation, when the field is built from one.
    std::optional<ComplexSource> source;
};

/// An evaluable field on the open disk. Copies share one evaluation cache;
/// the cache is transparent (a value is computed once per point, and every
/// reader sees the same value).
class DiskField {
public:
    using Evaluator = std::function<std::complex<double>(const DiskPoint&)>;

    DiskField() = default;

    DiskField(Evaluator evaluator, FieldInfo info, bool memoize = true)
        : evaluator_(std::make_shared<Evaluator>(std::move(evaluator))),
          info_(std::make_shared<FieldInfo>(std::move(info))),
          cache_(memoize ? std::make_shared<Cache>() : nullptr) {}

    const FieldInfo& info() const { return *info_; }

    std::complex<double> operator()(const DiskPoint& z) const {
        if (!cache_) {
            return (*evaluator_)(z);
        }
        const Key key{std::bit_cast<std::uint64_t>(z.re), std::bit_cast<std::uint64_t>(z.im)};
        {
            std::shared_lock lock(cache_->mutex);
            if (auto it = cache_->values.find(key); it != cache_->values.end()) {
                return it->second;
            }
        }
        const std::complex<double> v = (*evaluator_)(z);
        std::unique_lock lock(cache_->mutex);
        return cache_->values.emplace(key, v).first->second;
    }

    double real(const DiskPoint& z) const { return (*this)(z).real(); }

    /// Continuous boundary value at e^{i theta}, from the field's boundary data.
    std::complex<double> boundary_value(double theta) const {
        if (!info_->boundary) {
            throw std::logic_error("DiskField: no boundary data attached");
        }
        return (*info_->boundary)(theta);
    }

private:
    using Key = std::pair<std::uint64_t, std::uint64_t>;
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept {
            return std::hash<std::uint64_t>{}(k.first * 0x9E3779B97F4A7C15ull ^ k.second);
        }
    };
    struct Cache {
        std::shared_mutex mutex;
        std::unordered_map<Key, std::complex<double>, KeyHash> values;
    };

    std::shared_ptr<Evaluator> evaluator_;
    std::shared_ptr<FieldInfo> info_;
    std::shared_ptr<Cache> cache_;
};

struct SolveOptions {
    /// Absolute tolerance of each Green-potential evaluation.
    double tol = 1e-7;
    CircleOptions circle;
    DiskQuadratureOptions disk;
    bool memoize = true;
};

/// The harmonic extension P[phi] as a field.
inline DiskField harmonic_extension(const ComplexBoundary& phi, const SolveOptions& options = {}) {
    FieldInfo info;
    info.is_harmonic = true;
    info.is_complex = !phi.is_real();
    info.laplacian_bound = 0.0;
    info.boundary = phi;
    return DiskField([phi, circle = options.circle](const DiskPoint& z) { return poisson_extension(phi, z, circle); },
                     std::move(info), options.memoize);
}

/// f = P[phi] - G[g], the solution of Laplacian f = g in U with f -> phi on the circle.
inline DiskField solve_poisson(const ComplexBoundary& phi, const ComplexSource& g, const SolveOptions& options = {}) {
    if (g.is_zero()) {
        return harmonic_extension(phi, options);
    }
    FieldInfo info;
    info.is_harmonic = false;
    info.is_complex = !phi.is_real() || !g.im.is_zero();
    info.laplacian_bound = g.sup_norm_bound;
    info.boundary = phi;
    info.source = g;
    return DiskField(
        [phi, g, options](const DiskPoint& z) {
            return poisson_extension(phi, z, options.circle) - green_potential(g, z, options.tol, options.disk);
        },
        std::move(info), options.memoize);
}

inline DiskField solve_poisson(const BoundaryFunction& phi, const SourceField& g, const SolveOptions& options = {}) {
    return solve_poisson(ComplexBoundary(phi), ComplexSource(g), options);
}

/// Five-point Laplacian (f(z+h) + f(z-h) + f(z+ih) + f(z-ih) - 4 f(z)) / h^2.
/// The disk of radius 2h about z must lie in U.
inline std::complex<double> laplacian_fd(const DiskField& f, const DiskPoint& z, double h = 1e-3) {
    if (!(h > 0.0)) {
        throw DomainError("laplacian_fd: step must be positive");
    }
    if (!(z.modulus() + 2.0 * h < 1.0)) {
        throw DomainError("laplacian_fd: stencil leaves the unit disk");
    }
    const auto sum = f(DiskPoint(z.re + h, z.im)) + f(DiskPoint(z.re - h, z.im)) + f(DiskPoint(z.re, z.im + h)) +
                     f(DiskPoint(z.re, z.im - h));
    return (sum - 4.0 * f(z)) / (h * h);
}

/// Richardson pairing of the five-point Laplacian at steps h and h/2.
inline std::complex<double> laplacian_fd_richardson(const DiskField& f, const DiskPoint& z, double h = 1e-3) {
    return (4.0 * laplacian_fd(f, z, 0.5 * h) - laplacian_fd(f, z, h)) / 3.0;
}

/// Values f(r e^{i theta}) along a strictly increasing radius sequence in (0, 1).
inline std::vector<std::complex<double>> radial_limit_probe(const DiskField& f, double theta,
                                                            std::span<const double> radii) {
    std::vector<std::complex<double>> out;
    out.reserve(radii.size());
    double previous = 0.0;
    for (double r : radii) {
        if (!(r > previous && r < 1.0)) {
            throw DomainError("radial_limit_probe: radii must increase strictly inside (0, 1)");
        }
        previous = r;
        out.push_back(f(DiskPoint::polar(r, theta)));
    }
    return out;
}

} // namespace diskpot
