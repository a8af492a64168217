#pragma once

// Numerical checks of the envelope inequalities. Each check evaluates a field
// on a probe set and reports the worst signed margin (RHS - LHS, negative
// means a violation) together with the point where it occurred.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "bounds.hpp"
#include "instances.hpp"
#include "kernels.hpp"
#include "potentials.hpp"

namespace diskpot {

/// An instance fails the hypotheses of the inequality being checked.
class HypothesisViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Polar probe set: every radius paired with every angle, the centre once.
struct ProbeGrid {
    std::vector<double> radii;
    std::vector<double> angles;

    /// `radial` radii equally spaced on [0, r_max] and `angular` angles 2 pi k / angular.
    static ProbeGrid polar(std::size_t radial = 9, std::size_t angular = 16, double r_max = 0.95) {
        if (!(r_max >= 0.0 && r_max < 1.0)) {
            throw DomainError("ProbeGrid: r_max must lie in [0, 1)");
        }
        if (radial == 0 || angular == 0) {
            throw DomainError("ProbeGrid: radial and angular counts must be positive");
        }
        ProbeGrid grid;
        for (std::size_t j = 0; j < radial; ++j) {
            grid.radii.push_back(radial == 1 ? r_max
                                             : r_max * static_cast<double>(j) / static_cast<double>(radial - 1));
        }
        for (std::size_t k = 0; k < angular; ++k) {
            grid.angles.push_back(two_pi * static_cast<double>(k) / static_cast<double>(angular));
        }
        return grid;
    }

    double r_max() const { return radii.empty() ? 0.0 : *std::max_element(radii.begin(), radii.end()); }

    std::vector<DiskPoint> points() const {
        std::vector<DiskPoint> out;
        for (double r : radii) {
            if (!(r >= 0.0 && r < 1.0)) {
                throw DomainError("ProbeGrid: radii must lie in [0, 1)");
            }
            if (r == 0.0) {
                out.emplace_back(0.0, 0.0);
                continue;
            }
            for (double t : angles) {
                out.push_back(DiskPoint::polar(r, t));
            }
        }
        return out;
    }
};

struct CheckReport {
    std::string check_id;
    /// The inequality being checked, in plain notation.
    std::string statement;
    std::uint64_t seed = 0;
    std::size_t points_tested = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    DiskPoint worst_point;
    double tolerance = 1e-6;
    bool passed = true;

    friend bool operator==(const CheckReport&, const CheckReport&) = default;
};

namespace detail {

class MarginTracker {
public:
    void observe(const DiskPoint& z, std::initializer_list<double> margins) {
        ++points_;
        for (double m : margins) {
            // NaN margins count as violations.
            if (std::isnan(m) || m < worst_) {
                worst_ = std::isnan(m) ? -std::numeric_limits<double>::infinity() : m;
                point_ = z;
            }
        }
    }

    CheckReport finish(std::string id, std::string statement, double tol) const {
        CheckReport r;
        r.check_id = std::move(id);
        r.statement = std::move(statement);
        r.points_tested = points_;
        r.worst_margin = worst_;
        r.worst_point = point_;
        r.tolerance = tol;
        r.passed = worst_ >= -tol;
        return r;
    }

private:
    std::size_t points_ = 0;
    double worst_ = std::numeric_limits<double>::infinity();
    DiskPoint point_;
};

inline void require_tolerance(double tol) {
    if (!(tol >= 0.0)) {
        throw DomainError("check: tolerance must be non-negative");
    }
}

inline void require_into_disk(std::complex<double> v, const DiskPoint& z, const char* what) {
    if (!(std::abs(v) < 1.0)) {
        throw HypothesisViolation(std::string(what) + ": |f| >= 1 at probe (" + std::to_string(z.re) + ", " +
                                  std::to_string(z.im) + ")");
    }
}

inline void require_real(const DiskField& f, const char* what) {
    if (f.info().is_complex) {
        throw HypothesisViolation(std::string(what) + ": field must be real-valued");
    }
}

inline double heinz(double r) { return four_over_pi * std::atan(r); }

inline double source_term(double c, double r) { return 0.25 * c * (1.0 - r) * (1.0 + r); }

} // namespace detail

namespace check_id {
inline constexpr std::string_view heinz_hethcote = "check_heinz_hethcote";
inline constexpr std::string_view harmonic_envelope = "check_harmonic_envelope";
inline constexpr std::string_view complex_harmonic = "check_complex_harmonic";
inline constexpr std::string_view envelope_chain = "check_envelope_chain";
inline constexpr std::string_view poisson_estimate = "check_poisson_estimate";
inline constexpr std::string_view poisson_envelope_upper = "check_poisson_envelope_upper";
inline constexpr std::string_view poisson_envelope_lower = "check_poisson_envelope_lower";
inline constexpr std::string_view complex_poisson_envelope = "check_complex_poisson_envelope";
inline constexpr std::string_view subharmonic_majorant = "check_subharmonic_majorant";
inline constexpr std::string_view boundary_slope = "check_boundary_slope";
inline constexpr std::string_view boundary_liminf = "check_boundary_liminf";
inline constexpr std::string_view sharpness = "check_sharpness";
inline constexpr std::string_view nonuniqueness = "check_nonuniqueness";

inline constexpr std::array<std::string_view, 13> all = {
    heinz_hethcote, harmonic_envelope, complex_harmonic, envelope_chain, poisson_estimate,
    poisson_envelope_upper, poisson_envelope_lower,     complex_poisson_envelope,       subharmonic_majorant, boundary_slope,
    boundary_liminf, sharpness,         nonuniqueness};
} // namespace check_id

// ---------------------------------------------------------------------------
// Harmonic checks

/// |f(z) - A(z) f(0)| <= (4/pi) arctan |z| for harmonic f: U -> U.
inline CheckReport check_heinz_hethcote(const DiskField& f, const ProbeGrid& grid, double tol = 1e-6) {
    detail::require_tolerance(tol);
    const auto f0 = f(DiskPoint{});
    detail::require_into_disk(f0, DiskPoint{}, "check_heinz_hethcote");
    detail::MarginTracker t;
    for (const auto& z : grid.points()) {
        const auto v = f(z);
        detail::require_into_disk(v, z, "check_heinz_hethcote");
        t.observe(z, {detail::heinz(z.modulus()) - std::abs(v - weight_A(z) * f0)});
    }
    return t.finish(std::string(check_id::heinz_hethcote), "|f(z) - A(z) f(0)| <= (4/pi) arctan|z|", tol);
}

/// m_b(|z|) <= u(z) <= M_b(|z|) for real harmonic u: U -> (-1, 1), b = u(0).
inline CheckReport check_harmonic_envelope(const DiskField& f, const ProbeGrid& grid, double tol = 1e-6) {
    detail::require_tolerance(tol);
    detail::require_real(f, "check_harmonic_envelope");
    const double b = f.real(DiskPoint{});
    detail::require_into_disk(b, DiskPoint{}, "check_harmonic_envelope");
    detail::MarginTracker t;
    for (const auto& z : grid.points()) {
        const double u = f.real(z);
        detail::require_into_disk(u, z, "check_harmonic_envelope");
        const double r = z.modulus();
        t.observe(z, {envelope_M(b, r) - u, u - envelope_m(b, r)});
    }
    return t.finish(std::string(check_id::harmonic_envelope), "m_b(|z|) <= u(z) <= M_b(|z|), b = u(0)", tol);
}

/// |f(z)| <= M_b(|z|) with b = |f(0)| for harmonic f: U -> U.
inline CheckReport check_complex_harmonic(const DiskField& f, const ProbeGrid& grid, double tol = 1e-6) {
    detail::require_tolerance(tol);
    const auto f0 = f(DiskPoint{});
    detail::require_into_disk(f0, DiskPoint{}, "check_complex_harmonic");
    const double b = std::abs(f0);
    detail::MarginTracker t;
    for (const auto& z : grid.points()) {
        const auto v = f(z);
        detail::require_into_disk(v, z, "check_complex_harmonic");
        t.observe(z, {envelope_M(b, z.modulus()) - std::abs(v)});
    }
    return t.finish(std::string(check_id::complex_harmonic), "|f(z)| <= M_b(|z|), b = |f(0)|", tol);
}

/// u - A b <= M_b - A b <= (4/pi) arctan r and u - A b >= m_b - A b >= -(4/pi) arctan r,
/// termwise, for real harmonic u: U -> (-1, 1), b = u(0).
inline CheckReport check_envelope_chain(const DiskField& f, const ProbeGrid& grid, double tol = 1e-6) {
    detail::require_tolerance(tol);
    detail::require_real(f, "check_envelope_chain");
    const double b = f.real(DiskPoint{});
    detail::require_into_disk(b, DiskPoint{}, "check_envelope_chain");
    detail::MarginTracker t;
    for (const auto& z : grid.points()) {
        const double u = f.real(z);
        detail::require_into_disk(u, z, "check_envelope_chain");
        const double r = z.modulus();
        const double ab = weight_A(r) * b;
        const double hz = detail::heinz(r);
        const double upper = envelope_M(b, r) - ab;
        const double lower = envelope_m(b, r) - ab;
        t.observe(z, {upper - (u - ab), hz - upper, (u - ab) - lower, lower + hz});
    }
    return t.finish(std::string(check_id::envelope_chain),
                    "u - A b <= M_b - A b <= (4/pi) arctan r; u - A b >= m_b - A b >= -(4/pi) arctan r", tol);
}

// ---------------------------------------------------------------------------
// Poisson-equation checks

/// |f(z) - P[phi](0) A(z)| <= (4/pi) K arctan|z| + (c/4)(1 - |z|^2) for
/// f = P[phi] - G[g], with K = sup |phi| >= sup |P[phi]| unless overridden.
inline CheckReport check_poisson_estimate(const DiskField& f, const ComplexBoundary& phi, const ComplexSource& g,
                                          const ProbeGrid& grid, double tol = 1e-6,
                                          std::optional<double> k_override = std::nullopt) {
    detail::require_tolerance(tol);
    const double K = k_override.value_or(phi.sup_norm);
    const double c = g.sup_norm_bound;
    const auto center = poisson_extension(phi, DiskPoint{});
    detail::MarginTracker t;
    for (const auto& z : grid.points()) {
        const double r = z.modulus();
        const double lhs = std::abs(f(z) - center * weight_A(r));
        t.observe(z, {K * detail::heinz(r) + detail::source_term(c, r) - lhs});
    }
    return t.finish(std::string(check_id::poisson_estimate),
                    "|f(z) - P[phi](0) A(z)| <= (4/pi) K arctan|z| + (c/4)(1 - |z|^2)", tol);
}

/// Effective K for the sub/superharmonic envelope: the boundary supremum,
/// inflated just above |b| when the two coincide and floored at 1e-12 so the
/// envelope stays defined for phi = 0.
inline double effective_k(double sup_norm, double b) {
    return std::max({sup_norm, std::abs(b) * (1.0 + 1e-9), 1e-12});
}

/// upper: f <= K M_{b/K}(|z|) + (c/4)(1 - |z|^2) when Laplacian f >= -c;
/// lower: f >= K m_{b/K}(|z|) - (c/4)(1 - |z|^2) when Laplacian f <= c;
/// b = P[phi](0).
inline CheckReport check_poisson_envelope(const DiskField& f, const ComplexBoundary& phi, double c, BoundSide side,
                                  const ProbeGrid& grid, double tol = 1e-6) {
    detail::require_tolerance(tol);
    detail::require_real(f, "check_poisson_envelope");
    if (!phi.is_real()) {
        throw HypothesisViolation("check_poisson_envelope: boundary data must be real");
    }
    if (!(c >= 0.0)) {
        throw HypothesisViolation("check_poisson_envelope: c must be non-negative");
    }
    const double b = poisson_extension(phi.re, DiskPoint{});
    const double K = effective_k(phi.sup_norm, b);
    const auto& source = f.info().source;
    const bool upper = side == BoundSide::upper;
    detail::MarginTracker t;
    for (const auto& z : grid.points()) {
        if (source) {
            const double gz = source->re(z);
            if (upper ? gz < -c * (1.0 + 1e-12) : gz > c * (1.0 + 1e-12)) {
                throw HypothesisViolation("check_poisson_envelope: Laplacian bound violated by the source");
            }
        }
        const double v = f.real(z);
        const double rhs = bound_poisson_rhs(K, b, c, z.modulus(), side);
        t.observe(z, {upper ? rhs - v : v - rhs});
    }
    return upper ? t.finish(std::string(check_id::poisson_envelope_upper), "f(z) <= K M_{b/K}(|z|) + (c/4)(1 - |z|^2)", tol)
                 : t.finish(std::string(check_id::poisson_envelope_lower), "f(z) >= K m_{b/K}(|z|) - (c/4)(1 - |z|^2)", tol);
}

/// |f(z)| <= M_b(|z|) + (c/4)(1 - |z|^2) with b = |P[f*](0)|, and
/// |f(z) - P[f*](0) A(z)| <= (4/pi) arctan|z| + (c/4)(1 - |z|^2),
/// for f: U -> U with |Laplacian f| <= c.
inline CheckReport check_complex_poisson_envelope(const DiskField& f, const ComplexBoundary& phi, double c, const ProbeGrid& grid,
                                    double tol = 1e-6) {
    detail::require_tolerance(tol);
    if (!(c >= 0.0)) {
        throw HypothesisViolation("check_complex_poisson_envelope: c must be non-negative");
    }
    const auto center = poisson_extension(phi, DiskPoint{});
    const double b = std::abs(center);
    if (!(b < 1.0)) {
        throw HypothesisViolation("check_complex_poisson_envelope: |P[f*](0)| must be below 1");
    }
    detail::MarginTracker t;
    for (const auto& z : grid.points()) {
        const auto v = f(z);
        detail::require_into_disk(v, z, "check_complex_poisson_envelope");
        const double r = z.modulus();
        const double s = detail::source_term(c, r);
        t.observe(z, {envelope_M(b, r) + s - std::abs(v), detail::heinz(r) + s - std::abs(v - center * weight_A(r))});
    }
    return t.finish(std::string(check_id::complex_poisson_envelope),
                    "|f(z)| <= M_b(|z|) + (c/4)(1 - |z|^2), b = |P[f*](0)|; "
                    "|f(z) - P[f*](0) A(z)| <= (4/pi) arctan|z| + (c/4)(1 - |z|^2)",
                    tol);
}

/// u <= P[u*] for subharmonic u.
inline CheckReport check_subharmonic_majorant(const DiskField& f, const ComplexBoundary& phi, const ProbeGrid& grid,
                                              double tol = 1e-6) {
    detail::require_tolerance(tol);
    detail::require_real(f, "check_subharmonic_majorant");
    const auto& source = f.info().source;
    detail::MarginTracker t;
    for (const auto& z : grid.points()) {
        if (source && source->re(z) < -1e-12) {
            throw HypothesisViolation("check_subharmonic_majorant: Laplacian is negative at a probe");
        }
        t.observe(z, {poisson_extension(phi.re, z) - f.real(z)});
    }
    return t.finish(std::string(check_id::subharmonic_majorant), "u(z) <= P[u*](z) for subharmonic u", tol);
}

// ---------------------------------------------------------------------------
// Boundary checks

/// Radii at which the radial difference quotient is sampled for extrapolation.
inline constexpr std::array<double, 3> slope_radii = {0.9, 0.99, 0.999};

/// Agreement required between the extrapolated quotient and the exact slope.
inline constexpr double slope_agreement = 1e-4;

/// Value at h = 0 of the quadratic through (h_i, q_i) (Neville's scheme).
inline double extrapolate_to_zero(std::array<double, 3> h, std::array<double, 3> q) {
    for (std::size_t level = 1; level < 3; ++level) {
        for (std::size_t i = 2; i >= level; --i) {
            q[i] = (h[i - level] * q[i] - h[i] * q[i - 1]) / (h[i - level] - h[i]);
            if (i == level) {
                break;
            }
        }
    }
    return q[2];
}

struct SlopeEstimate {
    double extrapolated = 0.0;
    std::array<double, 3> quotients{};
};

/// (f(1) - f(r)) / (1 - r) at the three slope radii, extrapolated to r = 1.
inline SlopeEstimate radial_slope(const DiskField& f) {
    const double f1 = f.boundary_value(0.0).real();
    SlopeEstimate out;
    std::array<double, 3> h{};
    for (std::size_t i = 0; i < 3; ++i) {
        const double r = slope_radii[i];
        h[i] = 1.0 - r;
        out.quotients[i] = (f1 - f.real(DiskPoint(r, 0.0))) / h[i];
    }
    out.extrapolated = extrapolate_to_zero(h, out.quotients);
    return out;
}

/// f_x(1) >= (2/pi) tan(pi (1 - b) / 4) - c/2, plus the chain
/// exact >= linearized >= zero-center and agreement of the extrapolated
/// radial quotient with the exact slope.
inline CheckReport check_boundary_slope(const SlopeInstance& inst, double tol = 1e-6) {
    detail::require_tolerance(tol);
    if (std::abs(inst.f.boundary_value(0.0).real() - 1.0) > 1e-12) {
        throw HypothesisViolation("check_boundary_slope: f(1) must equal 1");
    }
    const double exact = boundary_slope_bound(inst.b, inst.c, SlopeVariant::exact);
    const double linear = boundary_slope_bound(inst.b, inst.c, SlopeVariant::linearized);
    const double zero = boundary_slope_bound(inst.b, inst.c, SlopeVariant::zero_center);
    const SlopeEstimate est = radial_slope(inst.f);
    detail::MarginTracker t;
    const DiskPoint one(1.0, 0.0);
    t.observe(DiskPoint(slope_radii[2], 0.0), {inst.fx1 - exact, est.extrapolated - exact,
                                               slope_agreement - std::abs(est.extrapolated - inst.fx1)});
    if (inst.b >= 0.0) {
        t.observe(one, {exact - linear});
    }
    if (std::abs(inst.b) <= bound_center_estimate(inst.c)) {
        t.observe(one, {linear - zero});
    }
    return t.finish(std::string(check_id::boundary_slope), "f_x(1) >= (2/pi) tan(pi (1 - b) / 4) - c/2", tol);
}

/// Number of dyadic radii 1 - 2^-k used to approximate the liminf.
inline constexpr int liminf_depth = 20;
/// The liminf is approximated by the minimum over k >= liminf_tail.
inline constexpr int liminf_tail = 10;

/// liminf |f(xi) - f(r xi)| / (1 - r) >= (2/pi) tan(pi (1 - b) / 4) - c/2
/// with b = |P[f*](0)|, under 0 <= c < (4/pi) tan(pi (1 - b) / 4) and
/// |f(xi)| = 1. With `zero_center` (f(0) = 0) also |b| <= c/4 and the
/// floor -(3/4) c + 2/pi.
inline CheckReport check_boundary_liminf(const DiskField& f, CirclePoint xi, double c, double tol = 1e-6,
                                         bool zero_center = false) {
    detail::require_tolerance(tol);
    const auto& boundary = f.info().boundary;
    if (!boundary) {
        throw HypothesisViolation("check_boundary_liminf: field has no boundary data");
    }
    const double b = std::abs(poisson_extension(*boundary, DiskPoint{}));
    if (!(b < 1.0)) {
        throw HypothesisViolation("check_boundary_liminf: |P[f*](0)| must be below 1");
    }
    const double admissible = detail::four_over_pi * std::tan(0.25 * pi * (1.0 - b));
    if (!(c >= 0.0 && c < admissible)) {
        throw HypothesisViolation("check_boundary_liminf: c = " + std::to_string(c) +
                                  " is not below (4/pi) tan(pi (1 - b) / 4) = " + std::to_string(admissible));
    }
    const auto fxi = f.boundary_value(xi.theta);
    if (std::abs(std::abs(fxi) - 1.0) > 1e-12) {
        throw HypothesisViolation("check_boundary_liminf: |f| does not tend to 1 at xi");
    }
    const double bound = boundary_slope_bound(b, c, SlopeVariant::exact);
    double tail_min = std::numeric_limits<double>::infinity();
    DiskPoint tail_point;
    std::size_t probes = 0;
    for (int k = 1; k <= liminf_depth; ++k) {
        const double h = std::ldexp(1.0, -k);
        const DiskPoint z = DiskPoint::polar(1.0 - h, xi.theta);
        const double q = std::abs(fxi - f(z)) / h;
        ++probes;
        if (k >= liminf_tail && !(q >= tail_min)) {
            tail_min = q;
            tail_point = z;
        }
    }
    detail::MarginTracker t;
    t.observe(tail_point, {tail_min - bound});
    if (zero_center) {
        t.observe(DiskPoint{}, {bound_center_estimate(c) - b, tail_min - boundary_slope_bound(0.0, c, SlopeVariant::zero_center)});
    }
    CheckReport report = t.finish(std::string(check_id::boundary_liminf),
                                  "liminf |f(xi) - f(r xi)| / (1 - r) >= (2/pi) tan(pi (1 - b) / 4) - c/2", tol);
    report.points_tested = probes;
    return report;
}

// ---------------------------------------------------------------------------
// Sharpness and non-uniqueness

/// The two-arc witness attains M_b(|z0|) at z0 = r e^{i angle}: margin -|attained - M_b(r)|.
inline CheckReport check_sharpness(double b, double r, double tol = 1e-6, double angle = 0.0) {
    detail::require_tolerance(tol);
    const DiskPoint z0 = DiskPoint::polar(r, angle);
    const ExtremalWitness w = extremal_witness(b, z0);
    const double envelope = envelope_M(b, r);
    detail::MarginTracker t;
    t.observe(z0, {w.attained - envelope, envelope - w.attained});
    return t.finish(std::string(check_id::sharpness), "sup over Har(b) of u(z0) = M_b(|z0|)", tol);
}

/// Angles at which the counterexample must have small values near the circle.
inline constexpr std::array<double, 3> nonuniqueness_angles = {0.25 * pi, 0.5 * pi, pi};

/// The counterexample is harmonic, nearly 0 at r = 0.999 off the positive
/// radius and large on it.
inline CheckReport check_nonuniqueness(const DiskField& f, double tol = 1e-6) {
    detail::require_tolerance(tol);
    constexpr double near = 0.999;
    constexpr double residual_limit = 1e-6;
    detail::MarginTracker t;
    for (double r : {0.0, 0.25, 0.5}) {
        for (double a : {0.0, 0.5 * pi, pi, 1.5 * pi}) {
            const DiskPoint z = DiskPoint::polar(r, a);
            t.observe(z, {residual_limit - std::abs(laplacian_fd_richardson(f, z))});
            if (r == 0.0) {
                break;
            }
        }
    }
    for (double a : nonuniqueness_angles) {
        const DiskPoint z = DiskPoint::polar(near, a);
        t.observe(z, {1e-2 - std::abs(f(z))});
    }
    const DiskPoint spike(near, 0.0);
    t.observe(spike, {f.real(spike) - 100.0});
    return t.finish(std::string(check_id::nonuniqueness),
                    "harmonic, |f(0.999 e^{it})| <= 1e-2 for t in {pi/4, pi/2, pi}, f(0.999) >= 100", tol);
}

// ---------------------------------------------------------------------------
// Suite

struct SkippedCheck {
    std::string check_id;
    std::uint64_t seed = 0;
    std::string reason;

    friend bool operator==(const SkippedCheck&, const SkippedCheck&) = default;
};

struct SuiteResult {
    std::vector<CheckReport> checks;
    std::vector<SkippedCheck> skipped;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckReport& r) { return r.passed; });
    }
};

struct SuiteConfig {
    /// Check ids; "all" expands to every check.
    std::vector<std::string> checks = {"all"};
    std::size_t instances = 100;
    std::uint64_t seed = 42;
    double tol = 1e-6;
    ProbeGrid grid = ProbeGrid::polar();
    unsigned threads = 1;
};

/// Sharpness pairs (b, r): b in {0, +-0.3, +-0.7} by r in {0.2, 0.5, 0.8}.
inline std::vector<std::pair<double, double>> sharpness_pairs() {
    std::vector<std::pair<double, double>> out;
    for (double b : {0.0, 0.3, -0.3, 0.7, -0.7}) {
        for (double r : {0.2, 0.5, 0.8}) {
            out.emplace_back(b, r);
        }
    }
    return out;
}

namespace detail {

/// Stream tags separating the per-instance seeds of the suite's pools.
enum class Pool : std::uint64_t {
    harmonic_real = 1,
    harmonic_complex,
    poisson_real,
    poisson_complex,
    poisson_subharmonic,
    slope,
    sharpness,
};

inline std::uint64_t pool_seed(const SuiteConfig& cfg, Pool pool, std::size_t i) {
    return derive_seed(cfg.seed, static_cast<std::uint64_t>(pool), i);
}

/// Solver settings for suite instances: quadrature ten times tighter than
/// the default check tolerance.
inline SolveOptions suite_solve_options() {
    SolveOptions o;
    o.tol = 1e-7;
    return o;
}

struct PoolEntry {
    DiskField f;
    ComplexBoundary phi;
    ComplexSource g;
    double c = 0.0;
    SlopeInstance slope;
    /// For slope entries: the field used by the liminf check (possibly rotated).
    DiskField liminf_field;
    double liminf_c = 0.0;
};

inline PoolEntry make_harmonic_real(std::uint64_t seed, std::size_t i) {
    Rng rng(derive_seed(seed, 0x70, 0));
    PoolEntry e;
    if (i % 4 == 3) {
        const double b = rng.uniform(-0.9, 0.9);
        const double rotation = rng.uniform(0.0, two_pi);
        e.phi = ComplexBoundary(step_boundary(b, rotation));
    } else {
        const double margin = rng.uniform(0.02, 0.5);
        e.phi = ComplexBoundary(random_harmonic_boundary(seed, 1 + static_cast<int>(i % 8), margin));
    }
    e.f = harmonic_extension(e.phi);
    return e;
}

inline PoolEntry make_harmonic_complex(std::uint64_t seed, std::size_t i) {
    Rng rng(derive_seed(seed, 0x70, 0));
    PoolEntry e;
    const double margin = rng.uniform(0.02, 0.5);
    e.phi = random_complex_harmonic_boundary(seed, 1 + static_cast<int>(i % 6), margin);
    e.f = harmonic_extension(e.phi);
    return e;
}

inline PoolEntry make_poisson(std::uint64_t seed, std::size_t i, bool complex, bool nonnegative) {
    Rng rng(derive_seed(seed, 0x70, 0));
    const double c = i % 10 == 0 ? 0.0 : rng.uniform(0.0, 3.0);
    PoissonInstanceOptions opts;
    opts.complex = complex;
    opts.nonnegative = nonnegative;
    opts.source_degree = static_cast<int>(i % 4);
    opts.solve = suite_solve_options();
    PoissonInstance inst = poisson_instance(seed, c, 1 + static_cast<int>(i % 6), opts);
    PoolEntry e;
    e.f = inst.f;
    e.phi = inst.phi;
    e.g = inst.g;
    e.c = inst.c;
    return e;
}

/// Slope instances cycle through: the standard instance with eps in
/// (0.01, 0.3) viewed through a random rotation for the liminf check; the
/// zero-centre instance with eps in (0.01, 0.15); and the standard instance
/// with eps in (0.3, 0.49), where the liminf hypothesis on c mostly fails.
inline PoolEntry make_slope(std::uint64_t seed, std::size_t i) {
    Rng rng(derive_seed(seed, 0x70, 0));
    SolveOptions opts = suite_solve_options();
    opts.tol = 1e-11;
    PoolEntry e;
    switch (i % 3) {
    case 0: {
        const double eps = rng.uniform(0.01, 0.3);
        e.slope = boundary_slope_instance(eps, opts);
        const double angle = rng.uniform(0.0, two_pi);
        const double lc = std::cos(angle);
        const double ls = std::sin(angle);
        // lambda f with lambda = e^{i angle}: boundary data lambda cos(theta),
        // source -4 eps lambda.
        const ComplexBoundary phi(BoundaryFunction::trig({0.0, lc}), BoundaryFunction::trig({0.0, ls}));
        const ComplexSource g(SourceField::constant(-4.0 * eps * lc), SourceField::constant(-4.0 * eps * ls),
                              4.0 * eps);
        e.liminf_field = solve_poisson(phi, g, opts);
        e.liminf_c = 4.0 * eps;
        break;
    }
    case 1:
        e.slope = zero_center_slope_instance(rng.uniform(0.01, 0.15), opts);
        e.liminf_field = e.slope.f;
        e.liminf_c = e.slope.c;
        break;
    default:
        e.slope = boundary_slope_instance(rng.uniform(0.3, 0.49), opts);
        e.liminf_field = e.slope.f;
        e.liminf_c = e.slope.c;
        break;
    }
    return e;
}

inline std::vector<std::string> expand_checks(const std::vector<std::string>& requested) {
    std::vector<std::string> out;
    for (const auto& id : requested) {
        if (id == "all") {
            for (auto known : check_id::all) {
                out.emplace_back(known);
            }
            continue;
        }
        if (std::find(check_id::all.begin(), check_id::all.end(), id) == check_id::all.end()) {
            throw std::invalid_argument("unknown check id: " + id);
        }
        out.push_back(id);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

using TaskResult = std::variant<CheckReport, SkippedCheck>;

/// Runs fn(0..n-1) on up to `threads` workers. The first exception (by
/// index) is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    auto run = [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            run(i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    run(i);
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

inline void validate(const SuiteConfig& cfg) {
    if (!(cfg.tol >= 0.0) || !std::isfinite(cfg.tol)) {
        throw std::invalid_argument("tolerance must be a non-negative finite number");
    }
    if (cfg.grid.radii.empty() || cfg.grid.angles.empty()) {
        throw std::invalid_argument("probe grid must not be empty");
    }
    if (!(cfg.grid.r_max() < 1.0)) {
        throw std::invalid_argument("probe grid must lie inside the open disk");
    }
}

} // namespace detail

/// Runs the requested checks over `instances` generated instances each.
/// Output is ordered by (check_id, seed) and independent of `threads`.
inline SuiteResult run_suite(const SuiteConfig& cfg) {
    using detail::Pool;
    using detail::PoolEntry;
    detail::validate(cfg);
    const auto ids = detail::expand_checks(cfg.checks);
    const std::size_t n = cfg.instances;

    // Which pool entries each check draws from.
    auto pool_of = [](std::string_view id, std::size_t i) -> std::optional<Pool> {
        if (id == check_id::heinz_hethcote) {
            return i % 2 == 0 ? Pool::harmonic_real : Pool::harmonic_complex;
        }
        if (id == check_id::harmonic_envelope || id == check_id::envelope_chain) {
            return Pool::harmonic_real;
        }
        if (id == check_id::complex_harmonic) {
            return i % 4 == 0 ? Pool::harmonic_real : Pool::harmonic_complex;
        }
        if (id == check_id::poisson_estimate) {
            return i % 2 == 0 ? Pool::poisson_real : Pool::poisson_complex;
        }
        if (id == check_id::poisson_envelope_upper || id == check_id::poisson_envelope_lower) {
            return Pool::poisson_real;
        }
        if (id == check_id::complex_poisson_envelope) {
            return i % 4 == 0 ? Pool::poisson_real : Pool::poisson_complex;
        }
        if (id == check_id::subharmonic_majorant) {
            return Pool::poisson_subharmonic;
        }
        if (id == check_id::boundary_slope || id == check_id::boundary_liminf) {
            return Pool::slope;
        }
        if (id == check_id::sharpness) {
            return Pool::sharpness;
        }
        return std::nullopt;
    };

    // Generate every pool entry the tasks need.
    std::map<std::pair<Pool, std::size_t>, PoolEntry> entries;
    struct Task {
        std::string id;
        std::size_t index;
        std::optional<Pool> pool;
    };
    std::vector<Task> tasks;
    for (const auto& id : ids) {
        const std::size_t count = id == check_id::nonuniqueness ? std::min<std::size_t>(n, 1) : n;
        for (std::size_t i = 0; i < count; ++i) {
            const auto pool = pool_of(id, i);
            tasks.push_back({id, i, pool});
            if (pool && *pool != Pool::sharpness) {
                entries.try_emplace({*pool, i});
            }
        }
    }
    std::vector<std::pair<std::pair<Pool, std::size_t>, PoolEntry*>> pending;
    for (auto& [key, entry] : entries) {
        pending.emplace_back(key, &entry);
    }
    detail::parallel_for(pending.size(), cfg.threads, [&](std::size_t k) {
        const auto [pool, i] = pending[k].first;
        const std::uint64_t seed = detail::pool_seed(cfg, pool, i);
        PoolEntry& e = *pending[k].second;
        switch (pool) {
        case Pool::harmonic_real:
            e = detail::make_harmonic_real(seed, i);
            break;
        case Pool::harmonic_complex:
            e = detail::make_harmonic_complex(seed, i);
            break;
        case Pool::poisson_real:
            e = detail::make_poisson(seed, i, false, false);
            break;
        case Pool::poisson_complex:
            e = detail::make_poisson(seed, i, true, false);
            break;
        case Pool::poisson_subharmonic:
            e = detail::make_poisson(seed, i, false, true);
            break;
        case Pool::slope:
            e = detail::make_slope(seed, i);
            break;
        case Pool::sharpness:
            break;
        }
    });

    const auto pairs = sharpness_pairs();
    std::vector<detail::TaskResult> results(tasks.size());
    detail::parallel_for(tasks.size(), cfg.threads, [&](std::size_t k) {
        const Task& task = tasks[k];
        const std::uint64_t seed = task.pool ? detail::pool_seed(cfg, *task.pool, task.index) : 0;
        const std::string_view id = task.id;
        try {
            CheckReport report;
            if (id == check_id::sharpness) {
                const auto [b, r] = pairs[task.index % pairs.size()];
                Rng rng(seed);
                const double angle = task.index < pairs.size() ? 0.0 : rng.uniform(0.0, two_pi);
                report = check_sharpness(b, r, cfg.tol, angle);
            } else if (id == check_id::nonuniqueness) {
                report = check_nonuniqueness(nonuniqueness_counterexample(), cfg.tol);
            } else {
                const PoolEntry& e = entries.at({*task.pool, task.index});
                if (id == check_id::heinz_hethcote) {
                    report = check_heinz_hethcote(e.f, cfg.grid, cfg.tol);
                } else if (id == check_id::harmonic_envelope) {
                    report = check_harmonic_envelope(e.f, cfg.grid, cfg.tol);
                } else if (id == check_id::complex_harmonic) {
                    report = check_complex_harmonic(e.f, cfg.grid, cfg.tol);
                } else if (id == check_id::envelope_chain) {
                    report = check_envelope_chain(e.f, cfg.grid, cfg.tol);
                } else if (id == check_id::poisson_estimate) {
                    report = check_poisson_estimate(e.f, e.phi, e.g, cfg.grid, cfg.tol);
                } else if (id == check_id::poisson_envelope_upper) {
                    report = check_poisson_envelope(e.f, e.phi, e.c, BoundSide::upper, cfg.grid, cfg.tol);
                } else if (id == check_id::poisson_envelope_lower) {
                    report = check_poisson_envelope(e.f, e.phi, e.c, BoundSide::lower, cfg.grid, cfg.tol);
                } else if (id == check_id::complex_poisson_envelope) {
                    report = check_complex_poisson_envelope(e.f, e.phi, e.c, cfg.grid, cfg.tol);
                } else if (id == check_id::subharmonic_majorant) {
                    report = check_subharmonic_majorant(e.f, e.phi, cfg.grid, cfg.tol);
                } else if (id == check_id::boundary_slope) {
                    report = check_boundary_slope(e.slope, cfg.tol);
                } else if (id == check_id::boundary_liminf) {
                    report = check_boundary_liminf(e.liminf_field, CirclePoint{0.0}, e.liminf_c, cfg.tol,
                                                   e.slope.zero_center);
                }
            }
            report.seed = seed;
            results[k] = std::move(report);
        } catch (const HypothesisViolation& ex) {
            results[k] = SkippedCheck{task.id, seed, ex.what()};
        }
    });

    SuiteResult out;
    for (auto& r : results) {
        if (auto* report = std::get_if<CheckReport>(&r)) {
            out.checks.push_back(std::move(*report));
        } else {
            out.skipped.push_back(std::get<SkippedCheck>(std::move(r)));
        }
    }
    auto by_key = [](const auto& a, const auto& b) { return std::tie(a.check_id, a.seed) < std::tie(b.check_id, b.seed); };
    std::stable_sort(out.checks.begin(), out.checks.end(), by_key);
    std::stable_sort(out.skipped.begin(), out.skipped.end(), by_key);
    return out;
}

/// Runs every check applicable to a single serialized instance.
inline SuiteResult run_instance_spec(const InstanceSpec& spec, double tol = 1e-6,
                                     const ProbeGrid& grid = ProbeGrid::polar()) {
    detail::require_tolerance(tol);
    SuiteResult out;
    std::vector<std::function<CheckReport()>> checks;
    std::vector<std::string> names;
    auto add = [&](std::string_view id, std::function<CheckReport()> fn) {
        names.emplace_back(id);
        checks.push_back(std::move(fn));
    };
    auto flag = [&](const char* key) { return spec.param(key, 0.0) != 0.0; };
    auto integer = [&](const char* key, double fallback) { return static_cast<int>(std::lround(spec.param(key, fallback))); };

    if (spec.family == family::two_arc_step || spec.family == family::trig_harmonic) {
        ComplexBoundary phi;
        if (spec.family == family::two_arc_step) {
            phi = ComplexBoundary(step_boundary(spec.param("b", 0.0), spec.param("rotation", 0.0)));
        } else if (flag("complex")) {
            phi = random_complex_harmonic_boundary(spec.seed, integer("degree", 3), spec.param("margin", 0.1));
        } else {
            phi = ComplexBoundary(random_harmonic_boundary(spec.seed, integer("degree", 3), spec.param("margin", 0.1)));
        }
        const DiskField f = harmonic_extension(phi);
        add(check_id::heinz_hethcote, [=] { return check_heinz_hethcote(f, grid, tol); });
        add(check_id::complex_harmonic, [=] { return check_complex_harmonic(f, grid, tol); });
        if (phi.is_real()) {
            add(check_id::harmonic_envelope, [=] { return check_harmonic_envelope(f, grid, tol); });
            add(check_id::envelope_chain, [=] { return check_envelope_chain(f, grid, tol); });
            add(check_id::subharmonic_majorant, [=] { return check_subharmonic_majorant(f, phi, grid, tol); });
        }
        if (spec.family == family::two_arc_step) {
            const double b = spec.param("b", 0.0);
            add(check_id::sharpness, [=] { return check_sharpness(b, spec.param("r", 0.5), tol); });
        }
    } else if (spec.family == family::poisson_instance) {
        PoissonInstanceOptions opts;
        opts.complex = flag("complex");
        opts.nonnegative = flag("nonnegative");
        opts.source_degree = integer("source_degree", 2);
        opts.margin = spec.param("margin", -1.0);
        opts.solve = detail::suite_solve_options();
        const PoissonInstance inst = poisson_instance(spec.seed, spec.param("c", 1.0), integer("degree", 3), opts);
        add(check_id::poisson_estimate, [=] { return check_poisson_estimate(inst.f, inst.phi, inst.g, grid, tol); });
        add(check_id::complex_poisson_envelope, [=] { return check_complex_poisson_envelope(inst.f, inst.phi, inst.c, grid, tol); });
        if (!opts.complex) {
            add(check_id::poisson_envelope_upper,
                [=] { return check_poisson_envelope(inst.f, inst.phi, inst.c, BoundSide::upper, grid, tol); });
            add(check_id::poisson_envelope_lower,
                [=] { return check_poisson_envelope(inst.f, inst.phi, inst.c, BoundSide::lower, grid, tol); });
            if (opts.nonnegative) {
                add(check_id::subharmonic_majorant,
                    [=] { return check_subharmonic_majorant(inst.f, inst.phi, grid, tol); });
            }
        }
    } else if (spec.family == family::boundary_slope_instance) {
        SolveOptions opts = detail::suite_solve_options();
        opts.tol = 1e-11;
        const double eps = spec.param("eps", 0.1);
        const SlopeInstance inst =
            flag("zero_center") ? zero_center_slope_instance(eps, opts) : boundary_slope_instance(eps, opts);
        add(check_id::boundary_slope, [=] { return check_boundary_slope(inst, tol); });
        add(check_id::boundary_liminf,
            [=] { return check_boundary_liminf(inst.f, CirclePoint{0.0}, inst.c, tol, inst.zero_center); });
    } else if (spec.family == family::counterexample) {
        add(check_id::nonuniqueness, [=] { return check_nonuniqueness(nonuniqueness_counterexample(), tol); });
    } else {
        throw std::invalid_argument("unknown instance family: " + spec.family);
    }

    for (std::size_t k = 0; k < checks.size(); ++k) {
        try {
            CheckReport r = checks[k]();
            r.seed = spec.seed;
            out.checks.push_back(std::move(r));
        } catch (const HypothesisViolation& ex) {
            out.skipped.push_back({names[k], spec.seed, ex.what()});
        }
    }
    std::stable_sort(out.checks.begin(), out.checks.end(),
                     [](const CheckReport& a, const CheckReport& b) { return a.check_id < b.check_id; });
    return out;
}

} // namespace diskpot
