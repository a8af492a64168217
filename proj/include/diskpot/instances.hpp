#pragma once

// Test instances: extremal witnesses, random bounded harmonic maps, Poisson
// problems with a controlled Laplacian bound, boundary-slope instances and
// the unbounded harmonic function with zero radial limits.
//
// Randomness comes from std::mt19937_64, whose output sequence is fixed by
// the C++ standard. Doubles are formed from the top 53 bits, so a given
// (seed, parameters) pair yields bit-identical coefficients everywhere.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bounds.hpp"
#include "kernels.hpp"
#include "potentials.hpp"

namespace diskpot {

inline constexpr std::string_view generator_name = "mt19937_64";

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finaliser; mixes a base seed with a stream tag and an index.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t x = base + 0x9E3779B97F4A7C15ull * (stream + 1) + 0xBF58476D1CE4E5B9ull * index;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Instance families; the names are the serialized identifiers.
namespace family {
inline constexpr std::string_view two_arc_step = "two-arc-step";
inline constexpr std::string_view trig_harmonic = "trig-harmonic";
inline constexpr std::string_view poisson_instance = "poisson-instance";
inline constexpr std::string_view boundary_slope_instance = "boundary-slope-instance";
inline constexpr std::string_view counterexample = "counterexample";
} // namespace family

struct InstanceSpec {
    std::string family;
    std::uint64_t seed = 0;
    std::map<std::string, double> params;

    double param(const std::string& key, double fallback) const {
        const auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }

    friend bool operator==(const InstanceSpec&, const InstanceSpec&) = default;
};

// ---------------------------------------------------------------------------
// Extremal witnesses

inline BoundaryFunction step_boundary(double b, double rotation) { return BoundaryFunction::step(b, rotation); }

struct ExtremalWitness {
    DiskField field;
    double attained = 0.0;
    double rotation = 0.0;
};

/// Maximises P[step_boundary(b, rotation)](z0) over the rotation: a 64-point
/// scan brackets the maximum, golden-section search narrows the bracket to
/// 1e-10 rad.
inline ExtremalWitness extremal_witness(double b, const DiskPoint& z0) {
    detail::require_center(b, "extremal_witness");
    detail::require_interior(z0, "extremal_witness");
    auto value = [&](double rotation) { return poisson_extension(step_boundary(b, rotation), z0); };

    constexpr int scan = 64;
    const double step = two_pi / scan;
    int best_j = 0;
    double best = value(0.0);
    for (int j = 1; j < scan; ++j) {
        const double v = value(step * j);
        if (v > best) {
            best = v;
            best_j = j;
        }
    }
    constexpr double inv_phi = 0.6180339887498949;
    double lo = step * (best_j - 1);
    double hi = step * (best_j + 1);
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = value(x1);
    double f2 = value(x2);
    int iterations = 0;
    while (hi - lo > 1e-10) {
        if (++iterations > 200) {
            throw NonConvergence("extremal_witness: golden-section search did not converge", hi - lo);
        }
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = value(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = value(x1);
        }
    }
    ExtremalWitness out;
    out.rotation = f1 >= f2 ? x1 : x2;
    out.attained = std::max({f1, f2, best});
    if (best > std::max(f1, f2)) {
        out.rotation = step * best_j;
    }
    out.field = harmonic_extension(ComplexBoundary(step_boundary(b, out.rotation)));
    return out;
}

// ---------------------------------------------------------------------------
// Random harmonic maps

namespace detail {

inline BoundaryFunction random_trig(Rng& rng, int degree) {
    std::vector<double> a(static_cast<std::size_t>(degree) + 1);
    std::vector<double> b(static_cast<std::size_t>(degree));
    a[0] = rng.uniform(-1.0, 1.0);
    for (int k = 1; k <= degree; ++k) {
        a[static_cast<std::size_t>(k)] = rng.uniform(-1.0, 1.0) / k;
        b[static_cast<std::size_t>(k) - 1] = rng.uniform(-1.0, 1.0) / k;
    }
    return BoundaryFunction::trig(std::move(a), std::move(b));
}

inline BoundaryFunction scaled(const BoundaryFunction& f, double factor) {
    const auto c = f.coefficients();
    std::vector<double> a(c.size());
    std::vector<double> b(c.size() > 0 ? c.size() - 1 : 0);
    for (std::size_t k = 0; k < c.size(); ++k) {
        a[k] = factor * c[k].real();
        if (k > 0) {
            b[k - 1] = -factor * c[k].imag();
        }
    }
    return BoundaryFunction::trig(std::move(a), std::move(b));
}

inline void require_harmonic_params(int degree, double margin) {
    if (degree < 0) {
        throw DomainError("random harmonic: degree must be non-negative");
    }
    if (!(margin > 0.0 && margin < 1.0)) {
        throw DomainError("random harmonic: margin must lie in (0, 1)");
    }
}

constexpr int max_redraws = 16;

} // namespace detail

/// Random real trigonometric boundary data of the given degree, scaled so the
/// supremum of |phi| on the circle is 1 - margin.
inline BoundaryFunction random_harmonic_boundary(std::uint64_t seed, int degree, double margin) {
    detail::require_harmonic_params(degree, margin);
    Rng rng(seed);
    for (int attempt = 0; attempt < detail::max_redraws; ++attempt) {
        const BoundaryFunction raw = detail::random_trig(rng, degree);
        if (raw.sup_norm() > 0.0) {
            return detail::scaled(raw, (1.0 - margin) / raw.sup_norm());
        }
    }
    throw NonConvergence("random_harmonic: degenerate draws", 0.0);
}

/// Harmonic extension of random_harmonic_boundary; maps U into (-1, 1).
inline DiskField random_harmonic(std::uint64_t seed, int degree, double margin) {
    return harmonic_extension(ComplexBoundary(random_harmonic_boundary(seed, degree, margin)));
}

/// Random complex trigonometric boundary data with sup |phi| = 1 - margin.
inline ComplexBoundary random_complex_harmonic_boundary(std::uint64_t seed, int degree, double margin) {
    detail::require_harmonic_params(degree, margin);
    Rng rng(seed);
    for (int attempt = 0; attempt < detail::max_redraws; ++attempt) {
        const BoundaryFunction re = detail::random_trig(rng, degree);
        const BoundaryFunction im = detail::random_trig(rng, degree);
        const ComplexBoundary raw(re, im);
        if (raw.sup_norm > 0.0) {
            const double factor = (1.0 - margin) / raw.sup_norm;
            return ComplexBoundary(detail::scaled(re, factor), detail::scaled(im, factor));
        }
    }
    throw NonConvergence("random_complex_harmonic: degenerate draws", 0.0);
}

inline DiskField random_complex_harmonic(std::uint64_t seed, int degree, double margin) {
    return harmonic_extension(random_complex_harmonic_boundary(seed, degree, margin));
}

// ---------------------------------------------------------------------------
// Poisson instances

struct PoissonInstance {
    DiskField f;
    ComplexSource g;
    ComplexBoundary phi;
    double c = 0.0;
};

struct PoissonInstanceOptions {
    /// Boundary margin; negative picks max(0.05, c/4 + 0.02) (capped at 0.9)
    /// so that |f| <= 1 - margin + c/4 < 1 whenever c < 3.52.
    double margin = -1.0;
    int source_degree = 2;
    bool complex = false;
    /// Draw g with values in [0, c] (subharmonic f) instead of [-c, c].
    bool nonnegative = false;
    SolveOptions solve;
};

namespace detail {

inline Polynomial2 random_polynomial(Rng& rng, int degree) {
    const auto count = static_cast<std::size_t>((degree + 1) * (degree + 2) / 2);
    std::vector<double> coeffs(count);
    for (auto& c : coeffs) {
        c = rng.uniform(-1.0, 1.0);
    }
    return Polynomial2(std::move(coeffs));
}

inline Polynomial2 scaled(const Polynomial2& p, double factor, double shift = 0.0) {
    std::vector<double> coeffs(p.coefficients().begin(), p.coefficients().end());
    for (auto& c : coeffs) {
        c *= factor;
    }
    coeffs[0] += shift;
    return Polynomial2(std::move(coeffs));
}

/// Random real source with sup |g| = bound (or values in [0, bound]).
inline SourceField random_source(Rng& rng, int degree, double bound, bool nonnegative) {
    if (bound == 0.0) {
        return SourceField::constant(0.0);
    }
    for (int attempt = 0; attempt < max_redraws; ++attempt) {
        const Polynomial2 p = random_polynomial(rng, degree);
        const double sup = SourceField::polynomial(p).sup_norm_bound();
        if (sup > 0.0) {
            if (nonnegative) {
                // (bound / 2) (1 + p / sup) lies in [0, bound].
                return SourceField::polynomial(scaled(p, 0.5 * bound / sup, 0.5 * bound));
            }
            return SourceField::polynomial(scaled(p, bound / sup));
        }
    }
    throw NonConvergence("random source: degenerate draws", 0.0);
}

} // namespace detail

/// Random Poisson problem: phi random trigonometric data with sup 1 - margin,
/// g a random polynomial with sup |g| = c, f = P[phi] - G[g].
inline PoissonInstance poisson_instance(std::uint64_t seed, double c, int degree,
                                        const PoissonInstanceOptions& options = {}) {
    if (!(c >= 0.0)) {
        throw DomainError("poisson_instance: c must be non-negative");
    }
    const double margin = options.margin > 0.0 ? options.margin : std::min(0.9, std::max(0.05, 0.25 * c + 0.02));
    Rng rng(derive_seed(seed, 0x50, 0));
    PoissonInstance out;
    out.phi = options.complex ? random_complex_harmonic_boundary(seed, degree, margin)
                              : ComplexBoundary(random_harmonic_boundary(seed, degree, margin));
    if (options.complex) {
        const double part = c / std::sqrt(2.0);
        SourceField re = detail::random_source(rng, options.source_degree, part, options.nonnegative);
        SourceField im = detail::random_source(rng, options.source_degree, part, options.nonnegative);
        out.g = ComplexSource(std::move(re), std::move(im));
    } else {
        out.g = ComplexSource(detail::random_source(rng, options.source_degree, c, options.nonnegative));
    }
    out.c = out.g.sup_norm_bound;
    out.f = solve_poisson(out.phi, out.g, options.solve);
    return out;
}

// ---------------------------------------------------------------------------
// Boundary instances

struct SlopeInstance {
    DiskField f;
    double b = 0.0;
    double c = 0.0;
    /// Exact partial derivative f_x at z = 1.
    double fx1 = 0.0;
    bool zero_center = false;
    double eps = 0.0;
};

namespace detail {

inline void require_slope_eps(double eps) {
    if (!(eps > 0.0 && eps < 0.5)) {
        throw DomainError("boundary_slope_instance: eps must lie in (0, 1/2)");
    }
}

} // namespace detail

/// f(z) = x + eps (1 - |z|^2): boundary data cos(theta), Laplacian -4 eps,
/// f(1) = 1, f maps U into (-1, 1), b = P[f*](0) = 0, f_x(1) = 1 - 2 eps.
inline SlopeInstance boundary_slope_instance(double eps, const SolveOptions& options = {}) {
    detail::require_slope_eps(eps);
    SlopeInstance out;
    out.f = solve_poisson(BoundaryFunction::cosine(1), SourceField::constant(-4.0 * eps), options);
    out.b = 0.0;
    out.c = 4.0 * eps;
    out.fx1 = 1.0 - 2.0 * eps;
    out.eps = eps;
    return out;
}

/// f(z) = x + eps x (1 - |z|^2), the variant with f(0) = 0: boundary data
/// cos(theta), Laplacian -8 eps x, f(1) = 1, b = 0, f_x(1) = 1 - 2 eps.
inline SlopeInstance zero_center_slope_instance(double eps, const SolveOptions& options = {}) {
    detail::require_slope_eps(eps);
    SlopeInstance out;
    out.f = solve_poisson(BoundaryFunction::cosine(1), SourceField::polynomial(Polynomial2({0.0, -8.0 * eps, 0.0})),
                          options);
    out.b = 0.0;
    out.c = 8.0 * eps;
    out.fx1 = 1.0 - 2.0 * eps;
    out.zero_center = true;
    out.eps = eps;
    return out;
}

/// The harmonic function (1 - |z|^2) / |1 - z|^2: radial limit 0 at every
/// theta != 0, unbounded along the positive radius.
inline DiskField nonuniqueness_counterexample() {
    FieldInfo info;
    info.is_harmonic = true;
    info.laplacian_bound = 0.0;
    return DiskField(
        [](const DiskPoint& z) {
            detail::require_interior(z, "nonuniqueness_counterexample");
            const double dx = 1.0 - z.re;
            const double r = z.modulus();
            return std::complex<double>((1.0 - r) * (1.0 + r) / (dx * dx + z.im * z.im), 0.0);
        },
        std::move(info));
}

} // namespace diskpot
