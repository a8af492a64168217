#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <set>
#include <vector>

#include <diskpot/bounds.hpp>
#include <diskpot/instances.hpp>

using namespace diskpot;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<DiskPoint> probes(double r_max) {
    std::vector<DiskPoint> out{DiskPoint{}};
    for (int i = 1; i <= 5; ++i) {
        for (int j = 0; j < 12; ++j) {
            out.push_back(DiskPoint::polar(r_max * i / 5.0, two_pi * j / 12.0));
        }
    }
    return out;
}

double dense_max(const BoundaryFunction& phi, int n = 20000) {
    double m = 0.0;
    for (int j = 0; j < n; ++j) {
        m = std::max(m, std::abs(phi(two_pi * j / n)));
    }
    return m;
}

// Rotation scan on a 10^4-point grid followed by a local refinement.
double scan_oracle(double b, const DiskPoint& z0) {
    constexpr int n = 10000;
    double best = -INFINITY;
    int best_j = 0;
    for (int j = 0; j < n; ++j) {
        const double v = poisson_extension(step_boundary(b, two_pi * j / n), z0);
        if (v > best) {
            best = v;
            best_j = j;
        }
    }
    const double centre = two_pi * best_j / n;
    for (int j = -1000; j <= 1000; ++j) {
        best = std::max(best, poisson_extension(step_boundary(b, centre + two_pi / n * j / 1000.0), z0));
    }
    return best;
}

} // namespace

TEST_CASE("Seed derivation is deterministic and spreads streams") {
    CHECK(derive_seed(42, 1, 0) == derive_seed(42, 1, 0));
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 4; ++s) {
        for (std::uint64_t i = 0; i < 100; ++i) {
            seen.insert(derive_seed(42, s, i));
        }
    }
    CHECK(seen.size() == 400);
    Rng a(5), b(5);
    for (int i = 0; i < 10; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("Step boundary examples") {
    const auto upper = step_boundary(0.0, pi / 2);
    CHECK(upper(pi / 2) == 1.0);
    CHECK(upper(0.1) == 1.0);
    CHECK(upper(pi - 0.1) == 1.0);
    CHECK(upper(-pi / 2) == -1.0);
    CHECK(upper(-0.1) == -1.0);

    const auto [t1, t2] = step_boundary(0.5, 0.0).arc();
    CHECK_THAT(t2 - t1, WithinAbs(1.5 * pi, 1e-15));
    for (double b : {-0.8, -0.1, 0.6}) {
        CHECK_THAT(poisson_extension(step_boundary(b, 0.4), DiskPoint{}), WithinAbs(b, 1e-14));
    }
    CHECK_THROWS_AS(step_boundary(-1.0, 0.0), DomainError);

    // Exactly two jumps and values in {-1, +1}.
    const auto phi = step_boundary(0.3, 2.0);
    int jumps = 0;
    constexpr int n = 4096;
    for (int j = 0; j < n; ++j) {
        const double v = phi(two_pi * j / n);
        CHECK(std::abs(v) == 1.0);
        if (v != phi(two_pi * (j + 1) / n)) {
            ++jumps;
        }
    }
    CHECK(jumps == 2);
}

TEST_CASE("Extremal witness examples") {
    CHECK_THAT(extremal_witness(0.0, DiskPoint{}).attained, WithinAbs(0.0, 1e-14));
    const auto w = extremal_witness(0.0, DiskPoint(0.5, 0.0));
    CHECK_THAT(w.attained, WithinAbs(0.5903345, 1e-7));
    CHECK_THAT(w.attained, WithinAbs(envelope_M(0.0, 0.5), 1e-6));
    CHECK_THAT(extremal_witness(0.5, DiskPoint(0.7, 0.0)).attained, WithinAbs(envelope_M(0.5, 0.7), 1e-6));
    CHECK_THAT(w.field.real(DiskPoint(0.5, 0.0)), WithinAbs(w.attained, 1e-14));
}

TEST_CASE("Extremal witness agrees with a brute-force rotation scan") {
    for (double b : {-0.7, 0.0, 0.3}) {
        for (double r : {0.2, 0.8}) {
            const auto z0 = DiskPoint::polar(r, 1.1);
            const auto w = extremal_witness(b, z0);
            const double oracle = scan_oracle(b, z0);
            CHECK(w.attained >= oracle - 1e-9);
            CHECK(w.attained <= envelope_M(b, r) + 1e-8);
            CHECK_THAT(w.attained, WithinAbs(envelope_M(b, r), 1e-6));
        }
    }
}

TEST_CASE("Extremal witness attains the envelope on the full grid") {
    for (double b : {0.0, 0.3, -0.3, 0.7, -0.7}) {
        for (double r : {0.2, 0.5, 0.8}) {
            const auto w = extremal_witness(b, DiskPoint(r, 0.0));
            CHECK(std::abs(w.attained - envelope_M(b, r)) <= 1e-6);
        }
    }
}

TEST_CASE("Random harmonic data is scaled to 1 - margin") {
    for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
        for (int degree : {1, 3, 8}) {
            for (double margin : {0.02, 0.3}) {
                const auto phi = random_harmonic_boundary(seed, degree, margin);
                CHECK(phi.degree() <= static_cast<std::size_t>(degree));
                CHECK_THAT(phi.sup_norm(), WithinAbs(1.0 - margin, 1e-9));
                CHECK_THAT(dense_max(phi), WithinAbs(1.0 - margin, 1e-6));
                CHECK(dense_max(phi) <= phi.sup_norm() + 1e-15);
            }
        }
    }
    const auto constant = random_harmonic_boundary(7, 0, 0.1);
    CHECK(constant.degree() == 0);
    CHECK_THAT(std::abs(constant(0.0)), WithinAbs(0.9, 1e-12));
    CHECK_THROWS_AS(random_harmonic_boundary(1, -1, 0.1), DomainError);
    CHECK_THROWS_AS(random_harmonic_boundary(1, 2, 0.0), DomainError);
    CHECK_THROWS_AS(random_harmonic_boundary(1, 2, 1.0), DomainError);
}

TEST_CASE("Random harmonic maps stay inside the target") {
    for (std::uint64_t seed = 10; seed < 14; ++seed) {
        const auto f = random_harmonic(seed, 5, 0.05);
        const auto g = random_complex_harmonic(seed, 4, 0.05);
        for (const auto& z : probes(0.99)) {
            CHECK(std::abs(f(z).real()) < 1.0);
            CHECK(std::abs(g(z)) < 1.0);
        }
    }
    const auto phi = random_complex_harmonic_boundary(3, 4, 0.2);
    double m = 0.0;
    for (int j = 0; j < 20000; ++j) {
        m = std::max(m, std::abs(phi(two_pi * j / 20000.0)));
    }
    CHECK_THAT(m, WithinAbs(0.8, 1e-6));
    CHECK(m <= phi.sup_norm);
}

TEST_CASE("Generators are deterministic") {
    const auto a = random_harmonic_boundary(1234, 6, 0.1);
    const auto b = random_harmonic_boundary(1234, 6, 0.1);
    REQUIRE(a.coefficients().size() == b.coefficients().size());
    for (std::size_t k = 0; k < a.coefficients().size(); ++k) {
        CHECK(a.coefficients()[k] == b.coefficients()[k]);
    }
    const auto c = random_harmonic_boundary(1235, 6, 0.1);
    CHECK(c.coefficients()[0] != a.coefficients()[0]);

    const auto p = poisson_instance(77, 1.5, 3);
    const auto q = poisson_instance(77, 1.5, 3);
    const auto z = DiskPoint(0.3, -0.2);
    CHECK(p.f(z) == q.f(z));
    CHECK(p.g(z) == q.g(z));
    CHECK(p.c == q.c);
}

TEST_CASE("Poisson instance examples") {
    const auto harmonic = poisson_instance(5, 0.0, 3);
    CHECK(harmonic.f.info().is_harmonic);
    CHECK(harmonic.c == 0.0);

    const double c = 2.0;
    const auto inst = poisson_instance(6, c, 3);
    CHECK_THAT(inst.c, WithinRel(c, 1e-6));
    for (const auto& w : probes(1.0)) {
        CHECK(std::abs(inst.g(w)) <= inst.c);
    }
    for (const auto& z : probes(0.8)) {
        if (z.modulus() < 0.5) {
            CHECK_THAT(std::abs(laplacian_fd(inst.f, z) - inst.g(z)), WithinAbs(0.0, 1e-3));
        }
    }

    PoissonInstanceOptions opts;
    opts.nonnegative = true;
    const auto sub = poisson_instance(8, 1.0, 2, opts);
    for (const auto& w : probes(1.0)) {
        CHECK(sub.g(w).real() >= -1e-12);
    }

    opts = {};
    opts.complex = true;
    const auto cplx = poisson_instance(9, 1.0, 2, opts);
    CHECK_FALSE(cplx.phi.is_real());
    CHECK(cplx.c <= 1.0 + 1e-9);
    CHECK_THROWS_AS(poisson_instance(1, -0.5, 2), DomainError);
}

TEST_CASE("Constant source saturates the centre estimate") {
    for (double c : {0.5, 2.0, 4.0}) {
        const auto f = solve_poisson(BoundaryFunction::constant(0.0), SourceField::constant(c));
        CHECK_THAT(f.real(DiskPoint{}), WithinAbs(-c / 4.0, 1e-15));
        CHECK_THAT(std::abs(f.real(DiskPoint{})), WithinAbs(bound_center_estimate(c), 1e-15));
        const auto z = DiskPoint(0.3, 0.4);
        CHECK_THAT(f.real(z), WithinAbs(-c * (1.0 - z.modulus_sq()) / 4.0, 1e-15));
    }
}

TEST_CASE("Boundary slope instances") {
    for (double eps : {0.05, 0.1, 0.25}) {
        const auto inst = boundary_slope_instance(eps);
        CHECK(inst.b == 0.0);
        CHECK_THAT(inst.c, WithinAbs(4.0 * eps, 1e-15));
        CHECK_THAT(inst.fx1, WithinAbs(1.0 - 2.0 * eps, 1e-15));
        CHECK_THAT(inst.f.boundary_value(0.0).real(), WithinAbs(1.0, 1e-15));
        for (const auto& z : probes(0.95)) {
            const double closed = z.re + eps * (1.0 - z.modulus_sq());
            CHECK_THAT(inst.f.real(z), WithinAbs(closed, 1e-12));
            CHECK(std::abs(inst.f.real(z)) < 1.0);
        }
        CHECK(inst.fx1 >= boundary_slope_bound(inst.b, inst.c, SlopeVariant::exact));
    }
    CHECK_THAT(boundary_slope_bound(0.0, 0.4, SlopeVariant::exact), WithinAbs(0.4366, 1e-4));
    CHECK_THAT(boundary_slope_bound(0.0, 1.0, SlopeVariant::exact), WithinAbs(0.1366, 1e-4));

    const auto small = boundary_slope_instance(1e-6);
    CHECK_THAT(small.fx1, WithinAbs(1.0, 1e-5));
    CHECK(small.fx1 >= 2.0 / pi);
    CHECK_THROWS_AS(boundary_slope_instance(0.0), DomainError);
    CHECK_THROWS_AS(boundary_slope_instance(0.5), DomainError);
}

TEST_CASE("Zero-centre slope instances") {
    for (double eps : {0.05, 0.12}) {
        SolveOptions opts;
        opts.tol = 1e-10;
        const auto inst = zero_center_slope_instance(eps, opts);
        CHECK(inst.zero_center);
        CHECK_THAT(inst.c, WithinRel(8.0 * eps, 1e-6));
        CHECK_THAT(inst.f.real(DiskPoint{}), WithinAbs(0.0, 1e-10));
        for (const auto& z : probes(0.9)) {
            const double closed = z.re + eps * z.re * (1.0 - z.modulus_sq());
            CHECK_THAT(inst.f.real(z), WithinAbs(closed, 1e-9));
        }
    }
}

TEST_CASE("Non-uniqueness counterexample") {
    const auto f = nonuniqueness_counterexample();
    CHECK(f.info().is_harmonic);
    CHECK_THAT(f.real(DiskPoint{}), WithinAbs(1.0, 1e-15));
    const double r = 0.999;
    CHECK_THAT(f.real(DiskPoint(0.0, r)), WithinRel((1.0 - r * r) / (1.0 + r * r), 1e-12));
    CHECK(f.real(DiskPoint(0.0, r)) < 1.1e-3);
    for (double s : {0.9, 0.99, 0.999}) {
        CHECK_THAT(f.real(DiskPoint(s, 0.0)), WithinRel((1.0 + s) / (1.0 - s), 1e-12));
    }
    CHECK_THROWS_AS(f(DiskPoint(1.0, 0.0)), DomainError);
}
