// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <diskpot/bounds.hpp>
#include <diskpot/instances.hpp>
#include <diskpot/kernels.hpp>
#include <diskpot/potentials.hpp>
#include <diskpot/quadrature.hpp>
#include <diskpot/verify.hpp>

using namespace diskpot;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Tracks the worst value of an error quantity against its limit.
class Worst {
public:
    explicit Worst(double limit) : limit_(limit) {}

    void observe(double err) {
        if (!(err <= worst_)) {
            worst_ = std::isnan(err) ? INFINITY : std::max(worst_, err);
        }
    }

    bool ok() const { return worst_ <= limit_; }
    double value() const { return worst_; }

private:
    double limit_;
    double worst_ = 0.0;
};

std::string fmt(const char* format, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::vector<double> b_grid() {
    std::vector<double> out;
    for (int i = -19; i <= 19; ++i) {
        out.push_back(0.05 * i);
    }
    return out;
}

Outcome kernel_normalization() {
    const CircleRule rule(1024);
    Worst w(1e-12);
    for (const auto& z : ProbeGrid::polar(10, 32, 0.9).points()) {
        std::vector<double> samples;
        for (double t : rule.nodes()) {
            samples.push_back(poisson_kernel(z, t));
        }
        w.observe(std::abs(integrate_circle(rule, samples) / two_pi - 1.0));
    }
    return {w.ok(), fmt("max |mean - 1| = %.3g", w.value())};
}

Outcome green_closed_form() {
    const SourceField one = SourceField::constant(1.0);
    FieldInfo info;
    const DiskField G([&](const DiskPoint& z) { return std::complex<double>(green_potential(one, z, 1e-6), 0.0); },
                      info);
    Worst value(1e-6);
    Worst lap(1e-3);
    for (const auto& z : ProbeGrid::polar(9, 16, 0.95).points()) {
        value.observe(std::abs(G.real(z) - (1.0 - z.modulus_sq()) / 4.0));
        lap.observe(std::abs(laplacian_fd(G, z, 1e-3).real() + 1.0));
    }
    return {value.ok() && lap.ok(),
            fmt("value err %.3g", value.value()) + fmt(", Laplacian err %.3g", lap.value())};
}

Outcome solver_exactness() {
    const DiskField f = solve_poisson(BoundaryFunction::cosine(1), SourceField::constant(4.0));
    Worst value(1e-6);
    Worst lap(1e-3);
    for (const auto& z : ProbeGrid::polar(9, 16, 0.8).points()) {
        value.observe(std::abs(f.real(z) - (z.re - (1.0 - z.modulus_sq()))));
        lap.observe(std::abs(laplacian_fd(f, z, 1e-3) - 4.0));
    }
    return {value.ok() && lap.ok(),
            fmt("value err %.3g", value.value()) + fmt(", Laplacian err %.3g", lap.value())};
}

Outcome envelope_identities() {
    Worst ident(1e-14);
    Worst deriv(1e-6);
    double gap = INFINITY;
    for (double b : b_grid()) {
        ident.observe(std::abs(envelope_M(b, 0.0) - b));
        ident.observe(std::abs(envelope_M(b, 1.0) - 1.0));
        ident.observe(std::abs(envelope_A(b, 1.0) - 1.0));
        const double a = coeff_a(b);
        auto M = [a](double r) { return 4.0 / pi * std::atan((a + r) / (1.0 + a * r)); };
        auto central = [&](double r, double h) { return (M(r + h) - M(r - h)) / (2.0 * h); };
        for (int i = 0; i <= 1000; ++i) {
            const double r = i / 1000.0;
            if (i % 20 == 0) {
                ident.observe(std::abs(envelope_m(b, r) + envelope_M(-b, r)));
            }
            const double fd = (4.0 * central(r, 5e-5) - central(r, 1e-4)) / 3.0;
            deriv.observe(std::abs(envelope_M_prime(b, r) - fd));
            const auto [upper, lower] = ordering_gap(b, r);
            gap = std::min({gap, upper, lower});
        }
    }
    double convex = INFINITY;
    for (int i = 0; i < 1000; ++i) {
        const double b = 1e-3 * i;
        convex = std::min(convex, boundary_slope_bound(b, 0.0, SlopeVariant::exact) -
                                      boundary_slope_bound(b, 0.0, SlopeVariant::linearized));
    }
    const bool ok = ident.ok() && deriv.ok() && gap >= -1e-14 && convex >= -1e-14;
    return {ok, fmt("identity err %.3g", ident.value()) + fmt(", M' err %.3g", deriv.value()) +
                    fmt(", min gap %.3g", gap) + fmt(", min convexity margin %.3g", convex)};
}

Outcome sharpness() {
    Worst w(1e-6);
    for (const auto& [b, r] : sharpness_pairs()) {
        w.observe(std::abs(extremal_witness(b, DiskPoint(r, 0.0)).attained - envelope_M(b, r)));
    }
    return {w.ok(), fmt("max |attained - M| = %.3g", w.value())};
}

Outcome full_suite() {
    SuiteConfig cfg;
    cfg.instances = 100;
    cfg.seed = 42;
    cfg.tol = 1e-6;
    const SuiteResult result = run_suite(cfg);
    std::size_t failed = 0;
    std::string first;
    for (const auto& c : result.checks) {
        if (!c.passed) {
            if (failed++ == 0) {
                first = ", first " + c.check_id + " seed " + std::to_string(c.seed);
            }
        }
    }
    return {result.passed(), std::to_string(result.checks.size()) + " reports, " + std::to_string(failed) +
                                 " failed" + first + ", " + std::to_string(result.skipped.size()) + " skipped"};
}

Outcome boundary_instance() {
    bool ok = true;
    double worst_agree = 0.0;
    for (double eps : {0.05, 0.1, 0.25}) {
        const SlopeInstance inst = boundary_slope_instance(eps);
        const double exact = boundary_slope_bound(inst.b, inst.c, SlopeVariant::exact);
        const double linear = boundary_slope_bound(inst.b, inst.c, SlopeVariant::linearized);
        const double zero = boundary_slope_bound(inst.b, inst.c, SlopeVariant::zero_center);
        const double agree = std::abs(radial_slope(inst.f).extrapolated - inst.fx1);
        worst_agree = std::max(worst_agree, agree);
        ok = ok && std::abs(inst.fx1 - (1.0 - 2.0 * eps)) <= 1e-15 && agree <= 1e-4;
        ok = ok && std::abs(exact - (2.0 / pi - 2.0 * eps)) <= 1e-15 && inst.fx1 >= exact;
        ok = ok && exact - linear >= -1e-14 && linear - zero >= -1e-14;
    }
    return {ok, fmt("max |extrapolated - exact| = %.3g", worst_agree)};
}

Outcome saturation() {
    bool ok = true;
    double worst = 0.0;
    ProbeGrid centre;
    centre.radii = {0.0};
    centre.angles = {0.0};
    for (double c : {0.5, 1.0, 4.0}) {
        const ComplexBoundary phi(BoundaryFunction::constant(0.0), BoundaryFunction::constant(0.0));
        const ComplexSource g(SourceField::constant(c), SourceField::constant(0.0));
        const DiskField f = solve_poisson(phi, g);
        ok = ok && std::abs(std::abs(f(DiskPoint{})) - c / 4.0) <= 1e-12;
        ok = ok && std::abs(std::abs(f(DiskPoint{})) - bound_center_estimate(c)) <= 1e-12;
        const CheckReport rep = check_poisson_estimate(f, phi, g, centre);
        worst = std::max(worst, std::abs(rep.worst_margin));
        ok = ok && rep.passed && std::abs(rep.worst_margin) <= 1e-8;
    }
    return {ok, fmt("max |margin at 0| = %.3g", worst)};
}

Outcome nonuniqueness() {
    const DiskField f = nonuniqueness_counterexample();
    Worst residual(1e-6);
    for (double r : {0.0, 0.25, 0.5, 0.75}) {
        for (double a : {0.0, 0.5 * pi, pi, 1.5 * pi}) {
            residual.observe(std::abs(laplacian_fd_richardson(f, DiskPoint::polar(r, a))));
        }
    }
    double small = 0.0;
    for (double a : nonuniqueness_angles) {
        small = std::max(small, std::abs(f(DiskPoint::polar(0.999, a))));
    }
    const double spike = f.real(DiskPoint(0.999, 0.0));
    const bool ok = residual.ok() && small <= 1e-2 && spike >= 100.0 && check_nonuniqueness(f).passed;
    return {ok, fmt("residual %.3g", residual.value()) + fmt(", max off-axis %.3g", small) +
                    fmt(", f(0.999) = %.6g", spike)};
}

struct Criterion {
    int id;
    const char* name;
    double time_limit;
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "kernel normalization", 1.0, kernel_normalization},
        {2, "Green potential closed form", 30.0, green_closed_form},
        {3, "solver exactness", INFINITY, solver_exactness},
        {4, "envelope identities", 5.0, envelope_identities},
        {5, "sharpness of the envelope", 10.0, sharpness},
        {6, "full verification suite", 300.0, full_suite},
        {7, "boundary slope instance", INFINITY, boundary_instance},
        {8, "saturation at the centre", INFINITY, saturation},
        {9, "non-uniqueness exhibit", INFINITY, nonuniqueness},
    };
    bool all = true;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.time_limit;
        const bool pass = o.ok && in_time;
        all = all && pass;
        std::printf("%s %d %s: %s; %.2f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    in_time ? "" : " (over time limit)");
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
