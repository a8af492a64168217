#pragma once

// Command-line front end. run_cli() parses arguments, runs one subcommand
// and returns the process exit status:
//   0  success
//   1  a verification check failed
//   2  invalid configuration (bad flags, presets, ranges)
//   3  numerical non-convergence

#include <algorithm>
#include <cmath>
#include <ctime>
#include <limits>
#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bounds.hpp"
#include "instances.hpp"
#include "potentials.hpp"
#include "presets.hpp"
#include "report_io.hpp"
#include "verify.hpp"

namespace diskpot::cli {

enum ExitCode : int { ok = 0, check_failed = 1, config_error = 2, non_convergence = 3 };

/// Invalid configuration detected after parsing.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OutputOptions {
    std::string out;
    std::string format = "csv";
};

/// Values start, start + step, ... not exceeding stop (within 1e-12 relative).
inline std::vector<double> parse_range(const std::string& spec) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            parts.push_back(detail::parse_number(item, spec));
        } catch (const PresetError&) {
            throw ConfigError("bad grid spec '" + spec + "': expected start:stop:step");
        }
    }
    if (parts.size() != 3) {
        throw ConfigError("bad grid spec '" + spec + "': expected start:stop:step");
    }
    const double start = parts[0];
    const double stop = parts[1];
    const double step = parts[2];
    if (!(step > 0.0)) {
        throw ConfigError("bad grid spec '" + spec + "': step must be positive");
    }
    std::vector<double> out;
    const double slack = 1e-12 * std::max(1.0, std::abs(stop));
    for (std::size_t k = 0;; ++k) {
        double v = start + static_cast<double>(k) * step;
        if (v > stop + slack) {
            break;
        }
        if (std::abs(v - stop) <= slack) {
            v = stop;
        }
        out.push_back(v);
        if (out.size() > 10'000'000) {
            throw ConfigError("grid spec '" + spec + "' has too many points");
        }
    }
    return out;
}

inline DiskPoint parse_probe(const std::string& spec) {
    const auto comma = spec.find(',');
    if (comma == std::string::npos) {
        throw ConfigError("bad probe '" + spec + "': expected x,y");
    }
    try {
        const DiskPoint z(detail::parse_number(spec.substr(0, comma), spec),
                          detail::parse_number(spec.substr(comma + 1), spec));
        if (!(z.modulus_sq() < 1.0)) {
            throw ConfigError("probe '" + spec + "' lies outside the open unit disk");
        }
        return z;
    } catch (const PresetError&) {
        throw ConfigError("bad probe '" + spec + "': expected x,y");
    }
}

namespace internal {

inline void emit(const OutputOptions& o, const std::string& text, std::ostream& out) {
    if (o.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(o.out, std::ios::binary);
    if (!file) {
        throw ConfigError("cannot open output file '" + o.out + "'");
    }
    file << text;
}

inline std::string csv_row(std::initializer_list<double> values) {
    std::string row;
    for (double v : values) {
        if (!row.empty()) {
            row += ',';
        }
        row += format_double(v);
    }
    return row + "\n";
}

inline void add_output_flags(CLI::App* sub, OutputOptions& o) {
    sub->add_option("--out", o.out, "Write output to this file instead of standard output");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

inline std::string read_instance_spec(const std::string& arg) {
    if (!arg.empty() && arg.front() == '{') {
        return arg;
    }
    std::ifstream in(arg);
    if (!in) {
        throw ConfigError("cannot read instance spec '" + arg + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace internal

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Potential theory on the unit disk: envelopes, Poisson solver and inequality checks"};
    app.require_subcommand(1);

    // bounds
    OutputOptions bounds_out;
    std::vector<double> bounds_b;
    std::string bounds_r;
    auto* bounds = app.add_subcommand("bounds", "Tabulate A_b, B_b, M_b, m_b and M_b' on a grid");
    bounds->add_option("--b", bounds_b, "Centre values in (-1, 1)")->required()->delimiter(',');
    bounds->add_option("--r", bounds_r, "Radius grid start:stop:step within [0, 1]")->required();
    internal::add_output_flags(bounds, bounds_out);

    // solve
    OutputOptions solve_out;
    std::string solve_phi = "const:0";
    std::string solve_g = "const:0";
    std::string solve_phi_im;
    std::string solve_g_im;
    std::vector<std::string> solve_probes;
    double solve_tol = 1e-10;
    double solve_h = 1e-3;
    auto* solve = app.add_subcommand("solve", "Solve Laplacian f = g with f = phi on the circle");
    solve->add_option("--phi", solve_phi, "Boundary preset (real part)");
    solve->add_option("--g", solve_g, "Source preset (real part)");
    solve->add_option("--phi-im", solve_phi_im, "Boundary preset, imaginary part");
    solve->add_option("--g-im", solve_g_im, "Source preset, imaginary part");
    solve->add_option("--probe", solve_probes, "Probe point x,y (repeatable)");
    solve->add_option("--tol", solve_tol, "Green-potential tolerance");
    solve->add_option("--step", solve_h, "Finite-difference step of the Laplacian residual");
    internal::add_output_flags(solve, solve_out);

    // verify
    OutputOptions verify_out;
    std::vector<std::string> verify_suite{"all"};
    std::size_t verify_instances = 100;
    std::uint64_t verify_seed = 42;
    double verify_tol = 1e-6;
    double verify_rmax = 0.95;
    std::string verify_report;
    std::string verify_spec;
    unsigned verify_threads = 1;
    bool verify_timestamp = false;
    auto* verify = app.add_subcommand("verify", "Run the inequality checks over generated instances");
    verify->add_option("--suite", verify_suite, "'all' or check ids")->delimiter(',');
    verify->add_option("--instances", verify_instances, "Instances per check");
    verify->add_option("--seed", verify_seed, "Base seed");
    verify->add_option("--tol", verify_tol, "Violation tolerance");
    verify->add_option("--rmax", verify_rmax, "Largest probe radius");
    verify->add_option("--report", verify_report, "Write the JSON report to this file");
    verify->add_option("--instance-spec", verify_spec, "Check a single instance (inline JSON or file)");
    verify->add_option("--threads", verify_threads, "Worker threads");
    verify->add_flag("--timestamp", verify_timestamp, "Record the wall-clock time in the JSON report");
    internal::add_output_flags(verify, verify_out);

    // sharpness
    OutputOptions sharp_out;
    double sharp_b = 0.0;
    double sharp_r = 0.0;
    auto* sharp = app.add_subcommand("sharpness", "Compare the two-arc witness with M_b(r)");
    sharp->add_option("--b", sharp_b, "Centre value in (-1, 1)")->required();
    sharp->add_option("--r", sharp_r, "Radius in [0, 1)")->required();
    internal::add_output_flags(sharp, sharp_out);

    // boundary
    OutputOptions boundary_out;
    double boundary_eps = 0.1;
    bool boundary_zero = false;
    auto* boundary = app.add_subcommand("boundary", "Boundary slope instance against its lower bounds");
    boundary->add_option("--eps", boundary_eps, "Instance parameter in (0, 1/2)")->required();
    boundary->add_flag("--zero-center", boundary_zero, "Use the instance with f(0) = 0");
    internal::add_output_flags(boundary, boundary_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return config_error;
    }

    try {
        if (bounds->parsed()) {
            for (double b : bounds_b) {
                if (!(b > -1.0 && b < 1.0)) {
                    throw ConfigError("--b " + format_double(b) + " lies outside (-1, 1)");
                }
            }
            const auto radii = parse_range(bounds_r);
            for (double r : radii) {
                if (!(r >= 0.0 && r <= 1.0)) {
                    throw ConfigError("--r grid leaves [0, 1]");
                }
            }
            std::sort(bounds_b.begin(), bounds_b.end());
            std::string text;
            nlohmann::json rows = nlohmann::json::array();
            if (bounds_out.format == "csv") {
                text = "b,r,A,B,M,m,Mprime\n";
            }
            for (double b : bounds_b) {
                for (double r : radii) {
                    const double A = envelope_A(b, r);
                    const double B = envelope_B(b, r);
                    const double M = envelope_M(b, r);
                    const double m = envelope_m(b, r);
                    const double Mp = envelope_M_prime(b, r);
                    if (bounds_out.format == "csv") {
                        text += internal::csv_row({b, r, A, B, M, m, Mp});
                    } else {
                        rows.push_back({{"b", b}, {"r", r}, {"A", A}, {"B", B}, {"M", M}, {"m", m}, {"Mprime", Mp}});
                    }
                }
            }
            if (bounds_out.format == "json") {
                text = rows.dump(2) + "\n";
            }
            internal::emit(bounds_out, text, out);
            return ok;
        }

        if (solve->parsed()) {
            if (!(solve_tol > 0.0) || !(solve_h > 0.0)) {
                throw ConfigError("--tol and --step must be positive");
            }
            const BoundaryFunction phi_re = parse_boundary(solve_phi);
            const BoundaryFunction phi_im =
                solve_phi_im.empty() ? BoundaryFunction::constant(0.0) : parse_boundary(solve_phi_im);
            const SourceField g_re = parse_source(solve_g);
            const SourceField g_im = solve_g_im.empty() ? SourceField::constant(0.0) : parse_source(solve_g_im);
            std::vector<DiskPoint> probes;
            if (solve_probes.empty()) {
                probes.emplace_back(0.0, 0.0);
            }
            for (const auto& p : solve_probes) {
                probes.push_back(parse_probe(p));
            }
            SolveOptions opts;
            opts.tol = solve_tol;
            const ComplexSource g(g_re, g_im);
            const DiskField f = solve_poisson(ComplexBoundary(phi_re, phi_im), g, opts);
            std::string text = solve_out.format == "csv" ? "re,im,f_re,f_im,lap_residual\n" : "";
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& z : probes) {
                const auto v = f(z);
                double residual = std::numeric_limits<double>::quiet_NaN();
                if (z.modulus() + 2.0 * solve_h < 1.0) {
                    residual = std::abs(laplacian_fd(f, z, solve_h) - g(z));
                }
                if (solve_out.format == "csv") {
                    text += internal::csv_row({z.re, z.im, v.real(), v.imag(), residual});
                } else {
                    rows.push_back({{"re", z.re},
                                    {"im", z.im},
                                    {"f_re", v.real()},
                                    {"f_im", v.imag()},
                                    {"lap_residual", detail::number_or_null(residual)}});
                }
            }
            if (solve_out.format == "json") {
                text = rows.dump(2) + "\n";
            }
            internal::emit(solve_out, text, out);
            return ok;
        }

        if (verify->parsed()) {
            if (!(verify_tol >= 0.0) || !std::isfinite(verify_tol)) {
                throw ConfigError("--tol must be a non-negative number");
            }
            if (!(verify_rmax >= 0.0 && verify_rmax < 1.0)) {
                throw ConfigError("--rmax must lie in [0, 1)");
            }
            SuiteResult result;
            std::string suite_name;
            std::uint64_t seed = verify_seed;
            const ProbeGrid grid = ProbeGrid::polar(9, 16, verify_rmax);
            if (!verify_spec.empty()) {
                InstanceSpec spec;
                try {
                    spec = parse_instance_spec(internal::read_instance_spec(verify_spec));
                } catch (const nlohmann::json::exception& e) {
                    throw ConfigError(std::string("bad instance spec: ") + e.what());
                }
                suite_name = "instance:" + spec.family;
                seed = spec.seed;
                try {
                    result = run_instance_spec(spec, verify_tol, grid);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(e.what());
                }
            } else {
                SuiteConfig cfg;
                cfg.checks = verify_suite;
                cfg.instances = verify_instances;
                cfg.seed = verify_seed;
                cfg.tol = verify_tol;
                cfg.grid = grid;
                cfg.threads = verify_threads;
                try {
                    detail::expand_checks(cfg.checks);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(e.what());
                }
                for (std::size_t i = 0; i < verify_suite.size(); ++i) {
                    suite_name += (i ? "," : "") + verify_suite[i];
                }
                result = run_suite(cfg);
            }
            std::optional<std::string> stamp;
            if (verify_timestamp) {
                const std::time_t now = std::time(nullptr);
                char buf[32];
                std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
                stamp = buf;
            }
            const std::string json = report_json(result, suite_name, seed, stamp);
            if (!verify_report.empty()) {
                std::ofstream file(verify_report, std::ios::binary);
                if (!file) {
                    throw ConfigError("cannot open report file '" + verify_report + "'");
                }
                file << json;
            }
            internal::emit(verify_out, verify_out.format == "csv" ? report_csv(result) : json, out);
            for (const auto& s : result.skipped) {
                err << "skipped " << s.check_id << " seed " << s.seed << ": " << s.reason << "\n";
            }
            return result.passed() ? ok : check_failed;
        }

        if (sharp->parsed()) {
            if (!(sharp_b > -1.0 && sharp_b < 1.0)) {
                throw ConfigError("--b must lie in (-1, 1)");
            }
            if (!(sharp_r >= 0.0 && sharp_r < 1.0)) {
                throw ConfigError("--r must lie in [0, 1)");
            }
            const ExtremalWitness w = extremal_witness(sharp_b, DiskPoint(sharp_r, 0.0));
            const double envelope = envelope_M(sharp_b, sharp_r);
            const double gap = std::abs(envelope - w.attained);
            std::string text;
            if (sharp_out.format == "csv") {
                text = "b,r,attained,envelope,gap,rotation\n" +
                       internal::csv_row({sharp_b, sharp_r, w.attained, envelope, gap, w.rotation});
            } else {
                text = nlohmann::json{{"b", sharp_b},           {"r", sharp_r}, {"attained", w.attained},
                                      {"envelope", envelope}, {"gap", gap},   {"rotation", w.rotation}}
                           .dump(2) +
                       "\n";
            }
            internal::emit(sharp_out, text, out);
            return ok;
        }

        if (boundary->parsed()) {
            if (!(boundary_eps > 0.0 && boundary_eps < 0.5)) {
                throw ConfigError("--eps must lie in (0, 1/2)");
            }
            SolveOptions opts;
            opts.tol = 1e-11;
            const SlopeInstance inst = boundary_zero ? zero_center_slope_instance(boundary_eps, opts)
                                                     : boundary_slope_instance(boundary_eps, opts);
            const SlopeEstimate est = radial_slope(inst.f);
            const double exact = boundary_slope_bound(inst.b, inst.c, SlopeVariant::exact);
            const double linear = boundary_slope_bound(inst.b, inst.c, SlopeVariant::linearized);
            const double zero = boundary_slope_bound(inst.b, inst.c, SlopeVariant::zero_center);
            std::string text;
            if (boundary_out.format == "csv") {
                text = "eps,b,c,fx1_exact,fx1_extrapolated,bound_exact,bound_linearized,bound_zero_center\n" +
                       internal::csv_row({inst.eps, inst.b, inst.c, inst.fx1, est.extrapolated, exact, linear, zero});
            } else {
                text = nlohmann::json{{"eps", inst.eps},
                                      {"b", inst.b},
                                      {"c", inst.c},
                                      {"fx1_exact", inst.fx1},
                                      {"fx1_extrapolated", est.extrapolated},
                                      {"bound_exact", exact},
                                      {"bound_linearized", linear},
                                      {"bound_zero_center", zero}}
                           .dump(2) +
                       "\n";
            }
            internal::emit(boundary_out, text, out);
            return ok;
        }
    } catch (const NonConvergence& e) {
        err << "error: " << e.what() << " (achieved error " << format_double(e.achieved_error()) << ")\n";
        return non_convergence;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return config_error;
    } catch (const PresetError& e) {
        err << "error: " << e.what() << "\n";
        return config_error;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return config_error;
    }
    return config_error;
}

} // namespace diskpot::cli
