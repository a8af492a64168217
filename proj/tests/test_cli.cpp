#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <diskpot/cli.hpp>
#include <diskpot/presets.hpp>
#include <diskpot/report_io.hpp>

using namespace diskpot;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::StartsWith;
using Catch::Matchers::WithinAbs;

namespace {

struct Run {
    int status;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "diskpot");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int status = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

std::vector<double> fields(const std::string& line) {
    std::vector<double> out;
    std::istringstream in(line);
    for (std::string item; std::getline(in, item, ',');) {
        out.push_back(std::stod(item));
    }
    return out;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("diskpot_test_" + name);
}

} // namespace

TEST_CASE("Boundary presets") {
    CHECK(parse_boundary("const:0.5")(1.0) == 0.5);
    CHECK(parse_boundary("const:+0.5")(1.0) == 0.5);
    CHECK_THAT(parse_boundary("cos:2")(0.3), WithinAbs(std::cos(0.6), 1e-15));
    CHECK_THAT(parse_boundary("sin:3")(0.3), WithinAbs(std::sin(0.9), 1e-15));
    const auto step = parse_boundary("step:0.2:1.5");
    CHECK(step.kind() == BoundaryFunction::Kind::step);
    CHECK_THAT(poisson_extension(step, DiskPoint{}), WithinAbs(0.2, 1e-15));
    // trig:c0,a1,b1,a2: c0 + a1 cos t + b1 sin t + a2 cos 2t
    CHECK_THAT(parse_boundary("trig:0.1,0.2,0.3,0.4")(0.7),
               WithinAbs(0.1 + 0.2 * std::cos(0.7) + 0.3 * std::sin(0.7) + 0.4 * std::cos(1.4), 1e-15));
    // poly restricted to the circle: x^2 y -> cos^2 t sin t
    const auto poly = parse_boundary("poly:0,0,0,0,0,0,0,1,0,0");
    for (double t : {0.0, 0.4, 2.0, 5.0}) {
        CHECK_THAT(poly(t), WithinAbs(std::cos(t) * std::cos(t) * std::sin(t), 1e-14));
    }
    CHECK_THROWS_AS(parse_boundary("cos:1.5"), PresetError);
    CHECK_THROWS_AS(parse_boundary("cos:-1"), PresetError);
    CHECK_THROWS_AS(parse_boundary("wobble:1"), PresetError);
    CHECK_THROWS_AS(parse_boundary("const"), PresetError);
    CHECK_THROWS_AS(parse_boundary("const:abc"), PresetError);
    CHECK_THROWS_AS(parse_boundary("step:1.5:0"), PresetError);
    CHECK_THROWS_AS(parse_boundary("step:0.5"), PresetError);
    CHECK_THROWS_AS(parse_boundary("trig:1,,2"), PresetError);
}

TEST_CASE("Source presets") {
    CHECK(parse_source("const:4").constant_value() == 4.0);
    const auto g = parse_source("poly:1,2,3");
    CHECK(g.kind() == SourceField::Kind::polynomial);
    CHECK_THAT(g(DiskPoint(0.5, 0.25)), WithinAbs(1.0 + 1.0 + 0.75, 1e-15));
    CHECK_THROWS_AS(parse_source("cos:1"), PresetError);
    std::string too_many = "poly:1";
    for (int i = 0; i < 200; ++i) {
        too_many += ",1";
    }
    CHECK_THROWS_AS(parse_source(too_many), PresetError);
}

TEST_CASE("Range and probe parsing") {
    const auto r = cli::parse_range("0:1:0.25");
    REQUIRE(r.size() == 5);
    CHECK(r.back() == 1.0);
    CHECK(cli::parse_range("0:1:0.1").size() == 11);
    CHECK(cli::parse_range("0:1:0.1").back() == 1.0);
    CHECK(cli::parse_range("1:0:0.5").empty());
    CHECK(cli::parse_range("0.5:0.5:1") == std::vector<double>{0.5});
    CHECK_THROWS_AS(cli::parse_range("0:1"), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_range("0:1:0"), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_range("0:1:-1"), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_range("a:1:0.1"), cli::ConfigError);

    const auto z = cli::parse_probe("0.3,-0.4");
    CHECK(z.re == 0.3);
    CHECK(z.im == -0.4);
    CHECK_THROWS_AS(cli::parse_probe("0.8,0.6"), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_probe("0.3"), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_probe("x,0"), cli::ConfigError);
}

TEST_CASE("Report serialization round trip") {
    SuiteConfig cfg;
    cfg.checks = {std::string(check_id::heinz_hethcote), std::string(check_id::sharpness)};
    cfg.instances = 2;
    const auto result = run_suite(cfg);
    const auto text = report_json(result, "all", 42, std::string("2026-01-01T00:00:00Z"));
    const auto j = nlohmann::json::parse(text);
    CHECK(j.at("suite") == "all");
    CHECK(j.at("seed") == 42);
    CHECK(j.at("generator") == "mt19937_64");
    CHECK(j.at("timestamp") == "2026-01-01T00:00:00Z");
    const auto back = j.at("checks").get<std::vector<CheckReport>>();
    CHECK(back == result.checks);
    for (const auto& item : j.at("checks")) {
        for (const char* key : {"check_id", "statement", "seed", "points_tested", "worst_margin", "worst_point",
                                "tolerance", "passed"}) {
            CHECK(item.contains(key));
        }
    }
    CHECK_FALSE(nlohmann::json::parse(report_json(result, "all", 42)).contains("timestamp"));

    CheckReport empty;
    empty.check_id = "x";
    const nlohmann::json ej = empty;
    CHECK(ej.at("worst_margin").is_null());
    CHECK(std::isinf(ej.get<CheckReport>().worst_margin));

    const SkippedCheck s{"check_boundary_liminf", 9, "c too large"};
    CHECK(nlohmann::json(s).get<SkippedCheck>() == s);

    const auto csv = lines(report_csv(result));
    CHECK(csv.front() == "check_id,seed,points,worst_margin,passed");
    CHECK(csv.size() == result.checks.size() + 1);
    CHECK_THAT(csv[1], ContainsSubstring(",true"));
}

TEST_CASE("Instance spec serialization") {
    const InstanceSpec spec{std::string(family::poisson_instance), 17, {{"c", 1.5}, {"degree", 3}}};
    CHECK(parse_instance_spec(instance_spec_json(spec)) == spec);
    CHECK(parse_instance_spec(R"({"family":"counterexample","seed":0})").params.empty());
    CHECK_THROWS(parse_instance_spec(R"({"seed":0})"));
}

TEST_CASE("Doubles are printed round-trippably") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02e23}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("bounds subcommand") {
    const auto r = run({"bounds", "--b", "0,0.5", "--r", "0:1:0.5"});
    REQUIRE(r.status == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 7);
    CHECK(rows[0] == "b,r,A,B,M,m,Mprime");
    const auto mid = fields(rows[2]);
    CHECK(mid[0] == 0.0);
    CHECK(mid[1] == 0.5);
    CHECK_THAT(mid[4], WithinAbs(4.0 / pi * std::atan(0.5), 1e-15));
    const auto last = fields(rows[6]);
    CHECK(last[0] == 0.5);
    CHECK(last[4] == 1.0);
    CHECK(last[5] == -1.0);

    CHECK(run({"bounds", "--b", "1", "--r", "0:1:0.5"}).status == 2);
    CHECK(run({"bounds", "--b", "0", "--r", "0:2:0.5"}).status == 2);
    CHECK(run({"bounds", "--b", "0"}).status == 2);
    CHECK(run({"bounds", "--b", "0", "--r", "1:0:0.1"}).out == "b,r,A,B,M,m,Mprime\n");

    const auto json = run({"bounds", "--b", "0.3", "--r", "0:1:0.5", "--format", "json"});
    REQUIRE(json.status == 0);
    const auto j = nlohmann::json::parse(json.out);
    REQUIRE(j.is_array());
    CHECK(j.size() == 3);
    CHECK(j[0].at("M") == j[0].at("b"));
}

TEST_CASE("bounds subcommand writes to a file") {
    const auto path = temp_file("bounds.csv");
    const auto r = run({"bounds", "--b", "0", "--r", "0:1:1", "--out", path.string()});
    REQUIRE(r.status == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "b,r,A,B,M,m,Mprime");
    std::filesystem::remove(path);
}

TEST_CASE("solve subcommand") {
    const auto r = run({"solve", "--phi", "cos:1", "--g", "const:4", "--probe", "0,0", "--probe", "0.2,0.1"});
    REQUIRE(r.status == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "re,im,f_re,f_im,lap_residual");
    const auto origin = fields(rows[1]);
    CHECK_THAT(origin[2], WithinAbs(-1.0, 1e-12));
    CHECK(origin[3] == 0.0);
    CHECK(std::abs(origin[4]) < 1e-3);
    const auto off = fields(rows[2]);
    CHECK_THAT(off[2], WithinAbs(0.2 - (1.0 - 0.05), 1e-10));

    const auto cplx = run({"solve", "--phi", "cos:1", "--phi-im", "sin:1", "--probe", "0.3,0.4"});
    REQUIRE(cplx.status == 0);
    const auto v = fields(lines(cplx.out)[1]);
    CHECK_THAT(v[2], WithinAbs(0.3, 1e-12));
    CHECK_THAT(v[3], WithinAbs(0.4, 1e-12));

    const auto edge = run({"solve", "--phi", "cos:1", "--probe", "0.9995,0"});
    REQUIRE(edge.status == 0);
    CHECK_THAT(lines(edge.out)[1], ContainsSubstring("nan"));

    CHECK(run({"solve", "--phi", "cos:1", "--probe", "1,0"}).status == 2);
    CHECK(run({"solve", "--phi", "wobble:3"}).status == 2);
    CHECK(run({"solve", "--g", "cos:1"}).status == 2);
    CHECK(run({"solve", "--step", "0"}).status == 2);
    CHECK(run({"solve", "--phi", "cos:1", "--probe", "0.9999999999999,0"}).status == 3);
}

TEST_CASE("verify subcommand") {
    const auto small = run({"verify", "--suite", "check_heinz_hethcote,check_sharpness", "--instances", "3"});
    REQUIRE(small.status == 0);
    const auto rows = lines(small.out);
    CHECK(rows[0] == "check_id,seed,points,worst_margin,passed");
    CHECK(rows.size() == 7);

    const auto j = run({"verify", "--suite", "check_nonuniqueness", "--format", "json"});
    REQUIRE(j.status == 0);
    const auto doc = nlohmann::json::parse(j.out);
    CHECK(doc.at("checks").size() == 1);
    CHECK(doc.at("seed") == 42);

    const auto path = temp_file("report.json");
    const auto rep =
        run({"verify", "--suite", "check_harmonic_envelope", "--instances", "2", "--report", path.string()});
    REQUIRE(rep.status == 0);
    std::ifstream in(path);
    const auto saved = nlohmann::json::parse(in);
    CHECK(saved.at("checks").size() == 2);
    std::filesystem::remove(path);

    const auto spec = run({"verify", "--instance-spec", R"({"family":"boundary-slope-instance","seed":1,"params":{"eps":0.45}})"});
    REQUIRE(spec.status == 0);
    CHECK_THAT(spec.out, ContainsSubstring("check_boundary_slope,1,"));
    CHECK_THAT(spec.err, ContainsSubstring("skipped"));

    CHECK(run({"verify", "--tol", "-1"}).status == 2);
    CHECK(run({"verify", "--suite", "check_nothing"}).status == 2);
    CHECK(run({"verify", "--rmax", "1"}).status == 2);
    CHECK(run({"verify", "--instance-spec", "{not json"}).status == 2);
    CHECK(run({"verify", "--instance-spec", R"({"family":"spiral","seed":0})"}).status == 2);
    CHECK(run({"verify", "--instance-spec", "/nonexistent/spec.json"}).status == 2);
}

TEST_CASE("verify exits 1 when a check fails") {
    // With zero tolerance the two-sided sharpness margin fails on any rounding gap.
    const auto r = run({"verify", "--instance-spec", R"({"family":"two-arc-step","seed":0,"params":{"b":0.3,"r":0.5}})",
                        "--tol", "0"});
    CHECK(r.status == 1);
    CHECK_THAT(r.out, ContainsSubstring("check_sharpness,0,1,"));
    CHECK_THAT(r.out, ContainsSubstring(",false"));
}

TEST_CASE("sharpness and boundary subcommands") {
    const auto s = run({"sharpness", "--b", "0.7", "--r", "0.8"});
    REQUIRE(s.status == 0);
    const auto rows = lines(s.out);
    CHECK(rows[0] == "b,r,attained,envelope,gap,rotation");
    const auto v = fields(rows[1]);
    CHECK(std::abs(v[4]) < 1e-6);
    CHECK_THAT(v[3], WithinAbs(envelope_M(0.7, 0.8), 1e-15));
    CHECK(run({"sharpness", "--b", "0.7", "--r", "1"}).status == 2);

    const auto b = run({"boundary", "--eps", "0.1"});
    REQUIRE(b.status == 0);
    const auto brow = lines(b.out);
    CHECK(brow[0] == "eps,b,c,fx1_exact,fx1_extrapolated,bound_exact,bound_linearized,bound_zero_center");
    const auto bv = fields(brow[1]);
    CHECK_THAT(bv[3], WithinAbs(0.8, 1e-15));
    CHECK_THAT(bv[4], WithinAbs(0.8, 1e-4));
    CHECK_THAT(bv[5], WithinAbs(2.0 / pi - 0.2, 1e-15));
    // b = 0 here, where the exact and linearized bounds coincide.
    CHECK(bv[5] - bv[6] >= -1e-15);
    CHECK(bv[6] - bv[7] >= -1e-15);
    CHECK(run({"boundary", "--eps", "0.1", "--zero-center"}).status == 0);
    CHECK(run({"boundary", "--eps", "0.6"}).status == 2);
    CHECK(run({"boundary"}).status == 2);
}

TEST_CASE("Top-level usage") {
    CHECK(run({}).status == 2);
    CHECK(run({"frobnicate"}).status == 2);
    const auto help = run({"--help"});
    CHECK(help.status == 0);
    CHECK_THAT(help.out, ContainsSubstring("bounds"));
}
