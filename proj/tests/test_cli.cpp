#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ao/cli.hpp"
#include "ao/errors.hpp"
#include "ao/oort.hpp"
#include "doctest.h"

using namespace ao;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

// Drive run() in-process with both streams captured.
RunResult run_capture(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
    std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
    int code = run(args);
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line))
        out.push_back(line);
    return out;
}

// Value of `key=` in a space-separated record, or "" when absent.
std::string field(const std::string& line, const std::string& key) {
    std::istringstream in(line);
    std::string token;
    while (in >> token)
        if (token.rfind(key + "=", 0) == 0)
            return token.substr(key.size() + 1);
    return "";
}

std::filesystem::path scratch_dir() {
    auto dir = std::filesystem::temp_directory_path() / "aoy1_cli_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("polynomial grammar round-trips") {
    MultiPoly f = parse_poly("x1 - x2");
    CHECK(f.n_vars() == 2);
    CHECK(f.total_degree() == 1);
    CHECK(parse_poly(render(f)) == f);

    MultiPoly g = parse_poly("3/2*x1^2*x2 + 7");
    CHECK(g.terms().size() == 2);
    CHECK(g.coefficient({2, 1}) == mpq_class(3, 2));
    CHECK(parse_poly(render(g)) == g);

    CHECK_THROWS_AS(parse_poly("x1^2*y"), ParseError);
}

TEST_CASE("config defaults, file loading, and floor checks") {
    Config def;
    CHECK(def.default_prec >= 64);
    CHECK(def.size_caps.phi_level > 0);
    CHECK(def.size_caps.search > 0);
    CHECK(def.tatuzawa.epsilon_star == mpq_class(1, 100));
    CHECK(def.cache_dir.empty());

    auto file = scratch_dir() / "cfg.json";
    {
        std::ofstream out(file);
        out << R"({"default_prec": 256,
                   "size_caps": {"phi_level": 5},
                   "tatuzawa": {"epsilon_star": "1/50", "exceptional_d": -5077},
                   "cache_dir": "/tmp/nowhere"})";
    }
    Config c = load_config(file.string());
    CHECK(c.default_prec == 256);
    CHECK(c.size_caps.phi_level == 5);
    CHECK(c.size_caps.search == def.size_caps.search);
    CHECK(c.tatuzawa.epsilon_star == mpq_class(1, 50));
    REQUIRE(c.tatuzawa.exceptional_d.has_value());
    CHECK(*c.tatuzawa.exceptional_d == -5077);
    CHECK(c.cache_dir == "/tmp/nowhere");

    {
        std::ofstream out(file);
        out << R"({"default_prec": 32})";
    }
    CHECK_THROWS_AS(load_config(file.string()), OutOfDomain);
    {
        std::ofstream out(file);
        out << R"({"size_caps": {"search": 0}})";
    }
    CHECK_THROWS_AS(load_config(file.string()), OutOfDomain);
    {
        std::ofstream out(file);
        out << "{this is not json";
    }
    CHECK_THROWS_AS(load_config(file.string()), ParseError);
    CHECK_THROWS_AS(load_config((scratch_dir() / "missing.json").string()),
                    OutOfDomain);
}

TEST_CASE("dispatch writes one record per line") {
    RunResult r = run_capture({"dnd", "--poly", "x1^3+x2^3-1"});
    CHECK(r.code == 0);
    CHECK(r.out == "dnd=true hdnd=true\n");

    r = run_capture({"dnd", "--poly", "x1^2+x2"});
    CHECK(r.code == 0);
    CHECK(field(r.out, "dnd") == "false");
    CHECK(field(r.out, "hdnd") == "false");
    CHECK(field(r.out, "witness") == "x2");

    r = run_capture({"classnum", "--range", "3", "12"});
    CHECK(r.code == 0);
    std::vector<std::string> rows = lines_of(r.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == "d=-3 h=1 fundamental=true");
    CHECK(rows[5] == "d=-12 h=1 fundamental=false");

    r = run_capture({"classnum", "--d", "-23"});
    CHECK(lines_of(r.out) ==
          std::vector<std::string>{"d=-23 h=3 fundamental=true"});

    r = run_capture({"hcp", "--disc", "-4"});
    CHECK(r.code == 0);
    CHECK(lines_of(r.out) ==
          std::vector<std::string>{"d=-4 h=1", "k=1 c=1", "k=0 c=-1728"});

    r = run_capture({"lambda", "--d", "-15"});
    rows = lines_of(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(field(rows[0], "a") == "1");
    CHECK(field(rows[1], "a") == "2");
    CHECK(field(rows[0], "tau_re") == "-5.00000000000000000e-01");

    r = run_capture({"j", "--tau", "0,1"});
    CHECK(r.code == 0);
    CHECK(std::strtod(field(r.out, "value_re").c_str(), nullptr) ==
          doctest::Approx(1728).epsilon(1e-12));
    CHECK(std::strtod(field(r.out, "value_im").c_str(), nullptr) == 0.0);

    r = run_capture({"phi", "--N", "2"});
    rows = lines_of(r.out);
    REQUIRE(!rows.empty());
    CHECK(rows[0] == "n=2 degree=3 terms=11 symmetric=true");
    CHECK(rows.size() == 12);
}

TEST_CASE("precision flag tightens reported radii") {
    RunResult lo = run_capture({"--prec", "128", "j", "--tau", "0,2"});
    RunResult hi = run_capture({"--prec", "512", "j", "--tau", "0,2"});
    REQUIRE(lo.code == 0);
    REQUIRE(hi.code == 0);
    double r_lo = std::strtod(field(lo.out, "value_re_radius").c_str(), nullptr);
    double r_hi = std::strtod(field(hi.out, "value_re_radius").c_str(), nullptr);
    CHECK(r_hi < r_lo);
    // Centers agree to the coarser precision's printed digits.
    CHECK(field(lo.out, "value_re") == field(hi.out, "value_re"));
}

TEST_CASE("compact format drops the keys") {
    RunResult r = run_capture({"--format", "compact", "hcp", "--disc", "-7"});
    CHECK(r.code == 0);
    CHECK(lines_of(r.out) ==
          std::vector<std::string>{"-7 1", "1 1", "0 3375"});
    // Option placement after the subcommand falls through to the parent.
    RunResult r2 = run_capture({"hcp", "--disc", "-7", "--format", "compact"});
    CHECK(r2.out == r.out);
}

TEST_CASE("search records points and undecided cases with exit codes") {
    RunResult r = run_capture({"search", "--poly", "x1-1728", "--bound", "10"});
    CHECK(r.code == 0);
    CHECK(lines_of(r.out) ==
          std::vector<std::string>{"point=(-4,0) status=on",
                                   "found=1 undecided=0 bound=10"});

    RunResult one = run_capture({"search", "--poly", "x1-x2", "--bound", "12"});
    RunResult par =
        run_capture({"--jobs", "3", "search", "--poly", "x1-x2", "--bound", "12"});
    CHECK(one.code == 0);
    CHECK(one.out == par.out); // canonical merge, schedule-independent

    // A rational exponentially close to a class-number-two singular modulus
    // is not separable at this precision, so the verdict must surface as
    // `undecided` and flip the exit code to 2.
    SpecialPoint p({SpecialCoord{decompose(-15), 0}});
    mpq_class near = [&] {
        const RealBall& re = p.balls(512)[0].re();
        mpz_class z;
        mpfr_exp_t e = mpfr_get_z_2exp(z.get_mpz_t(), re.center());
        mpq_class q(z);
        if (e > 0)
            mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
        else if (e < 0)
            mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(),
                         static_cast<mp_bitcnt_t>(-e));
        return q;
    }();
    std::string poly = near < 0 ? "x1+" + mpq_class(-near).get_str()
                                : "x1-" + near.get_str();
    RunResult u = run_capture({"search", "--poly", poly, "--bound", "15"});
    CHECK(u.code == 2);
    std::vector<std::string> urows = lines_of(u.out);
    REQUIRE(urows.size() == 2);
    CHECK(urows[0] == "point=(-15,0) status=undecided");
    CHECK(field(urows[1], "found") == "0");
    CHECK(field(urows[1], "undecided") == "1");
}

TEST_CASE("certify-dominance emits the transcript and verdict") {
    RunResult r = run_capture(
        {"certify-dominance", "--poly", "x1+x2-1", "--dfund", "-3"});
    CHECK(r.code == 0);
    std::vector<std::string> rows = lines_of(r.out);
    REQUIRE(rows.size() == 4); // f = 0, 1, 2 plus the summary
    CHECK(field(rows[0], "positive") == "false");
    CHECK(field(rows[1], "positive") == "false");
    CHECK(field(rows[2], "positive") == "true");
    CHECK(field(rows[3], "f0") == "2");
    CHECK(field(rows[3], "verified") == "true");

    r = run_capture({"certify-dominance", "--poly", "x1^2+x2", "--dfund", "-3"});
    CHECK(r.code == 1);
    CHECK(r.out.empty());
    CHECK(r.err.find("error:") == 0);
}

TEST_CASE("equidist and count-points report exact tallies") {
    RunResult r = run_capture({"equidist", "--range", "3", "4", "--R", "5/4"});
    CHECK(r.code == 0);
    std::vector<std::string> rows = lines_of(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "d=-3 fundamental=true h=1 inside=1 meets=true");
    CHECK(rows[1] == "d=-4 fundamental=true h=1 inside=1 meets=true");
    CHECK(rows[2] == "rows=2 violations=0");

    RunResult seq = run_capture({"equidist", "--range", "3", "40", "--R", "2"});
    RunResult par =
        run_capture({"--jobs", "4", "equidist", "--range", "3", "40", "--R", "2"});
    CHECK(seq.out == par.out);

    r = run_capture({"count-points", "--poly", "x1-x2", "--R", "2", "--H", "1"});
    CHECK(r.code == 0);
    CHECK(lines_of(r.out) ==
          std::vector<std::string>{"pool=2 on_curve=2 undecided=0"});

    r = run_capture({"count-points", "--poly", "x1+x2-1", "--R", "2", "--H", "2"});
    CHECK(r.code == 0);
    CHECK(field(r.out, "on_curve") == "0");
}

TEST_CASE("flow reports the final jet with radii") {
    RunResult r = run_capture(
        {"flow", "--from", "0,2", "--T", "0,0.1", "--step", "0.03125"});
    CHECK(r.code == 0);
    std::vector<std::string> rows = lines_of(r.out);
    REQUIRE(rows.size() == 5);
    CHECK(field(rows[0], "coord") == "tau");
    CHECK(std::strtod(field(rows[0], "value_im").c_str(), nullptr) ==
          doctest::Approx(2.1).epsilon(1e-12));
    CHECK(field(rows[1], "coord") == "j");
    CHECK(field(rows[4], "samples") != "");
}

TEST_CASE("scan-tatuzawa reports rows and the minimizer") {
    RunResult r =
        run_capture({"scan-tatuzawa", "--range", "3", "8", "--eps", "1/100"});
    CHECK(r.code == 0);
    std::vector<std::string> rows = lines_of(r.out);
    REQUIRE(rows.size() == 5); // d in {-3, -4, -7, -8} plus the summary
    CHECK(field(rows[0], "d") == "-3");
    CHECK(field(rows[0], "h") == "1");
    CHECK(field(rows[4], "argmin_d") != "");
}

TEST_CASE("disk caches round-trip and survive corruption") {
    auto dir = scratch_dir() / "cache";
    std::filesystem::remove_all(dir);
    std::vector<std::string> base = {"--cache-dir", dir.string(), "hcp",
                                     "--disc", "-23"};
    RunResult first = run_capture(base);
    CHECK(first.code == 0);
    REQUIRE(std::filesystem::exists(dir / "hcp_23.txt"));
    RunResult second = run_capture(base);
    CHECK(second.out == first.out);

    {
        std::ofstream out(dir / "hcp_23.txt");
        out << "not a coefficient\n";
    }
    RunResult repaired = run_capture(base);
    CHECK(repaired.out == first.out);

    RunResult p1 = run_capture({"--cache-dir", dir.string(), "phi", "--N", "3"});
    REQUIRE(std::filesystem::exists(dir / "phi_3.txt"));
    RunResult p2 = run_capture({"--cache-dir", dir.string(), "phi", "--N", "3"});
    CHECK(p1.code == 0);
    CHECK(p2.out == p1.out);
}

TEST_CASE("usage and runtime failures exit distinctly") {
    RunResult r = run_capture({"frobnicate"});
    CHECK(r.code == 64);
    CHECK(r.err.find("Subcommands:") != std::string::npos);

    r = run_capture({});
    CHECK(r.code == 64);

    r = run_capture({"classnum"});
    CHECK(r.code == 64);

    r = run_capture({"--prec", "32", "j", "--tau", "0,1"});
    CHECK(r.code == 64);

    r = run_capture({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("Subcommands:") != std::string::npos);

    r = run_capture({"j", "--tau", "0,-1"}); // below the half plane
    CHECK(r.code == 1);
    CHECK(r.out.empty());

    r = run_capture({"j", "--tau", "zebra,1"});
    CHECK(r.code == 1);

    r = run_capture({"hcp", "--disc", "-5"}); // not a discriminant
    CHECK(r.code == 1);
}

} // TEST_SUITE
