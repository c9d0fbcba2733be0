#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "cli.hpp"
#include "struve/landscape.hpp"

using struve::cli::parse_complex;
using struve::cli::run;
using cplx = std::complex<double>;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result call(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> parts;
    std::stringstream ss(line);
    for (std::string p; std::getline(ss, p, sep);) parts.push_back(p);
    return parts;
}

std::vector<std::string> lines(const std::string& text)
{
    return split(text, '\n');
}

}  // namespace

TEST_CASE("complex literals")
{
    CHECK(parse_complex("0.6") == cplx(0.6, 0));
    CHECK(parse_complex("-2") == cplx(-2, 0));
    CHECK(parse_complex("1+0.6i") == cplx(1, 0.6));
    CHECK(parse_complex("1-0.3i") == cplx(1, -0.3));
    CHECK(parse_complex("0.25i") == cplx(0, 0.25));
    CHECK(parse_complex("-.5i") == cplx(0, -0.5));
    CHECK(parse_complex("1e-3+2E2i") == cplx(1e-3, 200));
    for (const char* bad : {"", "i", "1 + 2i", " 1", "1+i", "1+2j", "abc", "1+2i+3", "1.2.3", "+-1"})
        CHECK_FALSE(parse_complex(bad).has_value());
}

TEST_CASE("coeffs")
{
    const auto r = call({"coeffs", "--kmax", "2"});
    CHECK(r.code == 0);
    CHECK(r.out == "c0 = 1\nc1 = 2q\nc2 = 6q^2 - 1/2\n");

    const auto j = call({"coeffs", "--kmax", "2", "--json"});
    const auto doc = nlohmann::json::parse(j.out);
    REQUIRE(doc.size() == 3);
    CHECK(doc[2]["coefficients"] == nlohmann::json({"-1/2", "0/1", "6/1"}));

    CHECK(call({"coeffs", "--kmax", "-1"}).code == 1);
    CHECK(call({"coeffs"}).code == 1);
}

TEST_CASE("classify")
{
    CHECK(call({"classify", "--q", "0.60", "--theta-pi", "0"}).out == "ToInfinity\n");
    CHECK(call({"classify", "--q", "1+0.6i", "--theta-pi", "0.1"}).out == "ToPlusI\n");
    CHECK(call({"classify", "--q=1-0.3i"}).out == "ToMinusI\n");
    const auto j = nlohmann::json::parse(call({"classify", "--q", "0.6", "--json"}).out);
    CHECK(j["label"] == "ToInfinity");
}

TEST_CASE("usage errors")
{
    CHECK(call({}).code == 1);
    CHECK(call({"frobnicate"}).code == 1);
    CHECK(call({"classify", "--q", "0.6", "--unknown"}).code == 1);
    CHECK(call({"classify", "--q", "0.6 + 1i"}).code == 1);
    CHECK(call({"classify", "--q", "0.6", "--theta-pi", "0.5"}).code == 1);
    // Re(q e^{i theta}) < 0 lies outside the sector
    const auto r = call({"classify", "--q", "-1", "--theta-pi", "0"});
    CHECK(r.code == 1);
    CHECK(r.err.find("admissible") != std::string::npos);
    CHECK(call({"curves", "--branch", "sideways"}).code == 1);
    CHECK(call({"critical-beta", "--alpha", "0.8", "--lo", "1", "--hi", "0"}).code == 1);
    CHECK(call({"--help"}).code == 0);
}

TEST_CASE("computation errors carry the error name")
{
    const auto r = call({"critical-beta", "--alpha", "0.8", "--lo", "0.3", "--hi", "0.5"});
    CHECK(r.code == 3);
    CHECK(r.err.find("BracketInvalid") != std::string::npos);
    const auto e = call({"eval", "--q", "1", "--theta-pi", "0.1", "--modulus", "40", "--kmax", "10"});
    CHECK(e.code == 0);
}

TEST_CASE("critical-beta, triple-point and intercept")
{
    const auto b = call({"critical-beta", "--alpha", "0.8", "--lo", "0.01", "--hi", "0.5"});
    REQUIRE(b.code == 0);
    CHECK(std::abs(std::stod(b.out) - 0.143900) < 1e-5);
    CHECK(call({"triple-point", "--theta-pi", "0"}).out == "P = 1+0i\n");
    const auto p = nlohmann::json::parse(call({"triple-point", "--theta-pi", "0.1", "--json"}).out);
    CHECK(std::abs(p["re_P"].get<double>() - 0.93778) < 5e-5);
    CHECK(std::abs(p["im_P"].get<double>() - 0.18745) < 5e-5);
    const auto q = call({"intercept", "--theta-pi", "0.1"});
    CHECK(q.out.rfind("Q = 0.7095", 0) == 0);
}

TEST_CASE("trace output reads back")
{
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = (dir / "struve_cli_trace.csv").string();
    REQUIRE(call({"trace", "--q", "0.6+0.4i", "--theta-pi", "0.1", "--out", path}).code == 0);
    std::ifstream in(path);
    const auto rows = struve::landscape::read_path_csv(in);
    CHECK(rows.size() > 10);

    const auto j = nlohmann::json::parse(call({"trace", "--q", "0.6+0.4i", "--theta-pi", "0.1", "--json"}).out);
    REQUIRE(j["rows"].size() == rows.size());
    CHECK(j["terminal"] == "ToInfinity");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(j["rows"][i]["re_u"].get<double>() == rows[i].re_u);
        CHECK(j["rows"][i]["winding"].get<int>() == rows[i].winding);
    }
    std::filesystem::remove(path);
}

TEST_CASE("curves")
{
    const auto r = call({"curves", "--theta-pi", "0.1", "--branch", "lower", "--arc", "0.2", "--step", "0.05"});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    CHECK(ls.front() == "re_q,im_q,branch,theta");
    CHECK(ls.size() >= 4);
    const auto all = call({"curves", "--theta-pi", "0.1", "--arc", "0.1", "--step", "0.05"});
    const auto al = lines(all.out);
    CHECK(std::count(al.begin(), al.end(), std::string("re_q,im_q,branch,theta")) == 1);
    const auto j = nlohmann::json::parse(call({"curves", "--theta-pi", "0.1", "--arc", "0.1", "--step", "0.05", "--json"}).out);
    CHECK(j.size() == 3);
}

TEST_CASE("eval CSV and JSON agree field for field")
{
    const std::vector<std::string> base{"eval", "--q", "1+0.6i", "--theta-pi", "0.1"};
    const auto csv = call(base);
    auto jargs = base;
    jargs.push_back("--json");
    const auto js = call(jargs);
    REQUIRE(csv.code == 0);
    REQUIRE(js.code == 0);
    const auto ls = lines(csv.out);
    REQUIRE(ls.size() == 2);
    const auto keys = split(ls[0], ',');
    const auto vals = split(ls[1], ',');
    const auto doc = nlohmann::json::parse(js.out);
    REQUIRE(doc.size() == 1);
    REQUIRE(keys.size() == vals.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        INFO(keys[i]);
        const auto& v = doc[0].at(keys[i]);
        if (v.is_string())
            CHECK(v.get<std::string>() == vals[i]);
        else if (keys[i].rfind("rel_err", 0) == 0)
            CHECK(std::abs(v.get<double>() - std::stod(vals[i])) <= 1e-6 * v.get<double>());
        else
            CHECK(v.get<double>() == std::stod(vals[i]));
    }
    CHECK(vals[3] == "+i");
}

TEST_CASE("identical invocations give identical bytes")
{
    const std::vector<std::string> args{"table2", "--jobs", "4"};
    const auto a = call(args);
    const auto b = call({"table2", "--jobs", "1"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(call({"eval", "--q", "0.6"}).out == call({"eval", "--q", "0.6"}).out);
}

TEST_CASE("table checks")
{
    const auto t1 = call({"table1", "--check"});
    CHECK(t1.code == 0);
    CHECK(t1.out.find("FAIL") == std::string::npos);

    // only the row whose printed Im P has transposed digits is off
    const auto t2 = call({"table2", "--check"});
    CHECK(t2.code == 2);
    for (const auto& l : lines(t2.out)) {
        if (l.rfind("table2 ", 0) != 0) continue;
        const bool typo_row = l.rfind("table2 theta/pi=0.05:", 0) == 0;
        CHECK(l.ends_with(typo_row ? "FAIL" : "PASS"));
    }
    CHECK(call({"table2", "--check", "--tol", "5e-4"}).code == 2);

    // one printed error exponent is off by one
    const auto t3 = call({"table3", "--check"});
    CHECK(t3.code == 2);
    int failures = 0;
    for (const auto& l : lines(t3.out)) {
        if (l.rfind("table3 ", 0) != 0 || !l.ends_with("FAIL")) continue;
        ++failures;
        CHECK(l.rfind("table3 q=1+0.6i theta/pi=0.10:", 0) == 0);
    }
    CHECK(failures == 1);
}

TEST_CASE("precision from the environment")
{
    ::setenv(struve::cli::kDigitsEnv, "5", 1);
    CHECK(call({"eval", "--q", "0.6"}).code == 1);
    ::setenv(struve::cli::kDigitsEnv, "60", 1);
    const auto r = call({"eval", "--q", "0.6"});
    ::unsetenv(struve::cli::kDigitsEnv);
    CHECK(r.code == 0);
    CHECK(r.out == call({"eval", "--q", "0.6"}).out);
}
