#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "struve/errors.hpp"
#include "struve/landscape.hpp"

using namespace struve::landscape;

namespace {

constexpr double kPi = std::numbers::pi;

Parameters params(cplx q, double theta_over_pi)
{
    return {q, theta_over_pi * kPi};
}

DomainLabel mirror(DomainLabel l)
{
    if (l == DomainLabel::ToPlusI) return DomainLabel::ToMinusI;
    if (l == DomainLabel::ToMinusI) return DomainLabel::ToPlusI;
    return l;
}

// Admissible (q, theta) with Re(q e^{i theta}) bounded away from zero.
struct RandomParameters {
    std::mt19937_64 rng;
    explicit RandomParameters(unsigned seed) : rng(seed) {}

    Parameters operator()()
    {
        std::uniform_real_distribution<double> angle(-0.45 * kPi, 0.45 * kPi);
        std::uniform_real_distribution<double> logmod(std::log(0.05), std::log(5.0));
        const double theta = angle(rng);
        const double psi = angle(rng);  // arg(q e^{i theta})
        return {std::polar(std::exp(logmod(rng)), psi - theta), theta};
    }
};

}  // namespace

TEST_CASE("phase at simple points")
{
    CHECK(std::abs(phase({0.0, 0.0}, params(1.0, 0))) == 0.0);
    const PhasePoint one{1.0, std::log(2.0)};
    CHECK(phase(one, params(1.0, 0)).real() == doctest::Approx(1 - std::log(2.0)).epsilon(1e-15));
    CHECK(phase(one, params(1.0, 0)).real() == doctest::Approx(0.306853).epsilon(1e-6));
    CHECK(phase(one, params(0.5, 0)).real() == doctest::Approx(1 - 0.5 * std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("phase derivative")
{
    const auto p = params({0.3, 0.2}, 0.17);
    const cplx d0 = phase_derivative(cplx{0.0, 0.0}, p);
    CHECK(std::abs(d0 - std::polar(1.0, p.theta)) < 1e-15);
    CHECK(std::abs(phase_derivative(cplx{1.0, 0.0}, params(1.0, 0))) < 1e-15);
    CHECK_THROWS_AS(phase_derivative(cplx{0.0, 1.0}, p), struve::BranchPointError);
    CHECK_THROWS_AS(phase_derivative(cplx{0.0, -1.0}, p), struve::BranchPointError);

    // against a central difference of tau with continuously tracked logval
    const cplx u{0.4, -0.7};
    const double h = 1e-6;
    const auto at = [&](cplx v) { return phase(PhasePoint::principal(v), p); };
    const cplx fd = (at(u + h) - at(u - h)) / (2 * h);
    CHECK(std::abs(fd - phase_derivative(u, p)) < 1e-8);
}

TEST_CASE("saddle points")
{
    const auto d = saddle_points(1.0);
    CHECK(d.is_double);
    CHECK(std::abs(d.u_plus - 1.0) < 1e-15);
    CHECK(std::abs(d.u_minus - 1.0) < 1e-15);

    const auto a = saddle_points(1.25);
    CHECK_FALSE(a.is_double);
    CHECK(std::abs(a.u_plus - 2.0) < 1e-15);
    CHECK(std::abs(a.u_minus - 0.5) < 1e-15);

    const auto b = saddle_points({0.0, 1.0});
    CHECK(std::abs(b.u_plus - cplx(0, 1 + std::sqrt(2.0))) < 1e-14);
    CHECK(std::abs(b.u_minus - cplx(0, 1 - std::sqrt(2.0))) < 1e-14);
}

TEST_CASE("saddle product and stationarity on random q")
{
    RandomParameters gen(11);
    for (int i = 0; i < 1000; ++i) {
        const auto p = gen();
        const auto s = saddle_points(p.q);
        CHECK(std::abs(s.u_plus * s.u_minus - 1.0) < 1e-14);
        CHECK(std::abs(s.u_plus) >= std::abs(s.u_minus) * (1 - 1e-12));
        for (cplx u : {s.u_plus, s.u_minus})
            CHECK(std::abs(phase_derivative(u, p)) < 1e-12 * std::max(1.0, std::abs(p.q)));
    }
}

TEST_CASE("sheet tracking")
{
    // one loop around +i picks up 2 pi i
    PhasePoint p = PhasePoint::principal({0.0, 0.5});
    const int n = 64;
    for (int k = 1; k <= n; ++k) p = continue_to(p, cplx(0, 1) + 0.5 * std::polar(1.0, -kPi / 2 + 2 * kPi * k / n));
    CHECK(p.sheet() == 1);
    CHECK(std::abs(std::exp(p.logval) - one_plus_u2(p.u)) < 1e-13);
    CHECK_THROWS_AS(continue_to(PhasePoint::principal(0.0), cplx(0, 2)), struve::ContinuationAmbiguous);
}

TEST_CASE("trace endpoints on the real axis")
{
    const auto tr = trace_steepest(params(0.5, 0));
    CHECK(tr.terminal == DomainLabel::ToInfinity);
    for (const auto& p : tr.points) CHECK(p.u.imag() == 0.0);
    CHECK(classify_endpoint(params(0.60, 0)) == DomainLabel::ToInfinity);
    // real q >= 1 at theta = 0: the path runs into S2 on the real axis
    CHECK(classify_endpoint(params(1.25, 0)) == DomainLabel::OnTransition);
    CHECK(classify_endpoint(params(1.0, 0)) == DomainLabel::OnTransition);
}

TEST_CASE("trace endpoints at the reference error rows")
{
    CHECK(classify_endpoint(params({1.0, 0.6}, 0)) == DomainLabel::ToPlusI);
    CHECK(classify_endpoint(params(1.25, 0.10)) == DomainLabel::ToMinusI);
    CHECK(classify_endpoint(params({0.6, 0.4}, 0.10)) == DomainLabel::ToInfinity);
    CHECK(classify_endpoint(params({1.0, -0.3}, 0)) == DomainLabel::ToMinusI);
}

TEST_CASE("termination at a branch point")
{
    const auto tr = trace_steepest(params({1.0, 0.6}, 0.10));
    REQUIRE(tr.terminal == DomainLabel::ToPlusI);
    CHECK(std::abs(tr.points.back().u - cplx(0, 1)) < 1e-6);
    for (std::size_t i = 0; i + 1 < tr.tau_values.size(); ++i)
        CHECK(tr.tau_values.back().real() > tr.tau_values[i].real());
}

TEST_CASE("paths on transition curves pass through a saddle")
{
    // configurations with the path running into a saddle
    const auto pa = trace_steepest(params({0.60, 0.95307}, 0.10), {.stop_at_saddle = false});
    CHECK(pa.approach[0].distance < 5e-3);
    const auto p = trace_steepest(params({0.93778, 0.18745}, 0.10), {.stop_at_saddle = false});
    CHECK(std::min(p.approach[0].distance, p.approach[1].distance) < 5e-3);
}

TEST_CASE("tau monotonicity and Im tau bound on random admissible parameters")
{
    RandomParameters gen(2024);
    const TraceOptions opts;
    for (int i = 0; i < 200; ++i) {
        const auto p = gen();
        REQUIRE(p.admissible());
        INFO("q = " << p.q << ", theta = " << p.theta);
        const auto tr = trace_steepest(p, opts);
        bool monotone = true, flat = true;
        for (std::size_t k = 0; k < tr.tau_values.size(); ++k) {
            const cplx t = tr.tau_values[k];
            if (k > 0 && !(t.real() > tr.tau_values[k - 1].real())) monotone = false;
            if (std::abs(t.imag()) > 10 * opts.rel_tol * std::max(1.0, std::abs(t))) flat = false;
            if (std::abs(std::exp(tr.points[k].logval) - one_plus_u2(tr.points[k].u)) >
                1e-9 * std::abs(one_plus_u2(tr.points[k].u)))
                flat = false;
        }
        CHECK(monotone);
        CHECK(flat);
        if (tr.terminal == DomainLabel::ToPlusI) CHECK(std::abs(tr.points.back().u - cplx(0, 1)) < opts.eps_branch);
        if (tr.terminal == DomainLabel::ToMinusI) CHECK(std::abs(tr.points.back().u + cplx(0, 1)) < opts.eps_branch);
    }
}

TEST_CASE("classification is conjugate symmetric")
{
    RandomParameters gen(99);
    for (int i = 0; i < 100; ++i) {
        const auto p = gen();
        const Parameters c{std::conj(p.q), -p.theta};
        INFO("q = " << p.q << ", theta = " << p.theta);
        CHECK(classify_endpoint(c) == mirror(classify_endpoint(p)));
    }
}

TEST_CASE("path export")
{
    PathTrace tr;
    for (int k = 0; k < 3; ++k) {
        tr.points.push_back(PhasePoint::principal(0.1 * k));
        tr.tau_values.push_back(0.1 * k);
    }
    std::ostringstream os;
    export_path_csv(tr, os);
    std::istringstream is(os.str());
    const auto rows = read_path_csv(is);
    CHECK(rows.size() == 3);

    const auto real = trace_steepest(params({1.0, 0.6}, 0.10));
    std::ostringstream csv;
    export_path_csv(real, csv);
    std::istringstream back(csv.str());
    const auto parsed = read_path_csv(back);
    const auto direct = path_rows(real);
    REQUIRE(parsed.size() == direct.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        CHECK(parsed[i].re_u == direct[i].re_u);
        CHECK(parsed[i].im_u == direct[i].im_u);
        CHECK(parsed[i].re_tau == direct[i].re_tau);
        CHECK(parsed[i].winding == direct[i].winding);
    }
}

TEST_CASE("labels round trip through text")
{
    for (auto l : {DomainLabel::ToInfinity, DomainLabel::ToPlusI, DomainLabel::ToMinusI, DomainLabel::OnTransition})
        CHECK(parse_label(to_string(l)) == l);
    CHECK_FALSE(parse_label("Sideways").has_value());
}
