#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "struve/errors.hpp"
#include "struve/transitions.hpp"

using namespace struve::transitions;
using struve::landscape::classify_endpoint;
using struve::landscape::DomainLabel;
using struve::landscape::Parameters;
using struve::landscape::TraceOptions;

namespace {

constexpr double kPi = std::numbers::pi;

struct Row {
    double theta_over_pi;
    cplx P;
    double Q;
};

// theta/pi, P, Q as tabulated; the 0.05 row carries the corrected Im P
const Row kTable2[] = {
    {0.10, {0.93778, 0.18745}, 0.70952}, {0.20, {0.93437, 0.53249}, 0.48057},
    {0.25, {0.97678, 0.84046}, 0.37449}, {0.30, {1.08553, 1.38238}, 0.27561},
    {0.35, {1.36479, 2.60425}, 0.18575}, {0.40, {2.36238, 7.23955}, 0.10710},
    {0.42, {3.72266, 14.4826}, 0.07942},
};

double segment_distance(cplx p, cplx a, cplx b)
{
    const cplx d = b - a;
    const double t = std::clamp(((p - a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

double distance_to_curve(const TransitionCurve& c, cplx p)
{
    double best = std::abs(p - c.samples.front());
    for (std::size_t i = 0; i + 1 < c.samples.size(); ++i)
        best = std::min(best, segment_distance(p, c.samples[i], c.samples[i + 1]));
    return best;
}

}  // namespace

TEST_CASE("connection residual examples")
{
    CHECK(std::abs(connection_residual(1.5, 0.0, Saddle::S1)) < 1e-12);
    CHECK(std::abs(connection_residual(1.5, 0.0, Saddle::S2)) < 1e-12);
    const cplx P{0.93778, 0.18745};
    CHECK(std::abs(connection_residual(P, 0.10 * kPi, Saddle::S1)) < 1e-4);
    CHECK(std::abs(connection_residual(P, 0.10 * kPi, Saddle::S2)) < 1e-4);
    CHECK(std::abs(connection_residual({0.80, 0.143900}, 0.0, Saddle::S1)) < 1e-5);
}

TEST_CASE("critical beta")
{
    CHECK(std::abs(critical_beta(0.80, 0.0, 0.01, 0.5) - 0.143900) < 1e-5);

    const double b = critical_beta(0.5, 0.0, 0.01, 1.0);
    CHECK(classify_endpoint({{0.5, b - 1e-5}, 0.0}) == DomainLabel::ToInfinity);
    CHECK(classify_endpoint({{0.5, b + 1e-5}, 0.0}) == DomainLabel::ToPlusI);

    // the lower curve meets the real axis at Q
    CHECK(std::abs(critical_beta(0.70952, 0.10 * kPi, -0.3, 0.3)) < 1e-4);
    // on the upper curve, as in the configuration of the path figures
    CHECK(std::abs(critical_beta(0.60, 0.10 * kPi, 0.5, 1.5) - 0.95307) < 1e-4);

    CHECK_THROWS_AS(critical_beta(0.80, 0.0, 0.3, 0.5), struve::BracketInvalid);
}

TEST_CASE("triple point and intercept against tabulated values")
{
    CHECK(triple_point(0.0).q_P == cplx(1.0, 0.0));
    for (const Row& r : kTable2) {
        INFO("theta/pi = " << r.theta_over_pi);
        const auto P = triple_point(r.theta_over_pi * kPi);
        CHECK(std::abs(P.q_P.real() - r.P.real()) < 5e-4);
        CHECK(std::abs(P.q_P.imag() - r.P.imag()) < 5e-4);
        CHECK(std::abs(intercept_Q(r.theta_over_pi * kPi).q_Q - r.Q) < 5e-4);
    }
    const auto P45 = triple_point(0.45 * kPi);
    CHECK(std::abs(P45.q_P.real() / 16.4886 - 1) < 5e-3);
    CHECK(std::abs(P45.q_P.imag() / 104.102 - 1) < 5e-3);
    CHECK(std::abs(intercept_Q(0.45 * kPi).q_Q - 0.04275) < 5e-4);

    const auto P05 = triple_point(0.05 * kPi);
    CHECK(std::abs(P05.q_P.real() - 0.96385) < 5e-4);
    CHECK(std::abs(P05.q_P.imag() - 0.08061) < 5e-4);
}

TEST_CASE("triple point connects to both saddles")
{
    for (double t : {0.05, 0.10, 0.30}) {
        const auto P = triple_point(t * kPi);
        CHECK(std::abs(connection_residual(P.q_P, t * kPi, Saddle::S1)) < 1e-8);
        CHECK(std::abs(connection_residual(P.q_P, t * kPi, Saddle::S2)) < 1e-8);
    }
}

TEST_CASE("conjugate symmetry of P")
{
    for (double t : {0.05, 0.20, 0.35}) {
        const cplx a = triple_point(t * kPi).q_P;
        const cplx b = triple_point(-t * kPi).q_P;
        CHECK(std::abs(b - std::conj(a)) < 1e-8 * std::abs(a));
    }
}

TEST_CASE("intercept ordering and monotonicity")
{
    double prev = 1.0;
    for (double t : {0.05, 0.10, 0.20, 0.25, 0.30, 0.35, 0.40, 0.42, 0.45}) {
        const double Q = intercept_Q(t * kPi).q_Q;
        CHECK(Q < triple_point(t * kPi).q_P.real());
        CHECK(Q < prev);
        prev = Q;
        CHECK(classify_endpoint({Q * (1 - 1e-6), t * kPi}) == DomainLabel::ToInfinity);
        CHECK(classify_endpoint({Q * (1 + 1e-6), t * kPi}) == DomainLabel::ToMinusI);
    }
    CHECK(intercept_Q(0.0).q_Q == 1.0);
    CHECK_THROWS_AS(intercept_Q(-0.1), struve::InvalidArgument);
}

TEST_CASE("curves at theta = 0")
{
    const auto mid = trace_transition_curve(0.0, Branch::Middle, 2.0, 0.1);
    for (cplx q : mid.samples) {
        CHECK(q.imag() == 0.0);
        CHECK(q.real() >= 1.0);
    }
    const auto up = trace_transition_curve(0.0, Branch::Upper, 0.6, 0.02);
    CHECK(distance_to_curve(up, {0.80, 0.143900}) < 1e-4);
    const auto low = trace_transition_curve(0.0, Branch::Lower, 0.6, 0.02);
    CHECK(distance_to_curve(low, {0.80, -0.143900}) < 1e-4);
}

TEST_CASE("curves at theta = 0.10 pi")
{
    const double theta = 0.10 * kPi;
    const auto upper = trace_transition_curve(theta, Branch::Upper, 1.0, 0.02);
    const auto middle = trace_transition_curve(theta, Branch::Middle, 1.0, 0.02);
    const auto lower = trace_transition_curve(theta, Branch::Lower, 1.2, 0.02);

    CHECK(distance_to_curve(upper, {0.60, 0.95307}) < 1e-4);
    CHECK(distance_to_curve(lower, {0.40, -0.42914}) < 1e-4);

    const auto x = real_axis_crossing(lower);
    REQUIRE(x.has_value());
    CHECK(std::abs(*x - intercept_Q(theta).q_Q) < 1e-5);
    CHECK_FALSE(real_axis_crossing(upper).has_value());

    const auto P = triple_point(theta).q_P;
    TraceOptions relaxed;
    relaxed.saddle_tol *= 10;
    for (const auto* c : {&upper, &middle, &lower}) {
        INFO("branch " << to_string(c->branch));
        REQUIRE(c->samples.size() > 10);
        CHECK(c->samples.front() == P);
        bool ordered = true, on = true, sides = true;
        const auto expected = separated_domains(c->branch);
        for (std::size_t i = 1; i + 1 < c->samples.size(); ++i) {
            const double d = std::abs(c->samples[i] - P);
            const double gap = std::abs(c->samples[i] - c->samples[i - 1]);
            if (!(gap > 0 && gap < 0.04)) ordered = false;
            const cplx q = c->samples[i];
            if (classify_endpoint({q, theta}, relaxed) != DomainLabel::OnTransition) on = false;
            if (d < 1e-2) continue;
            const cplx t = c->samples[i + 1] - c->samples[i - 1];
            const cplx n = cplx(0, 1) * t / std::abs(t);
            const auto a = classify_endpoint({q + 1e-3 * n, theta});
            const auto b = classify_endpoint({q - 1e-3 * n, theta});
            if (!((a == expected[0] && b == expected[1]) || (a == expected[1] && b == expected[0]))) sides = false;
        }
        CHECK(ordered);
        CHECK(on);
        CHECK(sides);
    }
}

TEST_CASE("curves for negative theta are conjugates")
{
    const auto a = trace_transition_curve(0.10 * kPi, Branch::Upper, 0.5, 0.05);
    const auto b = trace_transition_curve(-0.10 * kPi, Branch::Lower, 0.5, 0.05);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(std::abs(b.samples[i] - std::conj(a.samples[i])) < 1e-12);
}

TEST_CASE("branch names and curve export")
{
    for (auto b : {Branch::Upper, Branch::Middle, Branch::Lower}) CHECK(parse_branch(to_string(b)) == b);
    CHECK_FALSE(parse_branch("diagonal").has_value());

    TransitionCurve c{Branch::Lower, 0.25, {{1.0, 0.0}, {0.5, -0.25}}, {}};
    std::ostringstream os;
    export_curve_csv(c, os);
    CHECK(os.str() == "re_q,im_q,branch,theta\n1,0,lower,0.25\n0.5,-0.25,lower,0.25\n");
    CHECK_THROWS_AS(trace_transition_curve(0.1, Branch::Upper, 1.0, 0.0), struve::InvalidArgument);
}
