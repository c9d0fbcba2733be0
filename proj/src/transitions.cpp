#include "struve/transitions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "struve/errors.hpp"

namespace struve::transitions {

using landscape::DomainLabel;
using landscape::Parameters;
using landscape::TraceOptions;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

constexpr double kResidualTol = 1e-10;
constexpr double kParamTol = 1e-8;

double tau_scale(const TrackedSaddle& s)
{
    return std::max(1.0, std::abs(s.tau()));
}

bool converged(const TrackedSaddle& s)
{
    return std::abs(s.residual()) < kResidualTol * tau_scale(s);
}

struct Newton2Result {
    cplx q;
    std::array<TrackedSaddle, 2> saddles;
    bool ok = false;
};

// Damped Newton on (Im tau(S_a), Im tau(S_b)) = 0 over (Re q, Im q).
Newton2Result solve_both(std::array<TrackedSaddle, 2> saddles, int max_iter = 60)
{
    cplx q = saddles[0].q;
    auto norm = [](const std::array<TrackedSaddle, 2>& s) {
        return std::max(std::abs(s[0].residual()) / tau_scale(s[0]), std::abs(s[1].residual()) / tau_scale(s[1]));
    };
    double f = norm(saddles);
    for (int it = 0; it < max_iter; ++it) {
        const cplx d0 = saddles[0].tau_dq(), d1 = saddles[1].tau_dq();
        // d Im T / dx = Im T', d Im T / dy = Re T'
        const double j00 = d0.imag(), j01 = d0.real(), j10 = d1.imag(), j11 = d1.real();
        const double det = j00 * j11 - j01 * j10;
        if (!std::isfinite(det) || det == 0.0) return {q, saddles, false};
        const double r0 = saddles[0].residual(), r1 = saddles[1].residual();
        const double dx = -(j11 * r0 - j01 * r1) / det;
        const double dy = -(-j10 * r0 + j00 * r1) / det;
        cplx delta{dx, dy};
        const double cap = 0.25 * std::max(std::abs(q), 1e-3);
        if (std::abs(delta) > cap) delta *= cap / std::abs(delta);

        double lambda = 1.0;
        bool accepted = false;
        for (int k = 0; k < 30; ++k, lambda *= 0.5) {
            try {
                const cplx q_new = q + lambda * delta;
                std::array<TrackedSaddle, 2> trial{saddles[0].moved_to(q_new), saddles[1].moved_to(q_new)};
                const double f_new = norm(trial);
                if (f_new < f || f_new < kResidualTol) {
                    q = q_new;
                    saddles = trial;
                    f = f_new;
                    accepted = true;
                    break;
                }
            } catch (const Error&) {
                // step reached a branch point; shrink
            }
        }
        if (!accepted) return {q, saddles, false};
        if (f < kResidualTol && std::abs(lambda * delta) < kParamTol * std::max(1.0, std::abs(q)))
            return {q, saddles, true};
    }
    return {q, saddles, f < kResidualTol};
}

// Newton along the normal of the zero set of Im tau(S) starting at q.
std::optional<TrackedSaddle> project_onto_curve(TrackedSaddle s, int max_iter = 40)
{
    for (int it = 0; it < max_iter; ++it) {
        const cplx d = s.tau_dq();
        const double slope = std::abs(d);
        if (slope == 0.0 || !std::isfinite(slope)) return std::nullopt;
        // along n = i conj(T')/|T'|, Im tau changes at rate |T'|
        const cplx n = kI * std::conj(d) / slope;
        const double step = -s.residual() / slope;
        try {
            s = s.moved_to(s.q + step * n);
        } catch (const Error&) {
            return std::nullopt;
        }
        if (converged(s) && std::abs(step) < kParamTol * std::max(1.0, std::abs(s.q))) return s;
    }
    if (converged(s)) return s;
    return std::nullopt;
}

cplx unit_tangent(const TrackedSaddle& s)
{
    const cplx d = s.tau_dq();
    return std::conj(d) / std::abs(d);
}

cplx unit_normal(const TrackedSaddle& s)
{
    return kI * unit_tangent(s);
}

DomainLabel classify(cplx q, double theta)
{
    return landscape::classify_endpoint(Parameters{q, theta});
}

// Label pair across the curve through s, probing at distance eps.
std::array<DomainLabel, 2> side_labels(const TrackedSaddle& s, double eps)
{
    const cplx n = unit_normal(s);
    return {classify(s.q + eps * n, s.theta), classify(s.q - eps * n, s.theta)};
}

std::optional<Branch> branch_from_labels(std::array<DomainLabel, 2> l)
{
    for (Branch b : {Branch::Upper, Branch::Middle, Branch::Lower}) {
        const auto want = separated_domains(b);
        if ((l[0] == want[0] && l[1] == want[1]) || (l[0] == want[1] && l[1] == want[0])) return b;
    }
    return std::nullopt;
}

std::array<TrackedSaddle, 2> principal_pair(cplx q, double theta)
{
    return {principal_saddle(q, theta, Saddle::S1), principal_saddle(q, theta, Saddle::S2)};
}

// Continues along the zero set of Im tau(S) from `start` in direction
// `dir`, recording samples until the arc length is reached.
void continue_curve(TransitionCurve& curve, TrackedSaddle start, cplx dir, double arc_length, double step)
{
    double travelled = 0.0;
    double h = step;
    TrackedSaddle cur = start;
    cplx t = unit_tangent(cur);
    if ((t * std::conj(dir)).real() < 0) t = -t;
    int shrink = 0;
    while (arc_length - travelled > 1e-6 * step) {
        h = std::min(h, arc_length - travelled);
        std::optional<TrackedSaddle> next;
        try {
            next = project_onto_curve(cur.moved_to(cur.q + h * t));
        } catch (const Error&) {
            next.reset();
        }
        const bool ok = next && std::abs(next->q - (cur.q + h * t)) < std::max(0.5 * h, 1e-9);
        if (!ok) {
            h *= 0.5;
            if (++shrink > 12) throw StepTooLarge("trace_transition_curve: step cannot follow the curve");
            continue;
        }
        cplx t_new = unit_tangent(*next);
        if ((t_new * std::conj(t)).real() < 0) t_new = -t_new;
        travelled += std::abs(next->q - cur.q);
        cur = *next;
        t = t_new;
        curve.samples.push_back(cur.q);
        curve.saddles.push_back(cur);
        if (shrink > 0) {
            h = std::min(step, 2 * h);
            --shrink;
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(Branch b)
{
    switch (b) {
    case Branch::Upper: return "upper";
    case Branch::Middle: return "middle";
    case Branch::Lower: return "lower";
    }
    return "?";
}

std::optional<Branch> parse_branch(std::string_view text)
{
    for (Branch b : {Branch::Upper, Branch::Middle, Branch::Lower})
        if (to_string(b) == text) return b;
    return std::nullopt;
}

std::array<DomainLabel, 2> separated_domains(Branch b)
{
    switch (b) {
    case Branch::Upper: return {DomainLabel::ToInfinity, DomainLabel::ToPlusI};
    case Branch::Middle: return {DomainLabel::ToPlusI, DomainLabel::ToMinusI};
    case Branch::Lower: return {DomainLabel::ToInfinity, DomainLabel::ToMinusI};
    }
    return {};
}

cplx TrackedSaddle::tau() const
{
    return std::polar(1.0, theta) * (point.u - q * point.logval);
}

cplx TrackedSaddle::tau_dq() const
{
    return -std::polar(1.0, theta) * point.logval;
}

TrackedSaddle TrackedSaddle::moved_to(cplx q_new) const
{
    TrackedSaddle s = *this;
    double done = 0.0;
    double dt = 1.0;
    int guard = 0;
    while (done < 1.0) {
        if (++guard > 100000) throw NoConvergence("saddle tracking: too many substeps");
        const double t = std::min(1.0, done + dt);
        const cplx q_t = q + (q_new - q) * t;
        const auto pair = landscape::saddle_points(q_t);
        const cplx cand = std::abs(pair.u_plus - s.point.u) <= std::abs(pair.u_minus - s.point.u) ? pair.u_plus
                                                                                                      : pair.u_minus;
        const double move = std::abs(cand - s.point.u);
        const double clearance = std::min({std::abs(s.point.u - kI), std::abs(s.point.u + kI),
                                           std::max(std::abs(pair.u_plus - pair.u_minus), 1e-300)});
        if (move > 0.25 * clearance && dt > 1e-12) {
            dt *= 0.5;
            continue;
        }
        s.point = landscape::continue_to(s.point, cand);
        s.q = q_t;
        done = t;
        dt = std::min(1.0, 2 * dt);
    }
    s.q = q_new;
    return s;
}

TrackedSaddle principal_saddle(cplx q, double theta, Saddle which)
{
    const cplx u = landscape::saddle(landscape::saddle_points(q), which);
    return {landscape::continue_to(PhasePoint{0.0, 0.0}, u), q, theta};
}

double connection_residual(cplx q, double theta, Saddle which, const TraceOptions& opts)
{
    TraceOptions o = opts;
    o.stop_at_saddle = false;
    const Parameters p{q, theta};
    const auto tr = landscape::trace_steepest(p, o);
    const auto& a = tr.approach[which == Saddle::S1 ? 0 : 1];
    return landscape::saddle_residual(a.at, a.saddle, p);
}

double critical_beta(double alpha, double theta, double lo, double hi)
{
    if (!(lo < hi)) throw BracketInvalid("critical_beta: empty bracket");
    auto label = [&](double beta) { return classify({alpha, beta}, theta); };
    DomainLabel l_lo = label(lo), l_hi = label(hi);
    if (l_lo == l_hi || l_lo == DomainLabel::OnTransition || l_hi == DomainLabel::OnTransition)
        throw BracketInvalid("critical_beta: classification does not change across the bracket");

    double mid = 0.5 * (lo + hi);
    while (hi - lo > 1e-10) {
        mid = 0.5 * (lo + hi);
        const DomainLabel l = label(mid);
        if (l == DomainLabel::OnTransition) break;
        if (l == l_lo) lo = mid;
        else hi = mid;
    }

    // refine on the residual of the saddle the path grazes
    const Parameters p{{alpha, mid}, theta};
    TraceOptions o;
    o.stop_at_saddle = false;
    const auto tr = landscape::trace_steepest(p, o);
    const auto& a = tr.approach[0].distance <= tr.approach[1].distance ? tr.approach[0] : tr.approach[1];
    TrackedSaddle s{landscape::continue_to(a.at, a.saddle), p.q, theta};
    double beta = mid;
    for (int it = 0; it < 30 && !converged(s); ++it) {
        // d Im tau / d beta = Re T'
        const double slope = s.tau_dq().real();
        if (slope == 0.0) break;
        const double next = beta - s.residual() / slope;
        if (std::abs(next - mid) > 1e-6) break;
        try {
            s = s.moved_to({alpha, next});
        } catch (const Error&) {
            break;
        }
        beta = next;
    }
    return converged(s) ? beta : mid;
}

TriplePoint triple_point(double theta)
{
    if (!(std::abs(theta) < kPi / 2)) throw InvalidArgument("triple_point: |theta| must be below pi/2");
    if (theta == 0.0) {
        const auto pair = principal_pair(1.0, 0.0);
        return {0.0, 1.0, pair};
    }
    const double sign = theta > 0 ? 1.0 : -1.0;
    const double target = std::abs(theta);

    // Homotopy in theta from the double saddle at q = 1.
    double th = std::min(target, 0.01 * kPi);
    cplx q0 = cplx(1.0, sign * 0.5 * th);
    Newton2Result sol = solve_both(principal_pair(q0, sign * th));
    if (!sol.ok) throw NoConvergence("triple_point: no convergence at the first homotopy step");

    cplx prev_log = std::log(sol.q);
    double prev_th = th;
    bool have_prev = false;
    double dth = 0.01 * kPi;
    while (th < target) {
        const double next_th = std::min(target, th + dth);
        // extrapolate log q linearly in theta
        cplx guess = sol.q;
        if (have_prev) {
            const cplx slope = (std::log(sol.q) - prev_log) / (th - prev_th);
            guess = std::exp(std::log(sol.q) + slope * (next_th - th));
        }
        Newton2Result trial;
        try {
            std::array<TrackedSaddle, 2> moved{sol.saddles[0].moved_to(guess), sol.saddles[1].moved_to(guess)};
            for (auto& s : moved) s.theta = sign * next_th;
            trial = solve_both(moved);
        } catch (const Error&) {
            trial.ok = false;
        }
        if (!trial.ok) {
            dth *= 0.5;
            if (dth < 1e-8) throw NoConvergence("triple_point: homotopy step collapsed");
            continue;
        }
        prev_log = std::log(sol.q);
        prev_th = th;
        have_prev = true;
        sol = trial;
        th = next_th;
        dth = std::min(0.02 * kPi, dth * 1.5);
    }

    // check against the traced origin path
    TraceOptions o;
    o.stop_at_saddle = false;
    const Parameters p{sol.q, theta};
    const auto tr = landscape::trace_steepest(p, o);
    for (int k = 0; k < 2; ++k) {
        const auto& a = tr.approach[k];
        const double r = landscape::saddle_residual(a.at, a.saddle, p);
        if (std::abs(r) > 1e-6 * tau_scale(sol.saddles[0]))
            throw NoConvergence("triple_point: traced path does not confirm the saddle connection");
    }
    return {theta, sol.q, sol.saddles};
}

InterceptQ intercept_Q(double theta)
{
    if (theta == 0.0) return {0.0, 1.0};
    if (!(theta > 0 && theta < kPi / 2)) throw InvalidArgument("intercept_Q: theta must lie in (0, pi/2)");

    // For steep theta the real axis carries further flips above the one on
    // the lower curve, so take the first ToMinusI endpoint met from below.
    double lo = 1e-3;
    while (classify(lo, theta) != DomainLabel::ToInfinity) {
        lo /= 2;
        if (lo < 1e-8) throw BracketInvalid("intercept_Q: no ToInfinity endpoint on the real axis");
    }
    double hi = lo;
    for (;;) {
        hi = lo * 1.05;
        if (hi > 1000) throw BracketInvalid("intercept_Q: no ToMinusI endpoint on the real axis");
        const DomainLabel l = classify(hi, theta);
        if (l == DomainLabel::ToMinusI) break;
        if (l == DomainLabel::OnTransition) return {theta, hi};
        if (l != DomainLabel::ToInfinity) throw BracketInvalid("intercept_Q: unexpected endpoint on the real axis");
        lo = hi;
    }
    while (hi - lo > 1e-11 * hi) {
        const double mid = 0.5 * (lo + hi);
        const DomainLabel l = classify(mid, theta);
        if (l == DomainLabel::OnTransition) return {theta, mid};
        if (l == DomainLabel::ToInfinity) lo = mid;
        else if (l == DomainLabel::ToMinusI) hi = mid;
        else throw BracketInvalid("intercept_Q: unexpected endpoint inside the bracket");
    }
    return {theta, 0.5 * (lo + hi)};
}

TransitionCurve trace_transition_curve(double theta, Branch branch, double arc_length, double step)
{
    if (!(step > 0) || !(arc_length > 0)) throw InvalidArgument("trace_transition_curve: step and arc length must be positive");
    if (theta < 0) {
        // conjugate of the curve for -theta with the roles of +i and -i swapped
        const Branch mirrored = branch == Branch::Upper ? Branch::Lower : branch == Branch::Lower ? Branch::Upper : branch;
        TransitionCurve c = trace_transition_curve(-theta, mirrored, arc_length, step);
        c.branch = branch;
        c.theta = theta;
        for (auto& s : c.samples) s = std::conj(s);
        for (auto& s : c.saddles) {
            s.q = std::conj(s.q);
            s.theta = theta;
            s.point.u = std::conj(s.point.u);
            s.point.logval = std::conj(s.point.logval);
        }
        return c;
    }

    TransitionCurve curve{branch, theta, {}, {}};
    const TriplePoint P = triple_point(theta);
    curve.samples.push_back(P.q_P);

    if (theta == 0.0) {
        if (branch == Branch::Middle) {
            curve.saddles.push_back(P.saddles[1]);
            const int n = static_cast<int>(std::ceil(arc_length / step));
            for (int k = 1; k <= n; ++k) {
                const double q = 1.0 + arc_length * k / n;
                curve.samples.push_back(q);
                curve.saddles.push_back(principal_saddle(q, 0.0, Saddle::S2));
            }
            return curve;
        }
        // seed next to the double saddle, then continue away from it
        const double alpha = 1.0 - std::min(step, 0.05);
        const double beta = critical_beta(alpha, 0.0, 1e-9, 0.5);
        auto seed = project_onto_curve(principal_saddle({alpha, beta}, 0.0, Saddle::S1));
        if (!seed) throw NoConvergence("trace_transition_curve: could not seed the upper curve");
        curve.saddles.push_back(P.saddles[0]);
        curve.samples.push_back(seed->q);
        curve.saddles.push_back(*seed);
        continue_curve(curve, *seed, seed->q - 1.0, arc_length - std::abs(seed->q - 1.0), step);
        if (branch == Branch::Lower) {
            for (auto& s : curve.samples) s = std::conj(s);
            for (auto& s : curve.saddles) {
                s.q = std::conj(s.q);
                s.point.u = std::conj(s.point.u);
                s.point.logval = std::conj(s.point.logval);
            }
        }
        return curve;
    }

    // Each residual's zero set crosses P; three of the four half-curves are
    // transitions, identified by the endpoint labels on either side.
    const double h0 = 0.05 * std::max(1.0, std::abs(P.q_P));
    const double eps = 1e-3 * std::max(1.0, std::abs(P.q_P));
    for (int k = 0; k < 2; ++k) {
        for (double sgn : {1.0, -1.0}) {
            const cplx dir = sgn * unit_tangent(P.saddles[k]);
            std::optional<TrackedSaddle> probe;
            try {
                probe = project_onto_curve(P.saddles[k].moved_to(P.q_P + h0 * dir));
            } catch (const Error&) {
                continue;
            }
            if (!probe) continue;
            if (branch_from_labels(side_labels(*probe, eps)) != branch) continue;
            curve.saddles.push_back(P.saddles[k]);
            continue_curve(curve, P.saddles[k], dir, arc_length, step);
            return curve;
        }
    }
    throw NoConvergence("trace_transition_curve: branch not found at the triple point");
}

std::optional<double> real_axis_crossing(const TransitionCurve& curve)
{
    for (std::size_t i = 0; i + 1 < curve.samples.size(); ++i) {
        const cplx a = curve.samples[i], b = curve.samples[i + 1];
        if (a.imag() == 0.0 && i > 0) return a.real();
        if ((a.imag() > 0) == (b.imag() > 0) || b.imag() == 0.0) continue;
        // secant on the residual restricted to the real axis
        double x = a.real() + (b.real() - a.real()) * a.imag() / (a.imag() - b.imag());
        TrackedSaddle s = curve.saddles[i].moved_to(x);
        for (int it = 0; it < 40 && !converged(s); ++it) {
            // d Im tau / dx = Im T'
            const double slope = s.tau_dq().imag();
            if (slope == 0.0) break;
            x -= s.residual() / slope;
            s = s.moved_to(x);
        }
        return x;
    }
    return std::nullopt;
}

void export_curve_csv(const TransitionCurve& curve, std::ostream& os, bool header)
{
    if (header) os << "re_q,im_q,branch,theta\n";
    char buf[160];
    for (const cplx q : curve.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%.17g\n", q.real(), q.imag(), to_string(curve.branch).data(),
                      curve.theta);
        os << buf;
    }
}

}  // namespace struve::transitions
