#include "struve/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "struve/errors.hpp"

namespace struve::landscape {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct RkResult {
    cplx y;
    double err;
};

// Autonomous field; the c_i nodes are unused but kept for reference.
template <class F>
RkResult dopri_step(F&& f, cplx y, double h)
{
    (void)c2, (void)c3, (void)c4, (void)c5;
    const cplx k1 = f(y);
    const cplx k2 = f(y + h * (a21 * k1));
    const cplx k3 = f(y + h * (a31 * k1 + a32 * k2));
    const cplx k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const cplx k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const cplx k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const cplx y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const cplx k7 = f(y5);
    const cplx err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    return {y5, std::abs(err)};
}

// Unit direction along which d tau is real and positive.
cplx descent_direction(cplx derivative)
{
    const double m = std::abs(derivative);
    if (m == 0.0 || !std::isfinite(m)) return 0.0;
    return std::conj(derivative) / m;
}

double step_factor(double err, double tol)
{
    if (err == 0.0) return 5.0;
    return std::clamp(0.9 * std::pow(tol / err, 0.2), 0.2, 5.0);
}

// log((1+b^2)/(1+a^2)) for nearby a, b.
cplx log_ratio(cplx from, cplx to)
{
    return std::log((to - kI) / (from - kI)) + std::log((to + kI) / (from + kI));
}

struct Tracer {
    const Parameters& params;
    const TraceOptions& opts;
    SaddlePair saddles;
    cplx rotation;  // e^{i theta}
    cplx q_rot;     // q e^{i theta}
    double capture_radius;
    PathTrace trace;

    Tracer(const Parameters& p, const TraceOptions& o)
        : params(p), opts(o), saddles(saddle_points(p.q)), rotation(std::polar(1.0, p.theta)),
          q_rot(p.rotated_q()), capture_radius(compute_capture_radius())
    {
        for (int s = 0; s < 2; ++s) {
            trace.approach[s].saddle = s == 0 ? saddles.u_plus : saddles.u_minus;
            trace.approach[s].distance = std::numeric_limits<double>::infinity();
        }
    }

    // Inside |u -+ i| < r the flow in zeta = log(u -+ i) satisfies
    // |d tau/d zeta + q e^{i theta}| < Re(q e^{i theta})/2, so |u -+ i|
    // decreases monotonically to zero.
    double compute_capture_radius() const
    {
        const double c = 0.5 * q_rot.real();
        if (c <= 0.0) return 0.0;
        const double a = std::abs(params.q);
        const double s = 2.0 + a + c;
        const double r = (s - std::sqrt(s * s - 8.0 * c)) / 2.0;
        return std::min(0.5, 0.99 * r);
    }

    double near_radius(cplx s) const
    {
        return 0.25 * std::min({std::abs(s), std::abs(s - kI), std::abs(s + kI), 1.0});
    }

    double local_scale(cplx u) const
    {
        double scale = std::max(1.0, std::abs(u));
        scale = std::min({scale, std::abs(u - kI), std::abs(u + kI)});
        scale = std::min({scale, std::abs(u - saddles.u_plus), std::abs(u - saddles.u_minus)});
        return std::max(scale, 1e-300);
    }

    double step_cap(cplx u) const
    {
        double cap = 0.3 * std::min(std::abs(u - kI), std::abs(u + kI));
        for (cplx s : {saddles.u_plus, saddles.u_minus}) {
            const double d = std::abs(u - s);
            if (d < near_radius(s) * 4.0) cap = std::min(cap, std::max(0.5 * d, 1e-300));
        }
        return cap;
    }

    void record(const PhasePoint& p, cplx tau)
    {
        trace.points.push_back(p);
        trace.tau_values.push_back(tau);
        for (auto& a : trace.approach) {
            const double d = std::abs(p.u - a.saddle);
            if (d < a.distance) {
                a.distance = d;
                a.at = p;
                a.index = trace.points.size() - 1;
            }
        }
    }

    PathTrace finish(DomainLabel label)
    {
        trace.terminal = label;
        trace.sheet_winding = trace.points.back().sheet();
        return std::move(trace);
    }

    bool on_saddle(const PhasePoint& p) const
    {
        for (cplx s : {saddles.u_plus, saddles.u_minus}) {
            if (std::abs(p.u - s) >= near_radius(s)) continue;
            const PhasePoint at = continue_to(p, s);
            const cplx tau_s = phase(at, params);
            if (std::abs(tau_s.imag()) < opts.saddle_tol * std::max(1.0, std::abs(tau_s))) return true;
        }
        return false;
    }

    PathTrace run()
    {
        const cplx u0 = opts.start_offset * std::conj(rotation);
        PhasePoint cur = PhasePoint::principal(u0);
        cplx tau = phase(cur, params);
        record(cur, tau);

        auto field = [this](cplx u) { return descent_direction(phase_derivative(u, params)); };

        double h = 1e-3 * std::max(opts.start_offset, 1e-3);
        std::size_t steps = 0;
        for (;;) {
            if (++steps > opts.max_steps) throw MaxStepsExceeded("trace_steepest: step budget exhausted");

            if (std::abs(phase_derivative(cur.u, params)) < opts.saddle_tol) return finish(DomainLabel::OnTransition);

            const double scale = local_scale(cur.u);
            h = std::min(h, step_cap(cur.u));
            if (h < 1e-14 * scale) return finish(DomainLabel::OnTransition);

            const auto [u_new, err] = dopri_step(field, cur.u, h);
            const double tol = opts.rel_tol * scale;
            if (!(err <= tol)) {
                h *= std::isfinite(err) ? step_factor(err, tol) : 0.2;
                continue;
            }

            PhasePoint next{u_new, cur.logval + log_ratio(cur.u, u_new)};
            // pull back onto Im tau = 0
            const cplx d = phase_derivative(next.u, params);
            const cplx tau_trial = phase(next, params);
            const cplx du = -kI * tau_trial.imag() / d;
            if (std::abs(du) < 0.1 * h) {
                next.logval += log_ratio(next.u, next.u + du);
                next.u += du;
            }
            const cplx tau_next = phase(next, params);
            if (!(tau_next.real() > tau.real())) {
                h *= 0.5;
                continue;
            }

            cur = next;
            tau = tau_next;
            record(cur, tau);
            h *= step_factor(err, tol);

            if (std::abs(cur.u) > opts.r_max) return finish(DomainLabel::ToInfinity);
            for (cplx b : {kI, -kI}) {
                const double dist = std::abs(cur.u - b);
                if (dist < opts.eps_branch)
                    return finish(b.imag() > 0 ? DomainLabel::ToPlusI : DomainLabel::ToMinusI);
                if (dist < capture_radius) return spiral_in(cur, tau, b, steps);
            }
            if (opts.stop_at_saddle && on_saddle(cur)) return finish(DomainLabel::OnTransition);
            if (std::abs(cur.sheet()) > opts.winding_cap)
                throw MaxStepsExceeded("trace_steepest: winding cap exceeded before reaching a branch point");
        }
    }

    // Continue inside the capture disk around b in zeta = log(u - b).
    PathTrace spiral_in(PhasePoint cur, cplx tau, cplx b, std::size_t steps)
    {
        auto point_at = [&](cplx zeta, cplx offset) {
            const cplx w = std::exp(zeta);
            return PhasePoint{b + w, zeta + std::log(2.0 * b + w) + offset};
        };
        // d tau / d zeta
        auto slope = [&](cplx zeta) {
            const cplx w = std::exp(zeta);
            const cplx u = b + w;
            return rotation * (w - 2.0 * params.q * u / (u + b));
        };
        auto field = [&](cplx zeta) { return descent_direction(slope(zeta)); };

        // log(1+u^2) = zeta + log(u + b) up to a multiple of 2 pi i fixed here.
        cplx zeta = std::log(cur.u - b);
        const cplx offset = cur.logval - zeta - std::log(2.0 * b + (cur.u - b));
        const double stop = std::log(opts.eps_branch);

        double h = 0.1;
        for (;;) {
            if (++steps > opts.max_steps) throw MaxStepsExceeded("trace_steepest: step budget exhausted");
            h = std::min(h, 2.0);
            const auto [z_new, err] = dopri_step(field, zeta, h);
            if (!(err <= opts.rel_tol)) {
                h *= std::isfinite(err) ? step_factor(err, opts.rel_tol) : 0.2;
                if (h < 1e-14) throw MaxStepsExceeded("trace_steepest: step underflow near branch point");
                continue;
            }
            cplx z = z_new;
            const cplx t_trial = phase(point_at(z, offset), params);
            z -= kI * t_trial.imag() / slope(z);
            const PhasePoint next = point_at(z, offset);
            const cplx tau_next = phase(next, params);
            if (!(tau_next.real() > tau.real())) {
                h *= 0.5;
                if (h < 1e-14) throw MaxStepsExceeded("trace_steepest: stalled near branch point");
                continue;
            }
            zeta = z;
            cur = next;
            tau = tau_next;
            record(cur, tau);
            h *= step_factor(err, opts.rel_tol);
            if (zeta.real() < stop) return finish(b.imag() > 0 ? DomainLabel::ToPlusI : DomainLabel::ToMinusI);
        }
    }
};

}  // namespace

bool Parameters::admissible() const
{
    return std::abs(theta) < kPi / 2 && std::abs(omega() + theta) <= kPi / 2;
}

cplx one_plus_u2(cplx u)
{
    return (u - kI) * (u + kI);
}

PhasePoint PhasePoint::principal(cplx u)
{
    const cplx u2 = u * u;
    // log1p for tiny arguments
    const cplx lv = std::abs(u2) < 1e-4 ? u2 * (1.0 - u2 * (0.5 - u2 * (1.0 / 3 - u2 * 0.25))) : std::log(one_plus_u2(u));
    return {u, lv};
}

int PhasePoint::sheet() const
{
    const double principal_arg = std::arg(one_plus_u2(u));
    return static_cast<int>(std::lround((logval.imag() - principal_arg) / (2 * kPi)));
}

std::string_view to_string(DomainLabel label)
{
    switch (label) {
    case DomainLabel::ToInfinity: return "ToInfinity";
    case DomainLabel::ToPlusI: return "ToPlusI";
    case DomainLabel::ToMinusI: return "ToMinusI";
    case DomainLabel::OnTransition: return "OnTransition";
    }
    return "?";
}

std::optional<DomainLabel> parse_label(std::string_view text)
{
    for (auto l : {DomainLabel::ToInfinity, DomainLabel::ToPlusI, DomainLabel::ToMinusI, DomainLabel::OnTransition})
        if (to_string(l) == text) return l;
    return std::nullopt;
}

cplx phase(const PhasePoint& p, const Parameters& params)
{
    return std::polar(1.0, params.theta) * (p.u - params.q * p.logval);
}

cplx phase_derivative(cplx u, const Parameters& params)
{
    const cplx w = one_plus_u2(u);
    if (w == 0.0) throw BranchPointError("phase_derivative: u is a branch point");
    return std::polar(1.0, params.theta) * (1.0 - 2.0 * params.q * u / w);
}

cplx phase_derivative(const PhasePoint& p, const Parameters& params)
{
    return phase_derivative(p.u, params);
}

SaddlePair saddle_points(cplx q)
{
    // sqrt(q-1) sqrt(q+1) ~ q as q -> infinity; cut along (-inf, 1]
    const cplx root = std::sqrt(q - 1.0) * std::sqrt(q + 1.0);
    // the smaller root from u+ u- = 1 avoids the cancellation in q - root
    cplx big = q + root;
    if (std::abs(q - root) > std::abs(big) * (1 + 1e-12)) big = q - root;
    SaddlePair s{big, 1.0 / big, false};
    s.is_double = std::abs(root) <= 1e-12 * std::max(1.0, std::abs(q));
    return s;
}

PhasePoint continue_to(const PhasePoint& from, cplx to)
{
    // the segment must stay clear of both branch points
    const cplx d = to - from.u;
    for (cplx b : {kI, -kI}) {
        const double len2 = std::norm(d);
        double t = len2 > 0 ? ((b - from.u) * std::conj(d)).real() / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        if (std::abs(from.u + t * d - b) <= 1e-12 * std::max(1.0, std::abs(d)))
            throw ContinuationAmbiguous("continuation segment passes through a branch point");
    }
    // split so that every factor ratio stays in the right half-plane
    const double reach = std::abs(d);
    const double clearance = std::min(std::abs(from.u - kI), std::abs(from.u + kI));
    int pieces = 1;
    if (reach > 0.3 * clearance) pieces = static_cast<int>(std::ceil(reach / std::max(1e-300, 0.3 * clearance)));
    pieces = std::min(pieces, 1 << 16);
    PhasePoint p = from;
    for (int k = 1; k <= pieces; ++k) {
        const cplx next = from.u + d * (static_cast<double>(k) / pieces);
        p.logval += log_ratio(p.u, next);
        p.u = next;
    }
    return p;
}

double saddle_residual(const PhasePoint& near, cplx saddle_u, const Parameters& params)
{
    return phase(continue_to(near, saddle_u), params).imag();
}

PathTrace trace_steepest(const Parameters& params, const TraceOptions& opts)
{
    Tracer tracer(params, opts);
    return tracer.run();
}

DomainLabel classify_endpoint(const Parameters& params, const TraceOptions& opts)
{
    return trace_steepest(params, opts).terminal;
}

std::vector<PathRow> path_rows(const PathTrace& trace)
{
    std::vector<PathRow> rows;
    rows.reserve(trace.points.size());
    for (std::size_t i = 0; i < trace.points.size(); ++i) {
        const auto& p = trace.points[i];
        rows.push_back({p.u.real(), p.u.imag(), trace.tau_values[i].real(), p.sheet()});
    }
    return rows;
}

void export_path_csv(const PathTrace& trace, std::ostream& os)
{
    os << "re_u,im_u,re_tau,winding\n";
    char buf[128];
    for (const auto& r : path_rows(trace)) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", r.re_u, r.im_u, r.re_tau, r.winding);
        os << buf;
    }
}

void export_path_json(const PathTrace& trace, std::ostream& os)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : path_rows(trace))
        rows.push_back({{"re_u", r.re_u}, {"im_u", r.im_u}, {"re_tau", r.re_tau}, {"winding", r.winding}});
    nlohmann::json doc{{"terminal", std::string(to_string(trace.terminal))},
                       {"sheet_winding", trace.sheet_winding},
                       {"rows", rows}};
    os << doc.dump(1) << "\n";
}

std::vector<PathRow> read_path_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != "re_u,im_u,re_tau,winding")
        throw InvalidArgument("path csv: unexpected header");
    std::vector<PathRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        PathRow r{};
        char c1 = 0, c2 = 0, c3 = 0;
        if (!(ls >> r.re_u >> c1 >> r.im_u >> c2 >> r.re_tau >> c3 >> r.winding) || c1 != ',' || c2 != ',' || c3 != ',')
            throw InvalidArgument("path csv: malformed row: " + line);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace struve::landscape
