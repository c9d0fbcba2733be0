#include "struve/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include "json.hpp"

#include "struve/coeffgen.hpp"
#include "struve/errors.hpp"

namespace struve::evaluate {

using mp::BigComplex;
using mp::BigReal;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// digits used for prefactors and coefficient values feeding double results
constexpr int kAuxDigits = 30;

bool is_nonpositive_integer(cplx w)
{
    return w.imag() == 0.0 && w.real() <= 0.0 && std::floor(w.real()) == w.real();
}

bool is_nonpositive_integer(const BigComplex& w)
{
    return w.im.is_zero() && w.re.sign() <= 0 && w.re.is_integer();
}

// Spouge: Gamma(z+1) = (z+a)^{z+1/2} e^{-z-a} (c_0 + sum_k c_k/(z+k)) with
// relative error below a^{-1/2} (2 pi)^{-(a+1/2)} for Re(z+a) > 0.
BigComplex spouge_log_gamma1(const BigComplex& z, int digits)
{
    const int a = static_cast<int>(std::ceil(digits * std::log(10.0) / std::log(2 * kPi))) + 2;
    const int wd = 2 * digits + 20;
    const BigReal pi = BigReal::pi(wd);
    const BigReal two(2.0, wd);
    BigComplex zw = z.with_digits(wd);

    BigComplex sum(sqrt(two * pi));
    BigReal fact(1.0, wd);  // (k-1)!
    for (int k = 1; k < a; ++k) {
        if (k > 1) fact *= BigReal(k - 1.0, wd);
        const BigReal base(a - static_cast<double>(k), wd);
        BigReal c = pow(base, BigReal(k - 0.5, wd)) * exp(base) / fact;
        if (k % 2 == 0) c = -c;
        sum += BigComplex(c) / (zw + BigComplex(BigReal(static_cast<double>(k), wd)));
    }
    const BigComplex za = zw + BigComplex(BigReal(static_cast<double>(a), wd));
    const BigComplex half(BigReal(0.5, wd));
    return (zw + half) * log(za) - za + log(sum);
}

}  // namespace

std::string_view to_string(Variant v)
{
    switch (v) {
    case Variant::PlusI: return "PlusI";
    case Variant::MinusI: return "MinusI";
    case Variant::MinusY: return "MinusY";
    }
    return "?";
}

std::string_view to_string(OracleMethod m)
{
    switch (m) {
    case OracleMethod::Quadrature12Plus: return "Quadrature12Plus";
    case OracleMethod::Quadrature12Minus: return "Quadrature12Minus";
    case OracleMethod::Quadrature13: return "Quadrature13";
    case OracleMethod::Maclaurin: return "Maclaurin";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// log Gamma

cplx log_gamma(cplx w)
{
    if (is_nonpositive_integer(w)) throw PoleAtNonpositiveInteger("log_gamma: pole at a nonpositive integer");
    // Sum of principal logs over the shift reproduces the principal branch.
    const int shift = w.real() < 15.0 ? static_cast<int>(std::ceil(15.0 - w.real())) : 0;
    cplx acc = 0.0;
    for (int j = 0; j < shift; ++j) acc += std::log(w + static_cast<double>(j));
    const cplx W = w + static_cast<double>(shift);
    static constexpr double kB[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6};
    cplx series = 0.0;
    const cplx inv = 1.0 / W, inv2 = inv * inv;
    cplx p = inv;
    for (int k = 1; k <= 7; ++k) {
        series += kB[k - 1] / (2.0 * k * (2.0 * k - 1)) * p;
        p *= inv2;
    }
    return (W - 0.5) * std::log(W) - W + 0.5 * std::log(2 * kPi) + series - acc;
}

BigComplex log_gamma(const BigComplex& w, int digits)
{
    if (is_nonpositive_integer(w)) throw PoleAtNonpositiveInteger("log_gamma: pole at a nonpositive integer");
    const int wd = digits + 10;
    BigComplex r;
    if (w.re < BigReal(0.5, 10)) {
        // reflection: log Gamma(w) = log pi - log sin(pi w) - log Gamma(1-w)
        const BigReal pi = BigReal::pi(wd);
        r = BigComplex(log(pi)) - log(sin(w.with_digits(wd) * pi)) - spouge_log_gamma1(-w.with_digits(wd), wd);
    } else {
        r = spouge_log_gamma1(w.with_digits(wd) - BigComplex(BigReal(1.0, wd)), wd);
    }
    // the principal branch differs from the computed one by 2 pi i k
    const cplx ref = log_gamma(w.to_cplx());
    const double two_pi = 2 * kPi;
    const double k = std::round((ref.imag() - r.im.to_double()) / two_pi);
    if (k != 0.0) r.im += BigReal(2.0 * k, wd) * BigReal::pi(wd);
    return r.with_digits(digits);
}

BigComplex log_gamma(cplx w, int digits)
{
    return log_gamma(BigComplex(w, digits), digits);
}

// ---------------------------------------------------------------------------
// Maclaurin series

namespace {

struct SeriesRun {
    BigComplex value;
    double cancellation = 0;  // log10(max|term| / |sum|)
};

SeriesRun maclaurin_run(cplx nu, cplx z, int wd)
{
    const BigComplex Bnu(nu, wd), Bz(z, wd);
    const BigComplex half = Bz / BigReal(2.0, wd);
    const BigComplex w2 = -(half * half);
    const BigReal three_halves(1.5, wd);

    // first index with n + nu + 3/2 off the poles of Gamma
    int n0 = 0;
    const cplx a = nu + 1.5;
    if (is_nonpositive_integer(a)) n0 = static_cast<int>(-a.real()) + 1;

    BigComplex sum(BigReal(0.0, wd));
    BigComplex t(BigReal(1.0, wd));
    double max_log = 0.0;
    const double target = -(wd + 3.0);
    for (int n = n0;; ++n) {
        sum += t;
        const BigReal bn(static_cast<double>(n), wd);
        const BigComplex denom = BigComplex(bn + three_halves) * (Bnu + BigComplex(bn + three_halves));
        const BigComplex ratio = w2 / denom;
        t *= ratio;
        const double lt = abs(t).log10_abs();
        max_log = std::max(max_log, lt);
        const double lr = abs(ratio).log10_abs();
        const double ls = abs(sum).log10_abs();
        // geometric tail bound once the ratio has dropped below 1/2
        if (lr < std::log10(0.5) && lt + std::log10(2.0) < ls + target) break;
        if (t.is_zero()) break;
        if (n > n0 + 1000000) throw NoConvergence("struve_maclaurin: series did not settle");
    }

    const BigReal nb0(static_cast<double>(n0), wd);
    const BigComplex expo = Bnu + BigComplex(BigReal(1.0, wd) + BigReal(2.0, wd) * nb0);
    BigComplex L = expo * log(half) - log_gamma(BigComplex(nb0 + three_halves), wd) -
                   log_gamma(Bnu + BigComplex(nb0 + three_halves), wd);
    BigComplex value = exp(L) * sum;
    if (n0 % 2 == 1) value = -value;
    return {value, max_log - abs(sum).log10_abs()};
}

}  // namespace

OracleResult struve_maclaurin(cplx nu, cplx z, int digits)
{
    if (digits < 1) throw InvalidArgument("struve_maclaurin: digits must be positive");
    if (z == 0.0) {
        if (nu.real() > -1.0) return {0.0, 0.0, OracleMethod::Maclaurin, BigComplex(cplx(0.0), digits)};
        throw DomainError("struve_maclaurin: z = 0 with Re nu <= -1");
    }
    int wd = digits + 15;
    SeriesRun run = maclaurin_run(nu, z, wd);
    if (run.cancellation > 5.0) {
        wd = digits + 15 + static_cast<int>(std::ceil(run.cancellation));
        run = maclaurin_run(nu, z, wd);
    }
    const SeriesRun fine = maclaurin_run(nu, z, 2 * wd);
    const double diff = abs(fine.value - run.value).to_double();
    OracleResult r;
    r.value = fine.value.to_cplx();
    r.est_error = diff;
    r.method = OracleMethod::Maclaurin;
    r.precise = fine.value.with_digits(digits);
    return r;
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

constexpr double kQuadTol = 1e-13;
constexpr unsigned kQuadDepth = 15;

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

struct Panel {
    cplx value;
    double est_error;
};

// Adaptive Gauss-Kronrod over [a, b] and again over its two halves; the
// refined value is kept and their difference is the error estimate.
template <typename F>
Panel integrate_panel(const F& f, double a, double b)
{
    const double m = 0.5 * (a + b);
    const cplx whole = GK::integrate(f, a, b, kQuadDepth, kQuadTol);
    const cplx refined = GK::integrate(f, a, m, kQuadDepth, kQuadTol) + GK::integrate(f, m, b, kQuadDepth, kQuadTol);
    return {refined, std::abs(refined - whole)};
}

// [0, 1] in panels short enough to hold a few oscillations of e^{-zu} each
template <typename F>
Panel integrate_unit(const F& f, cplx z)
{
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(z) / 20.0)));
    Panel total{0.0, 0.0};
    for (int j = 0; j < n; ++j) {
        const Panel p = integrate_panel(f, static_cast<double>(j) / n, static_cast<double>(j + 1) / n);
        total.value += p.value;
        total.est_error += p.est_error;
    }
    return total;
}

// log of 2 (z/2)^nu / (sqrt(pi) Gamma(nu+1/2))
cplx log_integral_prefactor(cplx nu, cplx z)
{
    return std::log(2.0) + nu * std::log(z / 2.0) - 0.5 * std::log(kPi) - log_gamma(nu + 0.5, kAuxDigits).to_cplx();
}

OracleResult scaled(cplx log_pref, cplx integral, double err, OracleMethod method)
{
    OracleResult r;
    r.value = std::exp(log_pref + std::log(integral));
    r.est_error = std::abs(r.value) * err / std::abs(integral);
    r.method = method;
    return r;
}

}  // namespace

OracleResult integral_12(cplx nu, cplx z, int sign)
{
    if (sign != 1 && sign != -1) throw InvalidArgument("integral_12: sign must be +1 or -1");
    if (!(nu.real() > -0.5)) throw DomainError("integral_12: requires Re nu > -1/2");
    if (!(z.real() > 0.0)) throw DomainError("integral_12: requires |arg z| < pi/2");
    const cplx s_i = static_cast<double>(sign) * kI;
    const cplx p = nu - 0.5;
    double err = 0;
    cplx I;
    if (nu.real() >= 1.5) {
        auto f = [&](double t) {
            const cplx u = s_i * t;
            return std::exp(-z * u + p * std::log((1.0 - t) * (1.0 + t))) * s_i;
        };
        const Panel r = integrate_unit(f, z);
        I = r.value;
        err = r.est_error;
    } else {
        // u = +-i (1 - s^m): 1 + u^2 = s^m (2 - s^m), du = -+i m s^{m-1} ds;
        // the integrand then behaves like s^{m(nu+1/2)-1}, at least linear
        const double m = std::max(2.0, std::ceil(2.0 / (nu.real() + 0.5)));
        auto f = [&, m](double s) {
            const double sm = std::pow(s, m);
            const cplx u = s_i * (1.0 - sm);
            return std::exp(-z * u + p * (m * std::log(s) + std::log(2.0 - sm))) * (m * sm / s) * s_i;
        };
        const Panel r = integrate_unit(f, z);
        I = r.value;
        err = r.est_error;
    }
    return scaled(log_integral_prefactor(nu, z), I, err,
                  sign > 0 ? OracleMethod::Quadrature12Plus : OracleMethod::Quadrature12Minus);
}

OracleResult integral_13(cplx nu, cplx z)
{
    if (!(z.real() > 0.0)) throw DomainError("integral_13: requires Re z > 0");
    const cplx p = nu - 0.5;
    auto log_f = [&](double u) { return -z * u + p * std::log1p(u * u); };
    auto f = [&](double u) { return std::exp(log_f(u)); };

    const double h = std::min(1.0, 4.0 / z.real());
    cplx total = 0.0;
    double err_total = 0.0;
    double a = 0.0;
    for (int panel = 0;; ++panel) {
        if (panel > 100000) throw NoConvergence("integral_13: tail did not decay");
        const double b = a + h;
        const Panel piece = integrate_panel(f, a, b);
        total += piece.value;
        err_total += piece.est_error;
        a = b;
        // log-derivative of the envelope; for u >= 1 it only decreases
        const double slope = -z.real() + p.real() * 2 * b / (1 + b * b);
        const bool decreasing = slope < 0 && (b >= 1.0 || p.real() < z.real());
        const double envelope = std::exp(log_f(b).real());
        if (decreasing && envelope < 1e-25 * std::abs(total)) break;
    }
    return scaled(log_integral_prefactor(nu, z), total, err_total, OracleMethod::Quadrature13);
}

// ---------------------------------------------------------------------------
// Asymptotic sums

namespace {

struct TruncationScan {
    std::size_t index = 0;
    bool stopped = false;  // two consecutive increases were seen
};

TruncationScan scan_truncation(const std::vector<cplx>& terms)
{
    if (terms.empty()) throw InvalidArgument("optimal_truncation: empty term list");
    TruncationScan s;
    double best = std::abs(terms[0]);
    int rising = 0;
    for (std::size_t k = 1; k < terms.size(); ++k) {
        const double m = std::abs(terms[k]);
        if (m < best) {
            best = m;
            s.index = k;
        }
        rising = m > std::abs(terms[k - 1]) ? rising + 1 : 0;
        if (rising == 2) {
            s.stopped = true;
            break;
        }
    }
    return s;
}

std::vector<cplx> asymptotic_terms(cplx q, cplx z, std::size_t k_max)
{
    const auto& coeffs = coeffgen::coefficients(k_max);
    const int wd = kAuxDigits + 10;
    const BigComplex Bq(q, wd), Bz(z, wd);
    std::vector<cplx> terms;
    terms.reserve(k_max + 1);
    BigComplex factor(BigReal(1.0, wd));  // k! / z^k
    for (std::size_t k = 0; k <= k_max; ++k) {
        if (k > 0) factor = factor * BigReal(static_cast<double>(k), wd) / Bz;
        const auto& c = coeffs[k].coefficients();
        BigComplex v(BigReal(0.0, wd));
        for (std::size_t j = c.size(); j-- > 0;) v = v * Bq + BigComplex(BigReal(c[j], wd));
        terms.push_back((v * factor).to_cplx());
    }
    return terms;
}

}  // namespace

std::size_t optimal_truncation(const std::vector<cplx>& terms)
{
    return scan_truncation(terms).index;
}

AsymptoticSum asymptotic_sum(cplx nu, cplx z, Variant variant, std::optional<std::size_t> k_max)
{
    if (z == 0.0) throw InvalidArgument("asymptotic_sum: z must be nonzero");
    AsymptoticSum s;
    s.nu = nu;
    s.z = z;
    s.variant = variant;
    const cplx q = nu / z;
    if (k_max) {
        s.terms = asymptotic_terms(q, z, *k_max);
        s.k_star = optimal_truncation(s.terms);
    } else {
        for (std::size_t n = 40;; n += 40) {
            s.terms = asymptotic_terms(q, z, n);
            const auto scan = scan_truncation(s.terms);
            s.k_star = scan.index;
            if (scan.stopped || n >= 160) break;
        }
    }
    const cplx log_pref = (nu - 1.0) * std::log(z / 2.0) - 0.5 * std::log(kPi) - log_gamma(nu + 0.5, kAuxDigits).to_cplx();
    s.prefactor = std::exp(log_pref);
    cplx sum = 0.0;
    for (std::size_t k = 0; k <= s.k_star; ++k) sum += s.terms[k];
    s.total = std::exp(log_pref + std::log(sum));
    return s;
}

cplx continue_argument(cplx nu, int m)
{
    return std::exp(kI * kPi * static_cast<double>(m) * (nu + 1.0));
}

// ---------------------------------------------------------------------------
// Reports

EvalReport error_report(cplx q, double theta, double modulus_z, std::optional<std::size_t> k_max, int digits)
{
    const landscape::Parameters params{q, theta};
    if (!params.admissible() || !(modulus_z > 0)) throw InvalidArgument("error_report: parameters outside the admissible sector");
    EvalReport r;
    r.q = q;
    r.theta = theta;
    r.endpoint = landscape::classify_endpoint(params);
    switch (r.endpoint) {
    case landscape::DomainLabel::ToInfinity:
        r.variant = Variant::MinusY;
        r.endpoint_text = "inf";
        break;
    case landscape::DomainLabel::ToPlusI:
        r.variant = Variant::PlusI;
        r.endpoint_text = "+i";
        break;
    case landscape::DomainLabel::ToMinusI:
        r.variant = Variant::MinusI;
        r.endpoint_text = "-i";
        break;
    case landscape::DomainLabel::OnTransition:
        if (theta == 0.0 && q.imag() == 0.0 && q.real() >= 1.0) {
            // real parameters: both continuations past S2 give conjugate results
            r.variant = Variant::PlusI;
            r.endpoint_text = "+-i";
            break;
        }
        throw OnTransitionUnsupported("error_report: q lies on a transition curve");
    }
    r.z = std::polar(modulus_z, theta);
    r.nu = q * r.z;
    const AsymptoticSum a = asymptotic_sum(r.nu, r.z, r.variant, k_max);
    const OracleResult o = r.variant == Variant::MinusY ? integral_13(r.nu, r.z)
                                                        : integral_12(r.nu, r.z, r.variant == Variant::PlusI ? 1 : -1);
    const OracleResult h = struve_maclaurin(r.nu, r.z, std::max(digits, mp::kDefaultDigits));
    r.asymptotic = a.total;
    r.oracle = o.value;
    r.struve_h = h.value;
    r.k_star = a.k_star;
    r.rel_err_H = std::abs(a.total - o.value) / std::abs(h.value);
    r.rel_err_combo = std::abs(a.total - o.value) / std::abs(o.value);
    return r;
}

void write_reports_csv(const std::vector<EvalReport>& reports, std::ostream& os)
{
    os << "q_re,q_im,theta_over_pi,endpoint,rel_err_H,rel_err_combo,k_star\n";
    char buf[256];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s,%.6e,%.6e,%zu\n", r.q.real(), r.q.imag(), r.theta / kPi,
                      r.endpoint_text.c_str(), r.rel_err_H, r.rel_err_combo, r.k_star);
        os << buf;
    }
}

void write_reports_json(const std::vector<EvalReport>& reports, std::ostream& os)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        arr.push_back({{"q_re", r.q.real()},
                       {"q_im", r.q.imag()},
                       {"theta_over_pi", r.theta / kPi},
                       {"endpoint", r.endpoint_text},
                       {"rel_err_H", r.rel_err_H},
                       {"rel_err_combo", r.rel_err_combo},
                       {"k_star", r.k_star}});
    }
    os << arr.dump(2) << '\n';
}

}  // namespace struve::evaluate
