#include "struve/coeffgen.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "struve/errors.hpp"

namespace struve::coeffgen {

// ---------------------------------------------------------------------------
// QPolynomial

QPolynomial::QPolynomial(std::vector<Rational> coefficients) : coeffs_(std::move(coefficients))
{
    strip();
}

QPolynomial QPolynomial::constant(const Rational& c)
{
    return QPolynomial(std::vector<Rational>{c});
}

QPolynomial QPolynomial::monomial(const Rational& c, std::size_t power)
{
    std::vector<Rational> v(power + 1);
    v[power] = c;
    return QPolynomial(std::move(v));
}

void QPolynomial::strip()
{
    while (!coeffs_.empty() && sgn(coeffs_.back()) == 0) coeffs_.pop_back();
}

Rational QPolynomial::coefficient(std::size_t power) const
{
    return power < coeffs_.size() ? coeffs_[power] : Rational(0);
}

QPolynomial& QPolynomial::operator+=(const QPolynomial& rhs)
{
    if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size());
    for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
    strip();
    return *this;
}

QPolynomial& QPolynomial::operator-=(const QPolynomial& rhs)
{
    if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size());
    for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
    strip();
    return *this;
}

QPolynomial& QPolynomial::operator*=(const Rational& s)
{
    if (sgn(s) == 0) {
        coeffs_.clear();
        return *this;
    }
    for (auto& c : coeffs_) c *= s;
    return *this;
}

QPolynomial operator*(const QPolynomial& a, const QPolynomial& b)
{
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> out(a.coeffs_.size() + b.coeffs_.size() - 1);
    Rational prod;
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
        if (sgn(a.coeffs_[i]) == 0) continue;
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
            if (sgn(b.coeffs_[j]) == 0) continue;
            mpq_mul(prod.get_mpq_t(), a.coeffs_[i].get_mpq_t(), b.coeffs_[j].get_mpq_t());
            out[i + j] += prod;
        }
    }
    return QPolynomial(std::move(out));
}

bool operator==(const QPolynomial& a, const QPolynomial& b)
{
    return a.coeffs_ == b.coeffs_;
}

std::complex<double> QPolynomial::operator()(std::complex<double> q) const
{
    std::complex<double> acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * q + it->get_d();
    return acc;
}

std::string QPolynomial::to_string(const std::string& var) const
{
    if (coeffs_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t p = coeffs_.size(); p-- > 0;) {
        const Rational& c = coeffs_[p];
        if (sgn(c) == 0) continue;
        Rational mag = abs(c);
        if (first) {
            if (sgn(c) < 0) os << "-";
        } else {
            os << (sgn(c) < 0 ? " - " : " + ");
        }
        first = false;
        const bool integral = mag.get_den() == 1;
        if (p == 0) {
            os << mag.get_str();
            continue;
        }
        if (!(integral && mag == 1)) os << (integral ? mag.get_str() : "(" + mag.get_str() + ")");
        os << var;
        if (p > 1) os << "^" << p;
    }
    return os.str();
}

std::vector<std::string> QPolynomial::to_fraction_strings() const
{
    std::vector<std::string> out;
    out.reserve(coeffs_.size());
    for (const auto& c : coeffs_) out.push_back(c.get_num().get_str() + "/" + c.get_den().get_str());
    return out;
}

QPolynomial QPolynomial::from_fraction_strings(const std::vector<std::string>& fractions)
{
    std::vector<Rational> v;
    v.reserve(fractions.size());
    for (const auto& f : fractions) {
        Rational r;
        if (r.set_str(f, 10) != 0 || sgn(r.get_den()) == 0)
            throw InvalidArgument("malformed rational: " + f);
        r.canonicalize();
        v.push_back(r);
    }
    return QPolynomial(std::move(v));
}

std::complex<double> eval_coefficient(const QPolynomial& c, std::complex<double> q)
{
    return c(q);
}

// ---------------------------------------------------------------------------
// FormalSeries

namespace {
const QPolynomial kZero{};
}

FormalSeries::FormalSeries(std::size_t order) : order_(order) {}

FormalSeries::FormalSeries(std::vector<QPolynomial> terms, std::size_t order)
    : terms_(std::move(terms)), order_(order)
{
    strip();
}

FormalSeries FormalSeries::identity(std::size_t order)
{
    FormalSeries s(order);
    s.set(1, QPolynomial::constant(1));
    return s;
}

void FormalSeries::strip()
{
    if (terms_.size() > order_) terms_.resize(order_);
    while (!terms_.empty() && terms_.back().is_zero()) terms_.pop_back();
}

const QPolynomial& FormalSeries::operator[](std::size_t power) const
{
    return power < terms_.size() ? terms_[power] : kZero;
}

void FormalSeries::set(std::size_t power, QPolynomial value)
{
    if (power >= order_) return;
    if (power >= terms_.size()) terms_.resize(power + 1);
    terms_[power] = std::move(value);
    strip();
}

FormalSeries& FormalSeries::operator+=(const FormalSeries& rhs)
{
    order_ = std::min(order_, rhs.order_);
    if (rhs.terms_.size() > terms_.size()) terms_.resize(rhs.terms_.size());
    for (std::size_t i = 0; i < rhs.terms_.size(); ++i) terms_[i] += rhs.terms_[i];
    strip();
    return *this;
}

FormalSeries& FormalSeries::operator-=(const FormalSeries& rhs)
{
    order_ = std::min(order_, rhs.order_);
    if (rhs.terms_.size() > terms_.size()) terms_.resize(rhs.terms_.size());
    for (std::size_t i = 0; i < rhs.terms_.size(); ++i) terms_[i] -= rhs.terms_[i];
    strip();
    return *this;
}

FormalSeries operator*(const FormalSeries& a, const FormalSeries& b)
{
    const std::size_t order = std::min(a.order_, b.order_);
    std::vector<QPolynomial> out(std::min(order, a.terms_.size() + b.terms_.size()));
    for (std::size_t i = 0; i < a.terms_.size() && i < out.size(); ++i) {
        if (a.terms_[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.terms_.size() && i + j < out.size(); ++j) {
            if (b.terms_[j].is_zero()) continue;
            out[i + j] += a.terms_[i] * b.terms_[j];
        }
    }
    return FormalSeries(std::move(out), order);
}

FormalSeries operator*(FormalSeries a, const Rational& s)
{
    for (auto& t : a.terms_) t *= s;
    a.strip();
    return a;
}

bool operator==(const FormalSeries& a, const FormalSeries& b)
{
    return a.order_ == b.order_ && a.terms_ == b.terms_;
}

FormalSeries FormalSeries::derivative() const
{
    FormalSeries d(order_ == 0 ? 0 : order_ - 1);
    for (std::size_t i = 1; i < terms_.size(); ++i) d.set(i - 1, terms_[i] * Rational(static_cast<long>(i)));
    return d;
}

namespace {

// Constant term as a rational; throws unless the term is a constant.
Rational constant_term(const FormalSeries& s, const char* what)
{
    const QPolynomial& c = s[0];
    if (c.degree() > 0) throw InvalidArgument(std::string(what) + ": constant term depends on q");
    return c.coefficient(0);
}

}  // namespace

FormalSeries FormalSeries::reciprocal() const
{
    const Rational c0 = constant_term(*this, "reciprocal");
    if (sgn(c0) == 0) throw InvalidArgument("reciprocal: series has zero constant term");
    const Rational inv0 = 1 / c0;
    FormalSeries r(order_);
    std::vector<QPolynomial> out(order_);
    if (order_ == 0) return r;
    out[0] = QPolynomial::constant(inv0);
    for (std::size_t n = 1; n < order_; ++n) {
        QPolynomial acc;
        for (std::size_t k = 1; k <= n && k < terms_.size(); ++k) {
            if (terms_[k].is_zero() || out[n - k].is_zero()) continue;
            acc += terms_[k] * out[n - k];
        }
        out[n] = acc * (-inv0);
    }
    return FormalSeries(std::move(out), order_);
}

FormalSeries FormalSeries::power(const Rational& alpha) const
{
    if (constant_term(*this, "power") != 1) throw InvalidArgument("power: constant term must be 1");
    std::vector<QPolynomial> out(order_);
    if (order_ == 0) return FormalSeries(order_);
    out[0] = QPolynomial::constant(1);
    const Rational a1 = alpha + 1;
    for (std::size_t n = 1; n < order_; ++n) {
        QPolynomial acc;
        for (std::size_t k = 1; k <= n && k < terms_.size(); ++k) {
            if (terms_[k].is_zero() || out[n - k].is_zero()) continue;
            const Rational w = a1 * static_cast<long>(k) - static_cast<long>(n);
            if (sgn(w) == 0) continue;
            acc += (terms_[k] * out[n - k]) * w;
        }
        out[n] = acc * Rational(1, static_cast<unsigned long>(n));
    }
    return FormalSeries(std::move(out), order_);
}

// ---------------------------------------------------------------------------

FormalSeries forward_series(std::size_t order)
{
    if (order < 1) throw InvalidArgument("forward_series: order must be >= 1");
    FormalSeries t(order);
    t.set(1, QPolynomial::constant(1));
    // log(1+u^2) = sum_j (-1)^{j+1} u^{2j} / j
    for (std::size_t j = 1; 2 * j < order; ++j) {
        const Rational c(j % 2 == 1 ? -1 : 1, static_cast<unsigned long>(j));
        t.set(2 * j, QPolynomial::monomial(c, 1));
    }
    return t;
}

FormalSeries compose(const FormalSeries& outer, const FormalSeries& inner)
{
    if (!inner[0].is_zero()) throw InvalidArgument("compose: inner series must have zero constant term");
    const std::size_t order = std::min(outer.order(), inner.order());
    FormalSeries result(order);
    const std::size_t n = std::min(order, outer.terms().size());
    for (std::size_t k = n; k-- > 0;) {
        result = result * inner;
        FormalSeries c(order);
        c.set(0, outer[k]);
        result += c;
    }
    return result;
}

FormalSeries revert_series(const FormalSeries& s)
{
    const std::size_t order = s.order();
    if (!s[0].is_zero()) throw InvalidArgument("revert_series: constant term must vanish");
    if (s[1].is_zero()) throw VanishingLinearTerm("revert_series: linear coefficient vanishes");
    if (s[1].degree() > 0) throw InvalidArgument("revert_series: linear coefficient depends on q");

    // h = s/x, g = x/s = 1/h; a_n = [x^{n-1}] g^n / n
    std::vector<QPolynomial> h_terms;
    for (std::size_t i = 1; i < s.terms().size(); ++i) h_terms.push_back(s[i]);
    const Rational lead = s[1].coefficient(0);
    // g normalized to a unit constant term: g = g_unit / lead
    const FormalSeries g_unit = FormalSeries(std::move(h_terms), order).reciprocal() * lead;

    FormalSeries result(order);
    Rational lead_pow = 1;
    for (std::size_t n = 1; n < order; ++n) {
        lead_pow *= lead;
        // only coefficients below n of g^n are needed for a_n
        const FormalSeries g_pow = FormalSeries(g_unit.terms(), n).power(Rational(static_cast<long>(n)));
        result.set(n, g_pow[n - 1] * (1 / (lead_pow * static_cast<long>(n))));
    }
    return result;
}

namespace {

std::vector<QPolynomial> compute_coefficients(std::size_t k_max)
{
    // u(t) to t^{k_max+1} so that du/dt reaches t^{k_max}
    const std::size_t order = k_max + 2;
    const FormalSeries u = revert_series(forward_series(order));
    const FormalSeries du = u.derivative();

    FormalSeries one_plus_u2 = u * u;
    one_plus_u2.set(0, QPolynomial::constant(1));
    const FormalSeries inv_sqrt = one_plus_u2.power(Rational(-1, 2));

    const FormalSeries w = FormalSeries(inv_sqrt.terms(), k_max + 1) * du;
    std::vector<QPolynomial> out(k_max + 1);
    for (std::size_t k = 0; k <= k_max; ++k) out[k] = w[k];
    return out;
}

std::mutex g_cache_mutex;
std::map<std::size_t, std::unique_ptr<const std::vector<QPolynomial>>> g_cache;

}  // namespace

const std::vector<QPolynomial>& coefficients(std::size_t k_max)
{
    {
        std::lock_guard lock(g_cache_mutex);
        if (auto it = g_cache.find(k_max); it != g_cache.end()) return *it->second;
        // a longer cached list has the same prefix
        if (auto it = g_cache.upper_bound(k_max); it != g_cache.end()) {
            auto list = std::make_unique<const std::vector<QPolynomial>>(
                it->second->begin(), it->second->begin() + static_cast<std::ptrdiff_t>(k_max + 1));
            return *g_cache.emplace(k_max, std::move(list)).first->second;
        }
    }
    auto list = std::make_unique<const std::vector<QPolynomial>>(compute_coefficients(k_max));
    std::lock_guard lock(g_cache_mutex);
    auto [it, inserted] = g_cache.emplace(k_max, std::move(list));
    return *it->second;
}

}  // namespace struve::coeffgen
