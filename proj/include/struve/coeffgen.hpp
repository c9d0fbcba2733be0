#pragma once

// Exact generation of the expansion coefficients c_k(q).
//
// The phase map t = u - q log(1+u^2) is reverted as a formal power series
// whose coefficients are polynomials in q with rational coefficients. The
// coefficients c_k(q) are then read off
//
//     (1+u^2)^{-1/2} du/dt = sum_k c_k(q) t^k .

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace struve::coeffgen {

/// Arbitrary-size rational, always canonical (lowest terms, positive
/// denominator).
using Rational = mpq_class;

/// Polynomial in q with exact rational coefficients; index = power of q.
class QPolynomial {
public:
    QPolynomial() = default;
    explicit QPolynomial(std::vector<Rational> coefficients);

    static QPolynomial constant(const Rational& c);
    static QPolynomial monomial(const Rational& c, std::size_t power);

    /// -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const noexcept { return coeffs_.empty(); }

    /// Coefficient of q^power; zero beyond the degree.
    Rational coefficient(std::size_t power) const;
    const std::vector<Rational>& coefficients() const noexcept { return coeffs_; }

    QPolynomial& operator+=(const QPolynomial& rhs);
    QPolynomial& operator-=(const QPolynomial& rhs);
    QPolynomial& operator*=(const Rational& s);

    friend QPolynomial operator+(QPolynomial a, const QPolynomial& b) { return a += b; }
    friend QPolynomial operator-(QPolynomial a, const QPolynomial& b) { return a -= b; }
    friend QPolynomial operator*(QPolynomial a, const Rational& s) { return a *= s; }
    friend QPolynomial operator*(const QPolynomial& a, const QPolynomial& b);
    friend bool operator==(const QPolynomial& a, const QPolynomial& b);

    /// Horner evaluation.
    std::complex<double> operator()(std::complex<double> q) const;

    /// Human-readable form, highest power first, e.g. "6q^2 - 1/2".
    std::string to_string(const std::string& var = "q") const;

    /// Coefficients as "num/den" strings ordered by power.
    std::vector<std::string> to_fraction_strings() const;
    static QPolynomial from_fraction_strings(const std::vector<std::string>& fractions);

private:
    void strip();
    std::vector<Rational> coeffs_;
};

/// Truncated power series in one variable with QPolynomial coefficients.
/// `order` is the number of retained powers: terms of degree >= order are
/// discarded by every operation.
class FormalSeries {
public:
    explicit FormalSeries(std::size_t order);
    FormalSeries(std::vector<QPolynomial> terms, std::size_t order);

    static FormalSeries identity(std::size_t order);

    std::size_t order() const noexcept { return order_; }
    const std::vector<QPolynomial>& terms() const noexcept { return terms_; }

    /// Coefficient of x^power (zero past the stored terms or the order).
    const QPolynomial& operator[](std::size_t power) const;
    void set(std::size_t power, QPolynomial value);

    FormalSeries& operator+=(const FormalSeries& rhs);
    FormalSeries& operator-=(const FormalSeries& rhs);
    friend FormalSeries operator+(FormalSeries a, const FormalSeries& b) { return a += b; }
    friend FormalSeries operator-(FormalSeries a, const FormalSeries& b) { return a -= b; }
    friend FormalSeries operator*(const FormalSeries& a, const FormalSeries& b);
    friend FormalSeries operator*(FormalSeries a, const Rational& s);
    friend bool operator==(const FormalSeries& a, const FormalSeries& b);

    /// Formal derivative; the result keeps order - 1 terms.
    FormalSeries derivative() const;

    /// Multiplicative inverse; requires a unit constant term.
    FormalSeries reciprocal() const;

    /// this^alpha for a series with constant term 1, via the J.C.P. Miller
    /// recurrence.
    FormalSeries power(const Rational& alpha) const;

private:
    void strip();
    std::vector<QPolynomial> terms_;
    std::size_t order_;
};

/// Series of t = u - q log(1+u^2) in u, with `order` retained powers.
FormalSeries forward_series(std::size_t order);

/// outer(inner(x)); inner must have a zero constant term.
FormalSeries compose(const FormalSeries& outer, const FormalSeries& inner);

/// Compositional inverse of s (zero constant term, unit linear term) by
/// Lagrange inversion. Throws VanishingLinearTerm when s[1] == 0 and
/// InvalidArgument when s[0] != 0 or s[1] != 1.
FormalSeries revert_series(const FormalSeries& s);

/// c_0 .. c_{k_max}. Memoized; safe to call concurrently.
const std::vector<QPolynomial>& coefficients(std::size_t k_max);

std::complex<double> eval_coefficient(const QPolynomial& c, std::complex<double> q);

}  // namespace struve::coeffgen
