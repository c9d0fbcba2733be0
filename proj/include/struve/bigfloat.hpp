#pragma once

// Multiprecision reals and complexes over MPFR. Every value carries its own
// precision; a binary operation yields the larger of the operand precisions,
// and changing precision is always an explicit call.

#include <algorithm>
#include <complex>
#include <string>

#include <gmpxx.h>
#include <mpfr.h>

namespace struve::mp {

inline constexpr int kDefaultDigits = 50;

long digits_to_bits(int digits);
int bits_to_digits(long bits);

class BigReal {
public:
    BigReal() : BigReal(0.0, kDefaultDigits) {}
    BigReal(double x, int digits);
    BigReal(const mpq_class& x, int digits);
    static BigReal from_string(const std::string& text, int digits);
    static BigReal pi(int digits);
    /// Zero carrying `bits` of precision.
    static BigReal zero_bits(long bits);

    BigReal(const BigReal& other);
    BigReal(BigReal&& other) noexcept;
    BigReal& operator=(const BigReal& other);
    BigReal& operator=(BigReal&& other) noexcept;
    ~BigReal();

    long bits() const { return static_cast<long>(mpfr_get_prec(v_)); }
    int digits() const { return bits_to_digits(bits()); }
    BigReal with_digits(int digits) const;

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    /// Scientific notation with `digits` significant digits.
    std::string to_string(int digits) const;

    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_integer() const { return mpfr_integer_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }
    /// log10 |x|, or -infinity for zero.
    double log10_abs() const;

    mpfr_srcptr get() const { return v_; }
    mpfr_ptr get() { return v_; }

    BigReal operator-() const;
    BigReal& operator+=(const BigReal& o);
    BigReal& operator-=(const BigReal& o);
    BigReal& operator*=(const BigReal& o);
    BigReal& operator/=(const BigReal& o);

    friend BigReal operator+(BigReal a, const BigReal& b) { return a += b; }
    friend BigReal operator-(BigReal a, const BigReal& b) { return a -= b; }
    friend BigReal operator*(BigReal a, const BigReal& b) { return a *= b; }
    friend BigReal operator/(BigReal a, const BigReal& b) { return a /= b; }
    friend bool operator<(const BigReal& a, const BigReal& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
    friend bool operator>(const BigReal& a, const BigReal& b) { return b < a; }
    friend bool operator==(const BigReal& a, const BigReal& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

private:
    explicit BigReal(long bits);
    void raise_precision(long bits);
    mpfr_t v_;
};

BigReal abs(const BigReal& x);
BigReal sqrt(const BigReal& x);
BigReal exp(const BigReal& x);
BigReal log(const BigReal& x);
BigReal sin(const BigReal& x);
BigReal cos(const BigReal& x);
BigReal atan2(const BigReal& y, const BigReal& x);
BigReal pow(const BigReal& x, const BigReal& y);
BigReal round(const BigReal& x);

struct BigComplex {
    BigReal re;
    BigReal im;

    BigComplex() = default;
    BigComplex(BigReal r, BigReal i);
    BigComplex(std::complex<double> z, int digits);
    explicit BigComplex(const BigReal& r);

    long bits() const { return std::max(re.bits(), im.bits()); }
    int digits() const { return bits_to_digits(bits()); }
    BigComplex with_digits(int digits) const { return {re.with_digits(digits), im.with_digits(digits)}; }
    std::complex<double> to_cplx() const { return {re.to_double(), im.to_double()}; }
    bool is_zero() const { return re.is_zero() && im.is_zero(); }

    BigComplex operator-() const { return {-re, -im}; }
    BigComplex& operator+=(const BigComplex& o);
    BigComplex& operator-=(const BigComplex& o);
    BigComplex& operator*=(const BigComplex& o);
    BigComplex& operator/=(const BigComplex& o);
    BigComplex& operator*=(const BigReal& o);
    BigComplex& operator/=(const BigReal& o);

    friend BigComplex operator+(BigComplex a, const BigComplex& b) { return a += b; }
    friend BigComplex operator-(BigComplex a, const BigComplex& b) { return a -= b; }
    friend BigComplex operator*(BigComplex a, const BigComplex& b) { return a *= b; }
    friend BigComplex operator/(BigComplex a, const BigComplex& b) { return a /= b; }
    friend BigComplex operator*(BigComplex a, const BigReal& b) { return a *= b; }
    friend BigComplex operator/(BigComplex a, const BigReal& b) { return a /= b; }
};

BigReal abs(const BigComplex& z);
BigReal norm(const BigComplex& z);
BigReal arg(const BigComplex& z);
BigComplex exp(const BigComplex& z);
/// Principal branch.
BigComplex log(const BigComplex& z);
BigComplex sin(const BigComplex& z);

}  // namespace struve::mp
