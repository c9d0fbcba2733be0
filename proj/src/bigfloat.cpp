#include "struve/bigfloat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "struve/errors.hpp"

namespace struve::mp {

namespace {

constexpr double kLog2Of10 = 3.321928094887362;

}  // namespace

long digits_to_bits(int digits)
{
    return static_cast<long>(std::ceil(std::max(digits, 1) * kLog2Of10)) + 4;
}

int bits_to_digits(long bits)
{
    return static_cast<int>(std::floor((bits - 4) / kLog2Of10));
}

BigReal::BigReal(long bits)
{
    mpfr_init2(v_, std::max<long>(bits, MPFR_PREC_MIN));
    mpfr_set_zero(v_, 1);
}

BigReal BigReal::zero_bits(long bits)
{
    return BigReal(bits);
}

BigReal::BigReal(double x, int digits) : BigReal(std::max<long>(digits_to_bits(digits), 53))
{
    mpfr_set_d(v_, x, MPFR_RNDN);
}

BigReal::BigReal(const mpq_class& x, int digits) : BigReal(digits_to_bits(digits))
{
    mpfr_set_q(v_, x.get_mpq_t(), MPFR_RNDN);
}

BigReal BigReal::from_string(const std::string& text, int digits)
{
    BigReal r(digits_to_bits(digits));
    if (mpfr_set_str(r.v_, text.c_str(), 10, MPFR_RNDN) != 0) throw InvalidArgument("BigReal: cannot parse '" + text + "'");
    return r;
}

BigReal BigReal::pi(int digits)
{
    BigReal r(digits_to_bits(digits));
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
}

BigReal::BigReal(const BigReal& other)
{
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
}

BigReal::BigReal(BigReal&& other) noexcept
{
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, other.v_);
}

BigReal& BigReal::operator=(const BigReal& other)
{
    if (this != &other) {
        mpfr_set_prec(v_, mpfr_get_prec(other.v_));
        mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
}

BigReal& BigReal::operator=(BigReal&& other) noexcept
{
    mpfr_swap(v_, other.v_);
    return *this;
}

BigReal::~BigReal()
{
    mpfr_clear(v_);
}

BigReal BigReal::with_digits(int digits) const
{
    BigReal r(digits_to_bits(digits));
    mpfr_set(r.v_, v_, MPFR_RNDN);
    return r;
}

void BigReal::raise_precision(long bits)
{
    if (bits > this->bits()) mpfr_prec_round(v_, bits, MPFR_RNDN);
}

std::string BigReal::to_string(int digits) const
{
    std::unique_ptr<char[]> buf(new char[static_cast<std::size_t>(digits) + 64]);
    mpfr_snprintf(buf.get(), static_cast<std::size_t>(digits) + 64, "%.*Re", std::max(digits - 1, 0), v_);
    return buf.get();
}

double BigReal::log10_abs() const
{
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    long e = 0;
    const double m = mpfr_get_d_2exp(&e, v_, MPFR_RNDN);
    return std::log10(std::abs(m)) + static_cast<double>(e) * std::log10(2.0);
}

BigReal BigReal::operator-() const
{
    BigReal r(*this);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
}

BigReal& BigReal::operator+=(const BigReal& o)
{
    raise_precision(o.bits());
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

BigReal& BigReal::operator-=(const BigReal& o)
{
    raise_precision(o.bits());
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

BigReal& BigReal::operator*=(const BigReal& o)
{
    raise_precision(o.bits());
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

BigReal& BigReal::operator/=(const BigReal& o)
{
    raise_precision(o.bits());
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

namespace {

template <typename F>
BigReal unary(const BigReal& x, F f)
{
    BigReal r = BigReal::zero_bits(x.bits());
    f(r.get(), x.get(), MPFR_RNDN);
    return r;
}

template <typename F>
BigReal binary(const BigReal& x, const BigReal& y, F f)
{
    BigReal r = BigReal::zero_bits(std::max(x.bits(), y.bits()));
    f(r.get(), x.get(), y.get(), MPFR_RNDN);
    return r;
}

}  // namespace

BigReal abs(const BigReal& x) { return unary(x, mpfr_abs); }
BigReal sqrt(const BigReal& x) { return unary(x, mpfr_sqrt); }
BigReal exp(const BigReal& x) { return unary(x, mpfr_exp); }
BigReal log(const BigReal& x) { return unary(x, mpfr_log); }
BigReal sin(const BigReal& x) { return unary(x, mpfr_sin); }
BigReal cos(const BigReal& x) { return unary(x, mpfr_cos); }
BigReal atan2(const BigReal& y, const BigReal& x) { return binary(y, x, mpfr_atan2); }
BigReal pow(const BigReal& x, const BigReal& y) { return binary(x, y, mpfr_pow); }

BigReal round(const BigReal& x)
{
    BigReal r = BigReal::zero_bits(x.bits());
    mpfr_round(r.get(), x.get());
    return r;
}

// ---------------------------------------------------------------------------

BigComplex::BigComplex(BigReal r, BigReal i) : re(std::move(r)), im(std::move(i))
{
    const long b = bits();
    if (re.bits() < b) re += BigReal::zero_bits(b);
    if (im.bits() < b) im += BigReal::zero_bits(b);
}

BigComplex::BigComplex(std::complex<double> z, int digits) : re(z.real(), digits), im(z.imag(), digits) {}

BigComplex::BigComplex(const BigReal& r) : re(r), im(BigReal::zero_bits(r.bits())) {}

BigComplex& BigComplex::operator+=(const BigComplex& o)
{
    re += o.re;
    im += o.im;
    return *this;
}

BigComplex& BigComplex::operator-=(const BigComplex& o)
{
    re -= o.re;
    im -= o.im;
    return *this;
}

BigComplex& BigComplex::operator*=(const BigComplex& o)
{
    BigReal r = re * o.re - im * o.im;
    BigReal i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

BigComplex& BigComplex::operator/=(const BigComplex& o)
{
    const BigReal d = norm(o);
    BigReal r = (re * o.re + im * o.im) / d;
    BigReal i = (im * o.re - re * o.im) / d;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

BigComplex& BigComplex::operator*=(const BigReal& o)
{
    re *= o;
    im *= o;
    return *this;
}

BigComplex& BigComplex::operator/=(const BigReal& o)
{
    re /= o;
    im /= o;
    return *this;
}

BigReal norm(const BigComplex& z)
{
    return z.re * z.re + z.im * z.im;
}

BigReal abs(const BigComplex& z)
{
    return binary(z.re, z.im, mpfr_hypot);
}

BigReal arg(const BigComplex& z)
{
    return atan2(z.im, z.re);
}

BigComplex exp(const BigComplex& z)
{
    const BigReal m = exp(z.re);
    return {m * cos(z.im), m * sin(z.im)};
}

BigComplex log(const BigComplex& z)
{
    if (z.is_zero()) throw DomainError("log: zero argument");
    return {log(abs(z)), arg(z)};
}

BigComplex sin(const BigComplex& z)
{
    // sin(x+iy) = sin x cosh y + i cos x sinh y
    BigReal ch = BigReal::zero_bits(z.bits()), sh = BigReal::zero_bits(z.bits());
    mpfr_cosh(ch.get(), z.im.get(), MPFR_RNDN);
    mpfr_sinh(sh.get(), z.im.get(), MPFR_RNDN);
    return {sin(z.re) * ch, cos(z.re) * sh};
}

}  // namespace struve::mp
