#pragma once

// Asymptotic expansions of H_nu(z) -+ iJ_nu(z) and H_nu(z) - Y_nu(z) in
// inverse powers of z at fixed q = nu/z, optimally truncated, and the
// independent values they are checked against: the Maclaurin series of
// H_nu in multiprecision and quadrature of the two Laplace-type integrals.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "struve/bigfloat.hpp"
#include "struve/landscape.hpp"

namespace struve::evaluate {

using cplx = std::complex<double>;

/// Which combination the (common) asymptotic sum approximates.
enum class Variant {
    PlusI,   // H + iJ, path ends at +i
    MinusI,  // H - iJ, path ends at -i
    MinusY,  // H - Y, path runs to infinity
};

enum class OracleMethod { Quadrature12Plus, Quadrature12Minus, Quadrature13, Maclaurin };

std::string_view to_string(Variant v);
std::string_view to_string(OracleMethod m);

struct OracleResult {
    cplx value;
    /// Absolute error estimate from the difference of two refinements.
    double est_error = 0;
    OracleMethod method{};
    /// Full-precision value (Maclaurin only).
    std::optional<mp::BigComplex> precise;
};

struct AsymptoticSum {
    cplx nu;
    cplx z;
    Variant variant{};
    /// terms[k] = c_k(q) k! / z^k
    std::vector<cplx> terms;
    std::size_t k_star = 0;
    /// (z/2)^{nu-1} / (sqrt(pi) Gamma(nu+1/2))
    cplx prefactor;
    /// prefactor * sum_{k <= k_star} terms[k]
    cplx total;
};

/// Principal log Gamma(w). Throws PoleAtNonpositiveInteger.
mp::BigComplex log_gamma(const mp::BigComplex& w, int digits);
mp::BigComplex log_gamma(cplx w, int digits);
/// Double-precision principal log Gamma (shift and Stirling).
cplx log_gamma(cplx w);

OracleResult struve_maclaurin(cplx nu, cplx z, int digits = mp::kDefaultDigits);

/// H_nu(z) + sign i J_nu(z), sign = +1 or -1. Throws DomainError if
/// Re nu <= -1/2 or |arg z| >= pi/2.
OracleResult integral_12(cplx nu, cplx z, int sign);
/// H_nu(z) - Y_nu(z). Throws DomainError if Re z <= 0.
OracleResult integral_13(cplx nu, cplx z);

/// Terms 0..k_max when given, otherwise extended until the least term is
/// passed; the sum is cut at optimal_truncation over the computed terms.
AsymptoticSum asymptotic_sum(cplx nu, cplx z, Variant variant, std::optional<std::size_t> k_max = std::nullopt);

/// Index of the least |term| (first on ties); the scan stops after two
/// consecutive strict increases.
std::size_t optimal_truncation(const std::vector<cplx>& terms);

/// e^{pi m i (nu+1)}, the factor in H_nu(z e^{pi m i}) = e^{pi m i (nu+1)} H_nu(z).
cplx continue_argument(cplx nu, int m);

struct EvalReport {
    cplx q;
    double theta = 0;
    landscape::DomainLabel endpoint{};
    /// "inf", "+i", "-i", or "+-i" for real q >= 1 at theta = 0, where the
    /// path runs along the real axis into S2 and on to both branch points.
    std::string endpoint_text;
    Variant variant{};
    cplx nu, z;
    cplx asymptotic;
    cplx oracle;
    cplx struve_h;
    double rel_err_H = 0;
    double rel_err_combo = 0;
    std::size_t k_star = 0;
};

/// Highest coefficient index of the printed coefficient table; the default
/// term range for error reports.
inline constexpr std::size_t kTabulatedOrder = 10;

/// z = modulus e^{i theta}, nu = q z. The asymptotic sum is cut at the least
/// term among k <= k_max (unbounded search when k_max is empty). Throws
/// OnTransitionUnsupported on a transition curve (other than the theta = 0
/// segment q >= 1).
EvalReport error_report(cplx q, double theta, double modulus_z,
                        std::optional<std::size_t> k_max = kTabulatedOrder, int digits = mp::kDefaultDigits);

/// CSV q_re,q_im,theta_over_pi,endpoint,rel_err_H,rel_err_combo,k_star
void write_reports_csv(const std::vector<EvalReport>& reports, std::ostream& os);
void write_reports_json(const std::vector<EvalReport>& reports, std::ostream& os);

}  // namespace struve::evaluate
