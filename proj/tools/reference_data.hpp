#pragma once

// Published reference values the table subcommands check against. Every
// entry keeps the row label it was transcribed from.

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace struve::cli::reference {

/// c_k(q) as "num/den" strings ordered by power of q.
struct CoefficientRow {
    int k;
    std::vector<std::string> by_power;
};

inline const std::vector<CoefficientRow>& table1()
{
    static const std::vector<CoefficientRow> rows{
        {0, {"1"}},
        {1, {"0", "2"}},
        {2, {"-1/2", "0", "6"}},
        {3, {"0", "-4", "0", "20"}},
        {4, {"3/8", "0", "-45/2", "0", "70"}},
        {5, {"0", "23/4", "0", "-112", "0", "252"}},
        {6, {"-5/16", "0", "301/6", "0", "-525", "0", "924"}},
        {7, {"0", "-22/3", "0", "345", "0", "-2376", "0", "3432"}},
        {8, {"35/128", "0", "-1425/16", "0", "16665/8", "0", "-21021/2", "0", "12870"}},
        {9, {"0", "563/64", "0", "-1595/2", "0", "139139/12", "0", "-45760", "0", "48620"}},
        {10, {"-63/256", "0", "133529/960", "0", "-287287/48", "0", "61061", "0", "-196911", "0", "184756"}},
    };
    return rows;
}

struct TriplePointRow {
    double theta_over_pi;
    double re_P, im_P, Q;
    /// Coordinates printed with 6 significant figures are compared relatively.
    bool relative;
};

inline constexpr std::array<TriplePointRow, 10> kTable2{{
    {0.00, 1.0, 0.0, 1.0, false},
    {0.05, 0.96385, 0.08606, 0.83360, false},
    {0.10, 0.93778, 0.18745, 0.70952, false},
    {0.20, 0.93437, 0.53249, 0.48057, false},
    {0.25, 0.97678, 0.84047, 0.37449, false},
    {0.30, 1.08553, 1.38238, 0.27561, false},
    {0.35, 1.36479, 2.60425, 0.18575, false},
    {0.40, 2.36238, 7.23955, 0.10710, false},
    {0.42, 3.72266, 14.4826, 0.07942, false},
    {0.45, 16.4886, 104.102, 0.04275, true},
}};

struct ErrorRow {
    double q_re, q_im;
    double theta_over_pi;
    double rel_err_H;
    std::string_view endpoint;  // "inf", "+i", "-i" or "+-i"
};

inline constexpr std::array<ErrorRow, 12> kTable3{{
    {0.60, 0.00, 0.00, 7.764e-9, "inf"},
    {1.00, 0.00, 0.00, 1.041e-4, "+-i"},
    {1.25, 0.00, 0.00, 8.835e-4, "+-i"},
    {0.60, 0.40, 0.00, 2.355e-6, "inf"},
    {1.00, 0.60, 0.00, 2.783e-4, "+i"},
    {1.00, -0.30, 0.00, 7.342e-5, "-i"},
    {0.60, 0.00, 0.10, 9.556e-9, "inf"},
    {1.00, 0.00, 0.10, 2.751e-5, "-i"},
    {1.25, 0.00, 0.10, 4.830e-4, "-i"},
    {0.60, 0.40, 0.10, 3.280e-6, "inf"},
    {1.00, 0.60, 0.10, 4.136e-3, "+i"},
    {1.00, -0.30, 0.10, 5.000e-5, "-i"},
}};

inline constexpr double kTable3Modulus = 40.0;

}  // namespace struve::cli::reference
