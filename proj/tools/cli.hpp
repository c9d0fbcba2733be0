#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace struve::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitCheckFailed = 2,
    kExitComputation = 3,
};

/// Environment variable holding the default working precision in decimal
/// digits for the multiprecision oracle.
inline constexpr const char* kDigitsEnv = "STRUVE_DIGITS";

/// "a", "a+bi", "a-bi", "bi"; no whitespace anywhere.
std::optional<std::complex<double>> parse_complex(std::string_view text);

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace struve::cli
