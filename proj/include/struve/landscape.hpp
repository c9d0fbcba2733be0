#pragma once

// Phase function tau(u) = e^{i theta} (u - q log(1+u^2)) on the sheeted
// u-plane and the steepest-descent path Im tau = 0 leaving the origin.

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace struve::landscape {

using cplx = std::complex<double>;

struct Parameters {
    cplx q;          // nu / z
    double theta{};  // arg z

    double omega() const { return std::arg(q); }
    /// q e^{i theta}; its real part is Re(nu)/|z|.
    cplx rotated_q() const { return q * std::polar(1.0, theta); }
    /// |theta| < pi/2 and |omega + theta| <= pi/2.
    bool admissible() const;
};

/// A point on the sheeted u-plane. `logval` is a continuously tracked value
/// of log(1+u^2), not necessarily the principal one.
struct PhasePoint {
    cplx u;
    cplx logval;

    static PhasePoint principal(cplx u);
    /// Integer k with logval = Log(1+u^2) + 2 pi i k.
    int sheet() const;
};

struct SaddlePair {
    cplx u_plus;   // S1, the distal saddle
    cplx u_minus;  // S2
    bool is_double{};
};

enum class DomainLabel { ToInfinity, ToPlusI, ToMinusI, OnTransition };

std::string_view to_string(DomainLabel label);
std::optional<DomainLabel> parse_label(std::string_view text);

enum class Saddle { S1, S2 };

struct TraceOptions {
    double start_offset = 1e-8;
    double r_max = 1e4;
    double eps_branch = 1e-6;
    double saddle_tol = 1e-9;
    double rel_tol = 1e-10;
    std::size_t max_steps = 200000;
    int winding_cap = 8;
    /// When false the trace runs past near-saddle passages (it still stops
    /// if it stalls on a saddle).
    bool stop_at_saddle = true;
};

/// Closest approach of a traced path to one saddle.
struct SaddleApproach {
    cplx saddle;
    double distance = 0;
    PhasePoint at;
    std::size_t index = 0;
};

struct PathTrace {
    std::vector<PhasePoint> points;
    std::vector<cplx> tau_values;
    DomainLabel terminal = DomainLabel::OnTransition;
    int sheet_winding = 0;
    /// Indexed by Saddle (S1, S2).
    std::array<SaddleApproach, 2> approach{};
};

/// 1 + u^2 evaluated as (u-i)(u+i).
cplx one_plus_u2(cplx u);

cplx phase(const PhasePoint& p, const Parameters& params);
/// Throws BranchPointError at u = +-i.
cplx phase_derivative(const PhasePoint& p, const Parameters& params);
cplx phase_derivative(cplx u, const Parameters& params);

SaddlePair saddle_points(cplx q);
inline cplx saddle(const SaddlePair& s, Saddle which) { return which == Saddle::S1 ? s.u_plus : s.u_minus; }

/// Moves `from` to `to` along the straight segment, carrying logval by
/// continuity. Throws ContinuationAmbiguous if the segment meets +-i.
PhasePoint continue_to(const PhasePoint& from, cplx to);

/// Im tau(saddle) with the sheet inherited from the given path point.
double saddle_residual(const PhasePoint& near, cplx saddle_u, const Parameters& params);

PathTrace trace_steepest(const Parameters& params, const TraceOptions& opts = {});
DomainLabel classify_endpoint(const Parameters& params, const TraceOptions& opts = {});

/// Rows (re_u, im_u, re_tau, winding) in path order.
void export_path_csv(const PathTrace& trace, std::ostream& os);
void export_path_json(const PathTrace& trace, std::ostream& os);

struct PathRow {
    double re_u, im_u, re_tau;
    int winding;
};
std::vector<PathRow> path_rows(const PathTrace& trace);
std::vector<PathRow> read_path_csv(std::istream& is);

}  // namespace struve::landscape
