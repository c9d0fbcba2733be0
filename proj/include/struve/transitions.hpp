#pragma once

// Stokes geometry in the q-plane: the curves on which the steepest-descent
// path from the origin runs into a saddle, their common point P and the
// crossing Q of the lower curve with the positive real axis.

#include <array>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "struve/landscape.hpp"

namespace struve::transitions {

using landscape::cplx;
using landscape::PhasePoint;
using landscape::Saddle;

/// The three transition curves leaving P, named by the domains they
/// separate (1: path to infinity, 2: path to +i, 3: path to -i).
enum class Branch {
    Upper,   // 1 | 2
    Middle,  // 2 | 3; the segment [1, inf) when theta = 0
    Lower,   // 1 | 3
};

std::string_view to_string(Branch b);
std::optional<Branch> parse_branch(std::string_view text);
/// The pair of endpoint labels found on either side of the curve.
std::array<landscape::DomainLabel, 2> separated_domains(Branch b);

/// A saddle followed continuously in q, together with the value of
/// log(1+u^2) on the sheet reached by the path from the origin.
struct TrackedSaddle {
    PhasePoint point;
    cplx q;
    double theta{};

    /// tau at the saddle; its imaginary part is the connection residual.
    cplx tau() const;
    /// d tau(saddle)/dq; the u-derivative vanishes at a saddle.
    cplx tau_dq() const;
    double residual() const { return tau().imag(); }
    /// Follows the saddle to a new q in small steps.
    TrackedSaddle moved_to(cplx q_new) const;
};

/// Saddle `which` at q with the sheet given by straight-line continuation
/// from the origin.
TrackedSaddle principal_saddle(cplx q, double theta, Saddle which);

struct TriplePoint {
    double theta{};
    cplx q_P;
    std::array<TrackedSaddle, 2> saddles;
};

struct InterceptQ {
    double theta{};
    double q_Q{};
};

struct TransitionCurve {
    Branch branch{};
    double theta{};
    std::vector<cplx> samples;
    /// The saddle the path runs into, per sample.
    std::vector<TrackedSaddle> saddles;
};

/// Im tau(saddle), with the sheet inherited from the traced origin path at
/// its closest approach to that saddle.
double connection_residual(cplx q, double theta, Saddle which, const landscape::TraceOptions& opts = {});

/// beta at which classify_endpoint(alpha + i beta, theta) changes across
/// [lo, hi]. Throws BracketInvalid when both ends carry the same label.
double critical_beta(double alpha, double theta, double lo, double hi);

/// Throws NoConvergence if the solve or its tracing check fails.
TriplePoint triple_point(double theta);

/// Throws BracketInvalid when no flip is found on (0, 1000].
InterceptQ intercept_Q(double theta);

/// Samples from P along one branch, spaced by about `step`, until the arc
/// length reaches `arc_length`.
TransitionCurve trace_transition_curve(double theta, Branch branch, double arc_length, double step);

/// Real-axis crossing of a traced curve, refined on the residual; empty if
/// the samples never change the sign of Im q.
std::optional<double> real_axis_crossing(const TransitionCurve& curve);

/// CSV rows re_q,im_q,branch,theta.
void export_curve_csv(const TransitionCurve& curve, std::ostream& os, bool header = true);

}  // namespace struve::transitions
