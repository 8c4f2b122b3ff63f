#pragma once

#include <vector>

#include "sfl/core.hpp"
#include "sfl/eigenpath.hpp"
#include "sfl/locator.hpp"
#include "sfl/riesz.hpp"

namespace sfl {

// Positions of the N group points along z(theta) = lambda + rho e^{i theta},
// tracked by nearest-neighbour continuation with adaptive theta refinement.
struct MonodromyTrace {
    double rho = 0.0;
    cplx r_parent{};
    int parent_N = 0;
    std::vector<double> theta;                // visited angles, increasing, 0..2pi
    std::vector<std::vector<cplx>> positions; // positions[j][track]
    std::vector<int> permutation;             // track i ends at start slot permutation[i]

    // positions of all tracks at the visited angle closest to th
    const std::vector<cplx>& at_angle(double th) const;
};

MonodromyTrace track_group(const Triple& t, const ResonancePoint& parent, double rho,
                           const Config& cfg = {});

struct Cycle {
    std::vector<int> members; // track indices, cycle order
    int length = 0;
    int sign = 0;             // filled by cycle_sign
    double puiseux_leading = 0.0;
    double fit_slope = 0.0;
    double fit_residual = 0.0;
    int b_parity = 0;         // d_nu mod 2
};

// Disjoint cycles of the monodromy permutation; the multiset of lengths must
// equal the Jordan block sizes.
std::vector<Cycle> cycle_decomposition(const MonodromyTrace& trace, const JordanProfile& jp);

// Sign of a cycle via two routes that must agree: Im of the real branch under
// a z-shift, and the sign of the leading eigenvalue derivative of the matched
// eigenpath.
int cycle_sign(const Triple& t, const ResonancePoint& parent, const MonodromyTrace& trace,
               const Cycle& cycle, const std::vector<EigenBranch>& branches,
               const Config& cfg = {});

// Leading Puiseux data |r_{1/d}| from a log-log fit over a rho sweep; the
// slope must equal 1/d within cfg.puiseux_slope_tol. Fills the cycle fields.
void puiseux_leading(const Triple& t, const ResonancePoint& parent, const MonodromyTrace& trace,
                     Cycle& cycle, const Config& cfg = {});

struct CycleProjection {
    Mat P_nu;
    std::vector<Mat> member_P; // Riesz idempotents of the members at z_final
    std::vector<cplx> member_r;
    std::vector<Mat> member_P_prev; // previous level, for Richardson in z
    std::vector<cplx> member_r_prev;
    cplx z_final{};
    double idem = 0.0;
    double commute_A = 0.0; // ||P_nu A - A P_nu||
    double cauchy_last = 0.0;
};

// P^{[nu]} = lim_{z->lambda} sum_{j in cycle} P_z(r_j(z)) along a halving
// radial schedule, with Cauchy-convergence control.
CycleProjection cycle_projection(const Triple& t, const ResonancePoint& parent,
                                 const MonodromyTrace& trace, const Cycle& cycle, const Mat& A,
                                 const Config& cfg = {});

// || sum_j (r_j - r_parent)^k P_z(r_j) - P_nu A^k || at the converged z.
double moment_limit_check(const CycleProjection& cp, const ResonancePoint& parent, const Mat& A,
                          int k);

// Full pipeline sum of b_nu * sign(nu) over the cycles at a real point.
int intersection_number(const Triple& t, const ResonancePoint& parent, const Config& cfg = {});

// CSV rows "theta,re_0,im_0,re_1,im_1,..." for plotting the tracked points.
std::string trace_to_csv(const MonodromyTrace& trace);

} // namespace sfl
