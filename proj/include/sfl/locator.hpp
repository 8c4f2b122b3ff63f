#pragma once

#include <optional>
#include <vector>

#include "sfl/core.hpp"

namespace sfl {

// A coupling value r at which z is an eigenvalue of H + rV, with the
// multiplicities transferred from the eigenvalue (s - r)^{-1} of A_z(s).
struct ResonancePoint {
    cplx r{};
    cplx z{};
    int alg_mult = 1;  // N
    int geo_mult = 1;  // m
    int group_id = -1;
    bool resolved = true; // false when another point sits within 10*mult_gap
};

struct Window {
    cplx center{};
    double radius = 1.0;
    bool contains(cplx p, double slack = 0.0) const { return std::abs(p - center) <= radius + slack; }
};

// All resonance points of (z; H, V) inside the window, multiplicities from
// adaptive eigenvalue clustering of A_z(s0) at an auto-searched regular base
// point s0.
std::vector<ResonancePoint> resonance_points(const Triple& t, cplx z, const Window& window,
                                             const Config& cfg = {});

// Real resonance points r in (a, b) of the real threshold lambda, sorted
// ascending; endpoints must be non-resonant within gap_tol.
std::vector<ResonancePoint> real_resonance_points_on_segment(double lambda, const HermitianMatrix& H,
                                                             const Direction& V, double a, double b,
                                                             const Config& cfg = {});

// The perturbed points within `radius` of r_parent for spectral parameter z;
// total algebraic multiplicity must equal parent_N (GroupLeak otherwise).
std::vector<ResonancePoint> group_members(const Triple& t, cplx r_parent, int parent_N, cplx z,
                                          double radius, const Config& cfg = {});

// Half the distance from r to the nearest other resonance point of the same
// z, capped at cfg.group_radius_cap.
double default_group_radius(const Triple& t, double lambda, cplx r, const Config& cfg = {});

// The real resonance point nearest to r_hint (within a small window).
ResonancePoint locate_at(const Triple& t, double r_hint, const Config& cfg = {});

// Shared clustering helper (exposed for tests): merges values into clusters
// using the defective-eigenvalue threshold max(mult_gap, cluster_eps^(1/k))
// relative to scale, where k is the size of the tentative merged cluster.
std::vector<std::vector<int>> cluster_values(const std::vector<cplx>& vals, double scale,
                                             bool defective_ok, const Config& cfg = {});

} // namespace sfl
