#pragma once

#include <vector>

#include "sfl/blockgeom.hpp"
#include "sfl/core.hpp"
#include "sfl/locator.hpp"

namespace sfl {

struct RieszResiduals {
    double idem = 0.0;     // ||P^2 - P||
    double commute = 0.0;  // ||P A - A P||
    double nilp = 0.0;     // ||A^d||
    double reduce = 0.0;   // ||P A - A||
    double vp_qv = 0.0;    // ||V P - Q V||
    double trace_dev = 0.0; // |trace P - N|
};

// Contour calculus of one resonance point: idempotent P, nilpotent A,
// adjoint-side idempotent Q, and the holomorphic part Atilde at the pole.
struct RieszPair {
    cplx z{};
    cplx r{};
    Mat P, A, Q, Atilde;
    RieszResiduals res;
    int N = 0;       // rank(P) = algebraic multiplicity
    int order_d = 1; // smallest d with A^d = 0
    int nodes = 0;
    double radius = 0.0;
};

RieszPair riesz_pair(const Triple& t, cplx z, cplx r, const Config& cfg = {},
                     double radius_override = 0.0);

struct JordanProfile {
    int N = 0;
    int m = 0;
    std::vector<int> sizes;      // d_1 >= ... >= d_m
    std::vector<double> rank_gaps; // singular-value gap audit per rank decision
};

JordanProfile jordan_profile(const RieszPair& rp, const Config& cfg = {});

// Orthonormal basis of the order-k resonance space Upsilon^k, i.e. the null
// space of (1 + (r-s)A_z(s))^k; verified at two regular values of s.
Mat resonance_space(const Triple& t, cplx z, cplx r, int k, const Config& cfg = {});

// (order, depth) of a resonance vector chi.
std::pair<int, int> vector_order_depth(const Vec& chi, const RieszPair& rp, const Triple& t,
                                       const Config& cfg = {});

struct DepthOneReport {
    bool depth_at_least_one = false;
    double ortho_residual = 0.0; // ||proj_{V_lambda} V chi|| / ||V chi||
    double sa_residual = 0.0;    // ||A S chi + chi|| / ||chi||
};

// Both equivalent depth-1 tests (V chi orthogonal to the eigenspace, and
// A S chi = -chi); verdicts must agree.
DepthOneReport depth_one_criterion(const Vec& chi, const Triple& t, double r,
                                   const Config& cfg = {});

// Distance from r to the nearest other resonance point of the same z (used by
// the contour radius policy and the regular-s picks).
double pole_free_distance(const Triple& t, cplx z, cplx r, const Config& cfg = {});

// The radius policy: contour_radius_frac times the pole-free distance, capped.
double default_contour_radius(const Triple& t, cplx z, cplx r, const Config& cfg = {});

} // namespace sfl
