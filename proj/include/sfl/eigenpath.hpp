#pragma once

#include <vector>

#include "sfl/core.hpp"
#include "sfl/riesz.hpp"

namespace sfl {

struct GridSpec {
    double h = 4e-3;    // base step (scaled by the triple's size internally)
    int halfwidth = 12; // grid s_i = r + i*h, i in [-halfwidth, halfwidth]
};

// One tracked eigenvalue/eigenvector branch through (r, lambda).
struct EigenBranch {
    RVec s_grid;
    RVec lambda_of_s;
    Mat phi_of_s; // n x grid points, gauge: <phi(r), phi(s)> real positive
    int order = 1;
    std::vector<double> lam_derivs;     // lambda^(k)(r), k = 1..order
    std::vector<double> lam_deriv_errs; // Richardson error estimates
    std::vector<Vec> phi_derivs;        // phi^(j)(r), j = 0..order-1

    double lambda_at(double s) const; // cubic interpolation on the grid
};

// The m branches through lambda at s = r, disentangled inside the degenerate
// cluster by crossing-operator perturbation theory, with orders and
// derivative tables filled in.
std::vector<EigenBranch> eigen_branches(const Triple& t, double r, const GridSpec& grid,
                                        const Config& cfg = {});

// Recomputes the branch order from the derivative table and cross-validates
// <phi, V phi^(k-1)> = lambda^(k) <phi, phi> / k; returns d-tilde.
int branch_order(const EigenBranch& b, const Direction& V, const Config& cfg = {});

struct OrthogonalityReport {
    double max_cross = 0.0;  // <V phi_mu^(j), phi_nu^(k)>, mu != nu
    double max_within = 0.0; // within-branch entries above the skew diagonal
};

OrthogonalityReport orthogonality_suite(const std::vector<EigenBranch>& branches,
                                        const Direction& V, const Config& cfg = {});

struct JordanBasisReport {
    std::vector<Vec> vectors;      // phi_nu^(j)/j! in branch-major order
    double max_chain_residual = 0; // ||A phi^(j) - j phi^(j-1)|| relative
    double span_mismatch = 0;      // distance between span(vectors) and im(P)
};

JordanBasisReport jordan_basis(const std::vector<EigenBranch>& branches, const RieszPair& rp,
                               const Config& cfg = {});

struct PReconstruction {
    Mat P_rec;
    Mat b_matrix;          // b_{mu nu}^{kj} = <V phi_mu^(k), phi_nu^(j)>/(k! j!)
    double compare_norm = 0;   // ||P_rec - P_contour||
    double hankel_residual = 0; // block-Hankel zero-pattern defect, relative
};

PReconstruction reconstruct_P(const std::vector<EigenBranch>& branches, const Direction& V,
                              const Mat& P_contour, const Config& cfg = {});

} // namespace sfl
