#pragma once

#include <map>
#include <string>
#include <vector>

#include "sfl/core.hpp"

namespace sfl {

// Orthogonal split H = V_lambda^perp (+) V_lambda at a resonance point, with
// the compressed blocks of H_r and V. U0 spans the complement, U1 spans the
// eigenspace; alpha = U1* V U1 is the crossing operator.
struct BlockDecomposition {
    double lambda = 0.0;
    double r = 0.0;
    Mat U0, U1;
    Mat Hhat, Vhat, v, alpha; // v maps V_lambda -> complement, alpha is m x m

    int dim() const { return static_cast<int>(U0.rows()); }
    int m() const { return static_cast<int>(U1.cols()); }

    Mat p_hat() const { return U0 * U0.adjoint(); }
    Mat p_eig() const { return U1 * U1.adjoint(); }
    // R_lambda(Hhat) extended by zero on the eigenspace.
    Mat sliced_resolvent() const;
    // S_lambda = R_lambda(Hhat) V on the full space.
    Mat s_operator(const Triple& t) const;
    // hat A_lambda(r) = R_lambda(Hhat) Vhat on the full space.
    Mat a_hat() const;
    // D_lambda(s) = ((s-r) alpha - (s-r)^2 v* R_lambda(Hhat_s) v)^{-1}, m x m.
    Mat d_of_s(cplx s, const Config& cfg = {}) const;
};

BlockDecomposition block_split(const Triple& t, double r, const Config& cfg = {});

// Laurent data of D_lambda(s) at the pole r of order d: coefficients
// D_{d-1}, ..., D_0, D_{-1} and the products Y_j = R v D_j v*.
struct LaurentData {
    int d = 1;
    std::vector<Mat> D;          // D[j+1] holds D_j for j = -1 .. d-1
    std::vector<Mat> Y;          // Y[j] holds Y_j for j = 0 .. d-1 (full space)
    double herm_residual = 0.0;  // max_j ||D_j - D_j*||
    double block_residual = 0.0; // D(s) vs the (2,2) block of the resolvent at a sample s
    std::vector<double> chain_residuals; // Lemma chain D_j alpha = sum_i +- D_{j+i} T_{i-1}

    const Mat& coeff(int j) const { return D.at(static_cast<size_t>(j + 1)); }
};

LaurentData laurent_D(const Triple& t, const BlockDecomposition& bd, int d, double contour_radius,
                      const Config& cfg = {});

// Residuals of the S-nilpotent identities; P, A, Atilde come from the contour
// calculus. Keys name each identity, values are operator-norm residuals.
std::map<std::string, double> identity_S_A(const Triple& t, const BlockDecomposition& bd,
                                           const Mat& P, const Mat& A, const Mat& Atilde,
                                           const LaurentData& ld, const Config& cfg = {});

struct PropertyAB {
    bool B = false;
    bool A = false;
    double b_residual = 0.0;   // ||alpha A_lambda|| relative
    double a_mismatch = 0.0;   // max principal-angle defect over j
};

PropertyAB property_AB(const BlockDecomposition& bd, const Mat& P, const Mat& A, int d,
                       const Config& cfg = {});

// Containment of the order-k resonance vectors lying in the complement inside
// span{Ahat^j R v : j <= k-2}; upsilon_k is an orthonormal basis of the order-k
// space. Returns the worst relative distance (0 when vacuous).
double order_k_span_check(const BlockDecomposition& bd, const Mat& upsilon_k, int k,
                          const Config& cfg = {});

struct CurveSample {
    double s;
    double t;
};

// The resonance curve gamma_chi in the (V, W)-plane, W = <chi,.> chi: for each
// s the unique t near 0 with lambda in spec(H_r + sV + tW).
std::vector<CurveSample> trace_resonance_curve(const Triple& t, double r, const Vec& chi,
                                               const std::vector<double>& s_values, int order_hint,
                                               const Config& cfg = {});

// Order of vanishing of t(s) at s = 0 by log-log slope; must equal the
// direction order d (TangencyMismatch otherwise).
int tangency_order(const std::vector<CurveSample>& samples, int direction_order,
                   const Config& cfg = {});

} // namespace sfl
