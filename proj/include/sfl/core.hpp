#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "sfl/config.hpp"
#include "sfl/error.hpp"

namespace sfl {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// A validated finite-dimensional self-adjoint operator. Construction checks
// ||M - M*||_F <= herm_tol * max(1, ||M||_F) and symmetrizes the stored copy
// so downstream algebra starts from an exactly Hermitian matrix.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(Mat m, double herm_tol = 1e-12);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Mat& mat() const { return m_; }
    double norm() const { return m_.norm(); }

    HermitianMatrix operator+(const HermitianMatrix& o) const;
    HermitianMatrix operator-(const HermitianMatrix& o) const;
    HermitianMatrix scaled(double a) const;

private:
    Mat m_;
};

// Directions (the paper's V, W) share the representation of points.
using Direction = HermitianMatrix;

// The triple (lambda; H, V): threshold, base operator, perturbation direction.
struct Triple {
    double lambda = 0.0;
    HermitianMatrix H;
    Direction V;

    Triple() = default;
    Triple(double lam, HermitianMatrix h, Direction v);

    int dim() const { return H.dim(); }
    // H + s V as a dense complex matrix (s may be complex).
    Mat h_at(cplx s) const { return H.mat() + s * V.mat(); }
    double scale() const { return 1.0 + H.norm() + V.norm(); }
};

// Piecewise-linear operator path given by its vertices; segment j has
// direction V_j = vertices[j+1] - vertices[j].
struct OperatorPath {
    std::vector<HermitianMatrix> vertices;

    explicit OperatorPath(std::vector<HermitianMatrix> vs);
    int dim() const { return vertices.front().dim(); }
    int segments() const { return static_cast<int>(vertices.size()) - 1; }
    OperatorPath reversed() const;
};

struct Spectrum {
    RVec eigenvalues;  // ascending
    Mat eigenvectors;  // orthonormal columns, deterministic phase
};

// Full Hermitian eigendecomposition with a fixed ordering and phase
// convention (largest-magnitude component of each column made real positive).
Spectrum eigh(const HermitianMatrix& h, const Config& cfg = {});
Spectrum eigh(const Mat& hermitian, const Config& cfg = {});

// A_z(s) = (H + sV - z)^{-1} V and B_z(s) = V (H + sV - z)^{-1}.
Mat a_operator(const Triple& t, cplx z, cplx s, const Config& cfg = {});
Mat b_operator(const Triple& t, cplx z, cplx s, const Config& cfg = {});

// Number of eigenvalues of H strictly above lambda; requires a gap_tol margin.
int counting_above(const HermitianMatrix& h, double lambda, const Config& cfg = {});

// --- shared dense linear-algebra helpers ---

// Solves (M) X = B with a column-pivoted factorization; throws
// ResolventSingular when the condition estimate exceeds cfg.cond_max.
Mat guarded_solve(const Mat& m, const Mat& rhs, const Config& cfg, const char* what);

// Rank by singular-value thresholding at tol_rel * sigma_max. `gap` receives
// the ratio audit: smallest kept / largest dropped singular value.
int svd_rank(const Mat& m, double tol_rel, double* gap = nullptr);

// Rank with an absolute threshold; required whenever M itself may be a
// numerically-zero matrix (powers of nilpotents), where a relative threshold
// would resurrect roundoff as rank.
int svd_rank_abs(const Mat& m, double thr_abs, double* gap = nullptr);

// Orthonormal basis of the range of M at the given relative rank threshold.
Mat range_basis(const Mat& m, double tol_rel);
Mat range_basis_abs(const Mat& m, double thr_abs);

// Orthonormal basis of the null space of M (right singular vectors).
Mat null_basis(const Mat& m, double tol_rel);
Mat null_basis_abs(const Mat& m, double thr_abs);

// Largest principal angle sine between span(X) and span(Y) (orthonormal cols):
// max over unit x in span(X) of distance(x, span(Y)).
double subspace_mismatch(const Mat& x, const Mat& y);

double dist_to_spectrum(const Mat& hermitian, double lambda);

} // namespace sfl
