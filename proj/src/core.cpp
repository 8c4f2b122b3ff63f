#include "sfl/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace sfl {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::NonHermitian: return "NonHermitian";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::InvalidInput: return "InvalidInput";
        case Errc::ResolventSingular: return "ResolventSingular";
        case Errc::ThresholdTooClose: return "ThresholdTooClose";
        case Errc::NoRegularBasePoint: return "NoRegularBasePoint";
        case Errc::IllConditionedEigenproblem: return "IllConditionedEigenproblem";
        case Errc::ResonantEndpoint: return "ResonantEndpoint";
        case Errc::GroupLeak: return "GroupLeak";
        case Errc::ContourCrossesPole: return "ContourCrossesPole";
        case Errc::QuadratureNotConverged: return "QuadratureNotConverged";
        case Errc::RankAmbiguous: return "RankAmbiguous";
        case Errc::SDependence: return "SDependence";
        case Errc::NotAResonanceVector: return "NotAResonanceVector";
        case Errc::CriterionMismatch: return "CriterionMismatch";
        case Errc::Unstable: return "Unstable";
        case Errc::SignatureAmbiguous: return "SignatureAmbiguous";
        case Errc::TrackingAmbiguous: return "TrackingAmbiguous";
        case Errc::GroupCollision: return "GroupCollision";
        case Errc::CycleJordanMismatch: return "CycleJordanMismatch";
        case Errc::SignDisagreement: return "SignDisagreement";
        case Errc::ExponentMismatch: return "ExponentMismatch";
        case Errc::NoConvergence: return "NoConvergence";
        case Errc::BranchEntanglement: return "BranchEntanglement";
        case Errc::OrderAmbiguous: return "OrderAmbiguous";
        case Errc::DerivativeNoise: return "DerivativeNoise";
        case Errc::BMatrixSingular: return "BMatrixSingular";
        case Errc::RootBracketFail: return "RootBracketFail";
        case Errc::TangencyMismatch: return "TangencyMismatch";
        case Errc::ResonantVertex: return "ResonantVertex";
        case Errc::DNotHermitian: return "DNotHermitian";
        case Errc::GenerationFailed: return "GenerationFailed";
    }
    return "Unknown";
}

HermitianMatrix::HermitianMatrix(Mat m, double herm_tol) {
    if (m.rows() != m.cols() || m.rows() == 0)
        fail(Errc::InvalidInput, "matrix must be square and non-empty");
    const double dev = (m - m.adjoint()).norm();
    if (dev > herm_tol * std::max(1.0, m.norm()))
        fail(Errc::NonHermitian, "deviation " + std::to_string(dev));
    m_ = 0.5 * (m + m.adjoint().eval());
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
    if (dim() != o.dim()) fail(Errc::DimensionMismatch, "operator+");
    HermitianMatrix r;
    r.m_ = m_ + o.m_;
    return r;
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
    if (dim() != o.dim()) fail(Errc::DimensionMismatch, "operator-");
    HermitianMatrix r;
    r.m_ = m_ - o.m_;
    return r;
}

HermitianMatrix HermitianMatrix::scaled(double a) const {
    HermitianMatrix r;
    r.m_ = a * m_;
    return r;
}

Triple::Triple(double lam, HermitianMatrix h, Direction v) : lambda(lam), H(std::move(h)), V(std::move(v)) {
    if (H.dim() != V.dim()) fail(Errc::DimensionMismatch, "triple H/V dims");
    if (!std::isfinite(lambda)) fail(Errc::InvalidInput, "lambda must be finite");
}

OperatorPath::OperatorPath(std::vector<HermitianMatrix> vs) : vertices(std::move(vs)) {
    if (vertices.size() < 2) fail(Errc::InvalidInput, "path needs at least 2 vertices");
    for (const auto& v : vertices)
        if (v.dim() != vertices.front().dim()) fail(Errc::DimensionMismatch, "path vertex dims");
}

OperatorPath OperatorPath::reversed() const {
    std::vector<HermitianMatrix> vs(vertices.rbegin(), vertices.rend());
    return OperatorPath(std::move(vs));
}

Spectrum eigh(const Mat& hermitian, const Config& cfg) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian);
    if (es.info() != Eigen::Success) fail(Errc::IllConditionedEigenproblem, "eigh failed to converge");
    Spectrum sp;
    sp.eigenvalues = es.eigenvalues();
    sp.eigenvectors = es.eigenvectors();
    // phase convention: largest-magnitude component of each column real positive
    for (int j = 0; j < sp.eigenvectors.cols(); ++j) {
        int imax = 0;
        double best = -1.0;
        for (int i = 0; i < sp.eigenvectors.rows(); ++i) {
            const double a = std::abs(sp.eigenvectors(i, j));
            if (a > best * (1.0 + 1e-14)) {
                best = a;
                imax = i;
            }
        }
        const cplx pivot = sp.eigenvectors(imax, j);
        if (std::abs(pivot) > 0) sp.eigenvectors.col(j) *= std::conj(pivot) / std::abs(pivot);
    }
    const double hn = hermitian.norm();
    const double resid = (hermitian * sp.eigenvectors -
                          sp.eigenvectors * sp.eigenvalues.asDiagonal().toDenseMatrix().cast<cplx>())
                             .norm();
    if (resid > cfg.eig_tol * std::max(1.0, hn))
        fail(Errc::IllConditionedEigenproblem, "eigh residual " + std::to_string(resid));
    return sp;
}

Spectrum eigh(const HermitianMatrix& h, const Config& cfg) { return eigh(h.mat(), cfg); }

Mat guarded_solve(const Mat& m, const Mat& rhs, const Config& cfg, const char* what) {
    Eigen::ColPivHouseholderQR<Mat> qr(m);
    const auto& r = qr.matrixR();
    const int n = static_cast<int>(m.rows());
    double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double d = std::abs(r(i, i));
        rmax = std::max(rmax, d);
        rmin = std::min(rmin, d);
    }
    if (!(rmin > 0.0) || rmax / rmin > cfg.cond_max)
        fail(Errc::ResolventSingular, std::string(what) + " cond ~ " +
                                          std::to_string(rmin > 0 ? rmax / rmin : std::numeric_limits<double>::infinity()));
    return qr.solve(rhs);
}

Mat a_operator(const Triple& t, cplx z, cplx s, const Config& cfg) {
    Mat m = t.h_at(s);
    m.diagonal().array() -= z;
    return guarded_solve(m, t.V.mat(), cfg, "a_operator");
}

Mat b_operator(const Triple& t, cplx z, cplx s, const Config& cfg) {
    Mat m = t.h_at(s);
    m.diagonal().array() -= z;
    // V (M)^{-1} = (M^-* V^*)^* = (M^-* V)^* since V is Hermitian
    Mat x = guarded_solve(m.adjoint(), t.V.mat(), cfg, "b_operator");
    return x.adjoint();
}

int counting_above(const HermitianMatrix& h, double lambda, const Config& cfg) {
    Spectrum sp = eigh(h, cfg);
    const double margin = cfg.gap_tol * std::max(1.0, h.norm());
    int above = 0;
    for (int i = 0; i < sp.eigenvalues.size(); ++i) {
        const double d = sp.eigenvalues[i] - lambda;
        if (std::abs(d) <= margin)
            fail(Errc::ThresholdTooClose, "eigenvalue within gap_tol of lambda");
        if (d > 0) ++above;
    }
    return above;
}

namespace {

int count_above(const RVec& sv, double thr, double* gap) {
    int rank = 0;
    while (rank < sv.size() && sv[rank] > thr) ++rank;
    if (gap) {
        const double kept = rank > 0 ? sv[rank - 1] : std::numeric_limits<double>::infinity();
        const double dropped = rank < sv.size() ? sv[rank] : 0.0;
        *gap = dropped > 0 ? kept / dropped : std::numeric_limits<double>::infinity();
    }
    return rank;
}

} // namespace

int svd_rank(const Mat& m, double tol_rel, double* gap) {
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] <= 0.0) {
        if (gap) *gap = std::numeric_limits<double>::infinity();
        return 0;
    }
    return count_above(sv, tol_rel * sv[0], gap);
}

int svd_rank_abs(const Mat& m, double thr_abs, double* gap) {
    Eigen::JacobiSVD<Mat> svd(m);
    return count_above(svd.singularValues(), thr_abs, gap);
}

Mat range_basis(const Mat& m, double tol_rel) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double thr = (sv.size() > 0 && sv[0] > 0) ? tol_rel * sv[0] : 0.0;
    return svd.matrixU().leftCols(count_above(sv, thr, nullptr));
}

Mat range_basis_abs(const Mat& m, double thr_abs) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
    return svd.matrixU().leftCols(count_above(svd.singularValues(), thr_abs, nullptr));
}

Mat null_basis(const Mat& m, double tol_rel) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double thr = (sv.size() > 0 && sv[0] > 0) ? tol_rel * sv[0] : 0.0;
    return svd.matrixV().rightCols(m.cols() - count_above(sv, thr, nullptr));
}

Mat null_basis_abs(const Mat& m, double thr_abs) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    return svd.matrixV().rightCols(m.cols() - count_above(svd.singularValues(), thr_abs, nullptr));
}

double subspace_mismatch(const Mat& x, const Mat& y) {
    if (x.cols() == 0) return 0.0;
    if (y.cols() == 0) return 1.0;
    Mat resid = x - y * (y.adjoint() * x);
    Eigen::JacobiSVD<Mat> svd(resid);
    return svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
}

double dist_to_spectrum(const Mat& hermitian, double lambda) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian, Eigen::EigenvaluesOnly);
    return (es.eigenvalues().array() - lambda).abs().minCoeff();
}

} // namespace sfl
