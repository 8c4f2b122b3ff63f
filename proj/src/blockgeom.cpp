#include "sfl/blockgeom.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>

namespace sfl {

namespace {

// (1/2pi i) contour integrals of an m x m matrix function around `center`,
// weights (s-center)^p for p in [pmin, pmax]. Trapezoid on the circle.
std::vector<Mat> circle_moments(const std::function<Mat(cplx)>& f, cplx center, double radius,
                                int nodes, int pmin, int pmax) {
    const int nmom = pmax - pmin + 1;
    std::vector<Mat> acc(nmom);
    for (int k = 0; k < nodes; ++k) {
        const double th = 2.0 * M_PI * k / nodes;
        const cplx ph(std::cos(th), std::sin(th));
        const Mat fs = f(center + radius * ph);
        for (int p = pmin; p <= pmax; ++p) {
            const cplx w = std::pow(radius, p + 1) * std::pow(ph, p + 1) / static_cast<double>(nodes);
            if (acc[p - pmin].size() == 0)
                acc[p - pmin] = w * fs;
            else
                acc[p - pmin] += w * fs;
        }
    }
    return acc;
}

} // namespace

Mat BlockDecomposition::sliced_resolvent() const {
    const int nh = static_cast<int>(U0.cols());
    if (nh == 0) return Mat::Zero(dim(), dim());
    Mat rh = Hhat - lambda * Mat::Identity(nh, nh);
    Mat inv = rh.colPivHouseholderQr().solve(Mat::Identity(nh, nh));
    return U0 * inv * U0.adjoint();
}

Mat BlockDecomposition::s_operator(const Triple& t) const { return sliced_resolvent() * t.V.mat(); }

Mat BlockDecomposition::a_hat() const { return sliced_resolvent() * (U0 * Vhat * U0.adjoint()); }

Mat BlockDecomposition::d_of_s(cplx s, const Config& cfg) const {
    const int nh = static_cast<int>(U0.cols());
    const cplx ds = s - r;
    Mat core = ds * alpha;
    if (nh > 0) {
        Mat hs = Hhat + ds * Vhat - lambda * Mat::Identity(nh, nh);
        Mat rv = guarded_solve(hs, v, cfg, "d_of_s");
        core -= ds * ds * (v.adjoint() * rv);
    }
    return guarded_solve(core, Mat::Identity(m(), m()), cfg, "d_of_s inverse");
}

BlockDecomposition block_split(const Triple& t, double r, const Config& cfg) {
    Spectrum sp = eigh(Mat(t.h_at(r)), cfg);
    const int n = t.dim();
    const double thr = 100.0 * cfg.mult_gap * t.scale();
    std::vector<int> eig_idx, hat_idx;
    for (int i = 0; i < n; ++i) {
        if (std::abs(sp.eigenvalues[i] - t.lambda) <= thr)
            eig_idx.push_back(i);
        else
            hat_idx.push_back(i);
    }
    if (eig_idx.empty()) fail(Errc::InvalidInput, "lambda is not an eigenvalue of H + rV");

    BlockDecomposition bd;
    bd.lambda = t.lambda;
    bd.r = r;
    bd.U1.resize(n, static_cast<int>(eig_idx.size()));
    bd.U0.resize(n, static_cast<int>(hat_idx.size()));
    for (size_t j = 0; j < eig_idx.size(); ++j) bd.U1.col(j) = sp.eigenvectors.col(eig_idx[j]);
    for (size_t j = 0; j < hat_idx.size(); ++j) bd.U0.col(j) = sp.eigenvectors.col(hat_idx[j]);
    const Mat& V = t.V.mat();
    bd.Hhat = bd.U0.adjoint() * t.h_at(r) * bd.U0;
    bd.Vhat = bd.U0.adjoint() * V * bd.U0;
    bd.v = bd.U0.adjoint() * V * bd.U1;
    bd.alpha = bd.U1.adjoint() * V * bd.U1;
    return bd;
}

LaurentData laurent_D(const Triple& t, const BlockDecomposition& bd, int d, double contour_radius,
                      const Config& cfg) {
    LaurentData ld;
    ld.d = d;
    auto f = [&](cplx s) { return bd.d_of_s(s, cfg); };

    int nodes = cfg.contour_nodes;
    std::vector<Mat> mom = circle_moments(f, bd.r, contour_radius, nodes, -1, d - 1);
    while (nodes < cfg.max_nodes) {
        std::vector<Mat> next = circle_moments(f, bd.r, contour_radius, 2 * nodes, -1, d - 1);
        double change = 0.0, scale = 0.0;
        for (size_t i = 0; i < mom.size(); ++i) {
            change += (next[i] - mom[i]).norm();
            scale += next[i].norm();
        }
        mom = std::move(next);
        nodes *= 2;
        if (change <= cfg.riesz_tol * std::max(1.0, scale)) break;
    }
    ld.D = std::move(mom);

    for (int j = -1; j <= d - 1; ++j) {
        const Mat& dj = ld.coeff(j);
        ld.herm_residual = std::max(ld.herm_residual, (dj - dj.adjoint()).norm());
    }
    if (ld.herm_residual > 1e3 * cfg.riesz_tol * (1.0 + t.scale()))
        fail(Errc::DNotHermitian, "Laurent coefficient deviates from self-adjointness by " +
                                      std::to_string(ld.herm_residual));

    // D(s) must equal the eigenspace-block of the full resolvent (relative:
    // both sides blow up like 1/dist near the pole)
    {
        const cplx s_chk = bd.r + contour_radius * cplx(0.34, 0.77);
        Mat full = t.h_at(s_chk);
        full.diagonal().array() -= t.lambda;
        Mat rz = guarded_solve(full, Mat::Identity(t.dim(), t.dim()), cfg, "laurent block check");
        const Mat dss = bd.d_of_s(s_chk, cfg);
        ld.block_residual = (bd.U1.adjoint() * rz * bd.U1 - dss).norm() / std::max(1.0, dss.norm());
    }

    Mat rfull = bd.sliced_resolvent();
    Mat rv_hat = (bd.U0.adjoint() * rfull * bd.U0) * bd.v; // R v in hat coordinates
    for (int j = 0; j <= d - 1; ++j)
        ld.Y.push_back(bd.U0 * (rv_hat * ld.coeff(j) * bd.v.adjoint()) * bd.U0.adjoint());

    // chain from the Laurent expansion of 1 = (s-r) D(s) (alpha + (r-s) v* R_s v):
    // D_j alpha = sum_{i>=1} (-1)^{i+1} D_{j+i} T_{i-1} + delta_{j0},
    // with T_k = v* Ahat^k R v.
    const Mat ahat_blk = (bd.Hhat - bd.lambda * Mat::Identity(bd.Hhat.rows(), bd.Hhat.cols()))
                             .colPivHouseholderQr()
                             .solve(bd.Vhat);
    std::vector<Mat> T;
    {
        Mat cur = rv_hat;
        for (int k = 0; k <= d; ++k) {
            T.push_back(bd.v.adjoint() * cur);
            cur = ahat_blk * cur;
        }
    }
    for (int j = d - 1; j >= -1; --j) {
        Mat rhs = Mat::Zero(bd.m(), bd.m());
        for (int i = 1; j + i <= d - 1; ++i)
            rhs += ((i % 2 == 1) ? 1.0 : -1.0) * ld.coeff(j + i) * T[i - 1];
        if (j == 0) rhs += Mat::Identity(bd.m(), bd.m());
        ld.chain_residuals.push_back((ld.coeff(j) * bd.alpha - rhs).norm());
    }
    return ld;
}

std::map<std::string, double> identity_S_A(const Triple& t, const BlockDecomposition& bd,
                                           const Mat& P, const Mat& A, const Mat& Atilde,
                                           const LaurentData& ld, const Config& cfg) {
    std::map<std::string, double> out;
    const int d = ld.d;
    const Mat S = bd.s_operator(t);
    const Mat Ph = bd.p_hat();

    std::vector<Mat> apow{P}; // apow[j] = A^j with A^0 = P
    for (int j = 1; j <= d; ++j) apow.push_back(A * apow[j - 1]);

    for (int j = 1; j <= d; ++j)
        out["S*A^" + std::to_string(j) + " + Phat*A^" + std::to_string(j - 1)] =
            (S * apow[j] + Ph * apow[j - 1]).norm();

    // (1 + S A) A^j = sum_k (-1)^k D_{j+k} v* Ahat^k, j >= 1
    const Mat ahat = bd.a_hat();
    const Mat vstar_full = bd.U1 * bd.v.adjoint() * bd.U0.adjoint();
    for (int j = 1; j <= d - 1; ++j) {
        Mat rhs = Mat::Zero(t.dim(), t.dim());
        Mat ah_k = Mat::Identity(t.dim(), t.dim());
        for (int k = 0; k <= d - 1 - j; ++k) {
            rhs += ((k % 2 == 0) ? 1.0 : -1.0) * (bd.U1 * ld.coeff(j + k) * bd.U1.adjoint()) *
                   vstar_full * ah_k;
            ah_k = ah_k * ahat;
        }
        out["(1+SA)*A^" + std::to_string(j) + " - sum D_j+k v* Ahat^k"] =
            ((Mat::Identity(t.dim(), t.dim()) + S * A) * apow[j] - rhs).norm();
    }

    // relaxed cross-checks, the paper leaves these unused
    {
        Mat rhs = Mat::Zero(t.dim(), t.dim());
        Mat spow = Mat::Identity(t.dim(), t.dim());
        const Mat tail = bd.U1 * bd.U1.adjoint() * t.V.mat(); // (v* + alpha) as a full operator
        for (int l = 0; l <= d - 1; ++l) {
            rhs += ((l % 2 == 0) ? 1.0 : -1.0) * spow * (bd.U1 * ld.coeff(l) * bd.U1.adjoint()) * tail;
            spow = spow * bd.s_operator(t);
        }
        out["P + A*S - sum (-S)^l D_l (v*+alpha)"] = (P + A * S - rhs).norm();

        Mat rhs2 = Mat::Zero(t.dim(), t.dim());
        Mat spow2 = Mat::Identity(t.dim(), t.dim()); // S^(l+1) with l = -1
        for (int l = -1; l <= d - 1; ++l) {
            rhs2 += ((l % 2 == 0) ? -1.0 : 1.0) * spow2 * (bd.U1 * ld.coeff(l) * bd.U1.adjoint()) * tail;
            spow2 = spow2 * S;
        }
        out["Atilde + P*S - S - sum"] = (Atilde + P * S - S - rhs2).norm();
    }
    return out;
}

PropertyAB property_AB(const BlockDecomposition& bd, const Mat& P, const Mat& A, int d,
                       const Config& cfg) {
    PropertyAB res;
    const Mat alpha_full = bd.U1 * bd.alpha * bd.U1.adjoint();
    res.b_residual = (alpha_full * A).norm() / std::max(1.0, alpha_full.norm() * A.norm());
    res.B = res.b_residual <= 1e3 * cfg.riesz_tol;

    const Mat Pperp = bd.p_eig();
    std::vector<Mat> apow{P};
    for (int j = 1; j < d; ++j) apow.push_back(A * apow[j - 1]);
    double worst = 0.0;
    for (int j = 1; j <= d - 1; ++j) {
        Mat lhs = range_basis(Pperp * apow[j - 1], cfg.rank_tol);
        Mat rhs = range_basis(apow[j - 1], cfg.rank_tol);
        worst = std::max(worst, subspace_mismatch(lhs, rhs));
    }
    res.a_mismatch = worst;
    res.A = worst <= 1e3 * cfg.angle_tol;
    return res;
}

double order_k_span_check(const BlockDecomposition& bd, const Mat& upsilon_k, int k,
                          const Config& cfg) {
    if (k < 2 || upsilon_k.cols() == 0) return 0.0;
    // vectors of the order-k space lying entirely in the complement
    Mat overlap = bd.U1.adjoint() * upsilon_k;
    Mat coeffs = null_basis(overlap, cfg.rank_tol);
    if (coeffs.cols() == 0) return 0.0;
    Mat hats = upsilon_k * coeffs;

    const Mat rfull = bd.sliced_resolvent();
    Mat rv_cols = rfull * (bd.U0 * bd.v); // n x m
    const Mat ahat = bd.a_hat();
    Mat span(bd.dim(), 0);
    Mat cur = rv_cols;
    for (int j = 0; j <= k - 2; ++j) {
        Mat grown(bd.dim(), span.cols() + cur.cols());
        grown << span, cur;
        span = std::move(grown);
        cur = ahat * cur;
    }
    Mat basis = range_basis(span, cfg.rank_tol);
    double worst = 0.0;
    for (int j = 0; j < hats.cols(); ++j) {
        Vec x = hats.col(j);
        const double nx = x.norm();
        if (nx == 0) continue;
        worst = std::max(worst, (x - basis * (basis.adjoint() * x)).norm() / nx);
    }
    return worst;
}

std::vector<CurveSample> trace_resonance_curve(const Triple& t, double r, const Vec& chi,
                                               const std::vector<double>& s_values, int order_hint,
                                               const Config& cfg) {
    const double scale = t.scale();
    Vec cn = chi.normalized();
    Mat W = cn * cn.adjoint();

    auto det_at = [&](double s, double tt) {
        Mat m = t.h_at(r + s) + tt * W;
        m.diagonal().array() -= t.lambda;
        Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
        double prod = 1.0;
        for (int i = 0; i < es.eigenvalues().size(); ++i) prod *= es.eigenvalues()[i];
        return prod;
    };

    std::vector<CurveSample> out;
    for (double s : s_values) {
        if (s == 0.0) continue;
        double T = 10.0 * std::pow(std::abs(s), order_hint);
        T = std::max(T, 1e-13 * scale);
        double lo = -T, hi = T;
        int expansions = 0;
        while (det_at(s, lo) * det_at(s, hi) > 0.0) {
            lo *= 2.0;
            hi *= 2.0;
            if (++expansions > 60) fail(Errc::RootBracketFail, "no sign change for t(s)");
        }
        double flo = det_at(s, lo), fhi = det_at(s, hi);
        while (hi - lo > 1e-12 * scale * std::max(1.0, std::abs(hi))) {
            const double mid = 0.5 * (lo + hi);
            const double fm = det_at(s, mid);
            if ((fm <= 0.0) == (flo <= 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
                fhi = fm;
            }
        }
        // det is affine in t for the rank-one W; one secant step lands on the root
        double tt = (flo == fhi) ? 0.5 * (lo + hi) : lo - flo * (hi - lo) / (fhi - flo);
        out.push_back({s, tt});
    }
    return out;
}

int tangency_order(const std::vector<CurveSample>& samples, int direction_order, const Config& cfg) {
    std::vector<double> xs, ys;
    for (const auto& c : samples) {
        if (std::abs(c.t) < 1e-13) continue;
        xs.push_back(std::log(std::abs(c.s)));
        ys.push_back(std::log(std::abs(c.t)));
    }
    if (xs.size() < 3) fail(Errc::TangencyMismatch, "too few usable curve samples");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const int k = static_cast<int>(std::lround(slope));
    if (std::abs(slope - k) > 0.15)
        fail(Errc::TangencyMismatch, "non-integer vanishing order " + std::to_string(slope));
    if (k != direction_order)
        fail(Errc::TangencyMismatch, "tangency order " + std::to_string(k) + " != direction order " +
                                         std::to_string(direction_order));
    return k;
}

} // namespace sfl
