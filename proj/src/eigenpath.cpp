#include "sfl/eigenpath.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace sfl {

namespace {

// central difference stencils of second-order accuracy, offsets and weights
struct Stencil {
    std::vector<int> offs;
    std::vector<double> w;
};

const Stencil& stencil(int k) {
    static const std::vector<Stencil> table = {
        {{-1, 1}, {-0.5, 0.5}},                                    // k=1
        {{-1, 0, 1}, {1.0, -2.0, 1.0}},                            // k=2
        {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}},                  // k=3
        {{-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}},          // k=4
        {{-3, -2, -1, 1, 2, 3}, {-0.5, 2.0, -2.5, 2.5, -2.0, 0.5}} // k=5
    };
    return table.at(static_cast<size_t>(k - 1));
}

// D_k f(0) at stride q on grid values f[i0 + j], with Richardson over strides
// {1,2,4}: error estimate from the last extrapolation difference.
template <typename T>
T stencil_apply(const std::vector<T>& f, int i0, int k, int stride, double h) {
    const Stencil& st = stencil(k);
    T acc = st.w[0] * f[i0 + st.offs[0] * stride];
    for (size_t j = 1; j < st.offs.size(); ++j) acc += st.w[j] * f[i0 + st.offs[j] * stride];
    return acc / std::pow(stride * h, k);
}

template <typename T>
T richardson_derivative(const std::vector<T>& f, int i0, int k, double h, double* err) {
    const T d1 = stencil_apply(f, i0, k, 1, h);
    const T d2 = stencil_apply(f, i0, k, 2, h);
    const T d4 = stencil_apply(f, i0, k, 4, h);
    const T r1 = (4.0 * d1 - d2) / 3.0;
    const T r2 = (4.0 * d2 - d4) / 3.0;
    const T out = (16.0 * r1 - r2) / 15.0;
    if (err) {
        if constexpr (std::is_same_v<T, double>)
            *err = std::abs(out - r1);
        else
            *err = (out - r1).norm();
    }
    return out;
}

// pairwise orthonormalization closest to the given columns
Mat loewdin(const Mat& b) {
    Eigen::JacobiSVD<Mat> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

// bijective assignment maximizing overlap magnitudes, greedy on sorted pairs
std::vector<int> assign_by_overlap(const Mat& overlap, double min_accept, const char* what) {
    const int n = static_cast<int>(overlap.rows());
    struct Entry {
        double mag;
        int from, to;
    };
    std::vector<Entry> entries;
    entries.reserve(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) entries.push_back({std::abs(overlap(i, j)), i, j});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.mag != b.mag) return a.mag > b.mag;
        if (a.from != b.from) return a.from < b.from;
        return a.to < b.to;
    });
    std::vector<int> match(n, -1), used(n, 0);
    int placed = 0;
    for (const auto& e : entries) {
        if (match[e.from] >= 0 || used[e.to]) continue;
        if (e.mag < min_accept)
            fail(Errc::BranchEntanglement, std::string(what) + ": best overlap " +
                                               std::to_string(e.mag) + " below threshold");
        match[e.from] = e.to;
        used[e.to] = 1;
        if (++placed == n) break;
    }
    return match;
}

// analytic-limit basis of the lambda-cluster at s = r: diagonalize the
// crossing operator, then second-order effective blocks; remaining ties are
// rotated onto the branches matched in from s = r + h.
Mat cluster_limit_basis(const Triple& t, const Spectrum& sp_center,
                        const std::vector<int>& cluster, const Mat& side_basis,
                        const std::vector<int>& side_cols, const Config& cfg) {
    const int m = static_cast<int>(cluster.size());
    const int n = t.dim();
    Mat phi(n, m);
    for (int j = 0; j < m; ++j) phi.col(j) = sp_center.eigenvectors.col(cluster[j]);
    if (m == 1) return phi;

    const double vtol = 1e-7 * (1.0 + t.V.norm());

    Mat alpha = phi.adjoint() * t.V.mat() * phi;
    Eigen::SelfAdjointEigenSolver<Mat> ea(alpha);
    phi = phi * ea.eigenvectors();
    RVec a = ea.eigenvalues();

    // reduced resolvent on the complement of the cluster
    Mat r0 = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        if (std::find(cluster.begin(), cluster.end(), i) != cluster.end()) continue;
        r0 += sp_center.eigenvectors.col(i) * sp_center.eigenvectors.col(i).adjoint() /
              (sp_center.eigenvalues[i] - t.lambda);
    }

    std::vector<std::pair<int, int>> tied; // [begin, end) blocks still unresolved
    int b = 0;
    while (b < m) {
        int e = b + 1;
        while (e < m && std::abs(a[e] - a[b]) <= vtol) ++e;
        if (e - b > 1) {
            Mat vb = t.V.mat() * phi.middleCols(b, e - b);
            Mat m2 = -(vb.adjoint() * r0 * vb);
            Eigen::SelfAdjointEigenSolver<Mat> e2(m2);
            phi.middleCols(b, e - b) = phi.middleCols(b, e - b) * e2.eigenvectors();
            const RVec mu = e2.eigenvalues();
            int bb = 0;
            while (bb < e - b) {
                int ee = bb + 1;
                while (ee < e - b && std::abs(mu[ee] - mu[bb]) <= vtol) ++ee;
                if (ee - bb > 1) tied.push_back({b + bb, b + ee});
                bb = ee;
            }
        }
        b = e;
    }

    // resolve leftover ties against the incoming side branches
    for (auto [tb, te] : tied) {
        Mat sub = phi.middleCols(tb, te - tb);
        Mat proj(n, te - tb);
        int got = 0;
        for (int c : side_cols) {
            Vec cand = sub * (sub.adjoint() * side_basis.col(c));
            if (cand.norm() > 0.3 && got < te - tb) proj.col(got++) = cand;
        }
        if (got == te - tb)
            phi.middleCols(tb, te - tb) = loewdin(proj);
        // otherwise leave the second-order basis; matching will flag genuine
        // entanglement downstream
    }
    return loewdin(phi);
}

} // namespace

double EigenBranch::lambda_at(double s) const {
    const int n = static_cast<int>(s_grid.size());
    if (s <= s_grid[0]) return lambda_of_s[0];
    if (s >= s_grid[n - 1]) return lambda_of_s[n - 1];
    int i = 0;
    while (i + 1 < n && s_grid[i + 1] < s) ++i;
    const int i0 = std::clamp(i - 1, 0, n - 4);
    // Lagrange cubic through 4 neighbours
    double acc = 0.0;
    for (int p = 0; p < 4; ++p) {
        double term = lambda_of_s[i0 + p];
        for (int q = 0; q < 4; ++q) {
            if (q == p) continue;
            term *= (s - s_grid[i0 + q]) / (s_grid[i0 + p] - s_grid[i0 + q]);
        }
        acc += term;
    }
    return acc;
}

std::vector<EigenBranch> eigen_branches(const Triple& t, double r, const GridSpec& grid,
                                        const Config& cfg) {
    const int n = t.dim();
    const int K = grid.halfwidth;
    const int pts = 2 * K + 1;

    // keep the whole grid inside the pole-free interval around r
    double h = grid.h * std::max(1.0, std::abs(t.lambda));
    {
        const double free_dist = pole_free_distance(t, t.lambda, r, cfg);
        if (std::isfinite(free_dist)) h = std::min(h, 0.5 * free_dist / K);
    }

    std::vector<Spectrum> specs(pts);
    RVec s_grid(pts);
    for (int i = 0; i < pts; ++i) {
        s_grid[i] = r + (i - K) * h;
        specs[i] = eigh(Mat(t.h_at(s_grid[i])), cfg);
    }

    const int ic = K;
    const double cthr = 100.0 * cfg.mult_gap * t.scale();
    std::vector<int> cluster;
    for (int i = 0; i < n; ++i)
        if (std::abs(specs[ic].eigenvalues[i] - t.lambda) <= cthr) cluster.push_back(i);
    const int m = static_cast<int>(cluster.size());
    if (m == 0) fail(Errc::InvalidInput, "lambda is not an eigenvalue of H + rV");

    // order-n branch bookkeeping: cols[i][b] = eigenvector column of branch b at grid i
    Mat basis_c(n, n);
    {
        std::vector<int> side_cols;
        for (int i = 0; i < n; ++i)
            if (std::abs(specs[ic + 1].eigenvalues[i] - t.lambda) <= cthr + h * t.V.norm() * 2)
                side_cols.push_back(i);
        Mat limit = cluster_limit_basis(t, specs[ic], cluster, specs[ic + 1].eigenvectors,
                                        side_cols, cfg);
        basis_c = specs[ic].eigenvectors;
        for (int j = 0; j < m; ++j) basis_c.col(cluster[j]) = limit.col(j);
    }

    Mat track(n, n); // current eigenvectors in branch order
    std::vector<RVec> lam(pts, RVec(n));
    std::vector<Mat> vecs(pts, Mat(n, n));
    vecs[ic] = basis_c;
    lam[ic] = specs[ic].eigenvalues;
    for (int j = 0; j < m; ++j) lam[ic][cluster[j]] = t.lambda;

    for (int dir : {+1, -1}) {
        Mat prev = basis_c;
        for (int i = ic + dir; i >= 0 && i < pts; i += dir) {
            Mat overlap = prev.adjoint() * specs[i].eigenvectors;
            auto match = assign_by_overlap(overlap, cfg.overlap_min, "grid matching");
            Mat cur(n, n);
            RVec lcur(n);
            for (int b = 0; b < n; ++b) {
                Vec col = specs[i].eigenvectors.col(match[b]);
                const cplx ov = prev.col(b).dot(col);
                if (std::abs(ov) > 0) col *= std::conj(ov) / std::abs(ov);
                cur.col(b) = col;
                lcur[b] = specs[i].eigenvalues[match[b]];
            }
            vecs[i] = cur;
            lam[i] = lcur;
            prev = cur;
        }
    }

    // global gauge relative to the centre vector
    for (int b = 0; b < n; ++b)
        for (int i = 0; i < pts; ++i) {
            const cplx ov = vecs[ic].col(b).dot(vecs[i].col(b));
            if (std::abs(ov) > 0) vecs[i].col(b) *= std::conj(ov) / std::abs(ov);
        }

    std::vector<EigenBranch> out;
    for (int j = 0; j < m; ++j) {
        const int b = cluster[j];
        EigenBranch br;
        br.s_grid = s_grid;
        br.lambda_of_s.resize(pts);
        br.phi_of_s.resize(n, pts);
        for (int i = 0; i < pts; ++i) {
            br.lambda_of_s[i] = lam[i][b];
            br.phi_of_s.col(i) = vecs[i].col(b);
        }
        // derivative tables
        std::vector<double> lvals(pts);
        for (int i = 0; i < pts; ++i) lvals[i] = br.lambda_of_s[i];
        const double lscale = std::max(1.0, std::abs(t.lambda)) + t.V.norm();
        int order = 0;
        std::vector<double> derivs, errs;
        for (int k = 1; k <= 5; ++k) {
            double err = 0.0;
            const double dk = richardson_derivative(lvals, ic, k, h, &err);
            derivs.push_back(dk);
            errs.push_back(err);
            const double floor = std::max(cfg.deriv_floor * lscale, 30.0 * err);
            if (std::abs(dk) > floor) {
                order = k;
                break;
            }
        }
        if (order == 0)
            fail(Errc::OrderAmbiguous, "no nonzero lambda derivative up to order 5");
        br.order = order;
        br.lam_derivs = std::move(derivs);
        br.lam_deriv_errs = std::move(errs);

        std::vector<Vec> cols(pts);
        for (int i = 0; i < pts; ++i) cols[i] = br.phi_of_s.col(i);
        br.phi_derivs.push_back(br.phi_of_s.col(ic));
        for (int jd = 1; jd <= order - 1; ++jd) {
            double err = 0.0;
            Vec d = richardson_derivative(cols, ic, jd, h, &err);
            if (err > cfg.basis_tol * t.scale() * 10.0)
                fail(Errc::DerivativeNoise, "phi^(" + std::to_string(jd) + ") error estimate " +
                                                std::to_string(err));
            br.phi_derivs.push_back(std::move(d));
        }
        out.push_back(std::move(br));
    }
    return out;
}

int branch_order(const EigenBranch& b, const Direction& V, const Config& cfg) {
    const int k = b.order;
    if (static_cast<int>(b.lam_derivs.size()) < k) fail(Errc::OrderAmbiguous, "missing derivatives");
    for (int j = 1; j < k; ++j)
        if (std::abs(b.lam_derivs[j - 1]) > std::abs(b.lam_derivs[k - 1]))
            fail(Errc::OrderAmbiguous, "lower derivative dominates the leading one");
    // cross-check <phi, V phi^(k-1)> = lambda^(k) <phi,phi> / k
    const Vec& phi = b.phi_derivs[0];
    if (static_cast<int>(b.phi_derivs.size()) >= k) {
        const cplx lhs = phi.dot(V.mat() * b.phi_derivs[k - 1]);
        const double rhs = b.lam_derivs[k - 1] * std::real(phi.dot(phi)) / k;
        const double tol = std::max(1e-3 * std::abs(rhs), 50.0 * b.lam_deriv_errs[k - 1]);
        if (std::abs(lhs - rhs) > tol)
            fail(Errc::OrderAmbiguous, "derivative cross-check off by " +
                                           std::to_string(std::abs(lhs - rhs)));
    }
    return k;
}

OrthogonalityReport orthogonality_suite(const std::vector<EigenBranch>& branches,
                                        const Direction& V, const Config& cfg) {
    OrthogonalityReport rep;
    const double scale = std::max(1.0, V.norm());
    for (size_t mu = 0; mu < branches.size(); ++mu) {
        for (size_t nu = 0; nu < branches.size(); ++nu) {
            const auto& bm = branches[mu];
            const auto& bn = branches[nu];
            for (size_t j = 0; j < bm.phi_derivs.size(); ++j) {
                for (size_t k = 0; k < bn.phi_derivs.size(); ++k) {
                    const double den =
                        scale * std::max(1.0, bm.phi_derivs[j].norm() * bn.phi_derivs[k].norm());
                    const double val =
                        std::abs((V.mat() * bm.phi_derivs[j]).dot(bn.phi_derivs[k])) / den;
                    if (mu != nu)
                        rep.max_cross = std::max(rep.max_cross, val);
                    else if (j + k + 2 <= bm.phi_derivs.size())
                        // skew-upper-triangular zero pattern: j + k <= d - 2
                        rep.max_within = std::max(rep.max_within, val);
                }
            }
        }
    }
    return rep;
}

JordanBasisReport jordan_basis(const std::vector<EigenBranch>& branches, const RieszPair& rp,
                               const Config& cfg) {
    JordanBasisReport rep;
    double fact = 1.0;
    for (const auto& b : branches) {
        fact = 1.0;
        for (size_t j = 0; j < b.phi_derivs.size(); ++j) {
            if (j > 0) fact *= static_cast<double>(j);
            rep.vectors.push_back(b.phi_derivs[j] / fact);
        }
        for (size_t j = 1; j < b.phi_derivs.size(); ++j) {
            const Vec lhs = rp.A * b.phi_derivs[j];
            const Vec rhs = static_cast<double>(j) * b.phi_derivs[j - 1];
            rep.max_chain_residual = std::max(
                rep.max_chain_residual, (lhs - rhs).norm() / std::max(1.0, rhs.norm()));
        }
    }
    Mat basis(rp.P.rows(), static_cast<int>(rep.vectors.size()));
    for (size_t i = 0; i < rep.vectors.size(); ++i) basis.col(static_cast<int>(i)) = rep.vectors[i];
    const Mat qb = range_basis(basis, cfg.rank_tol);
    const Mat pb = range_basis(rp.P, cfg.rank_tol);
    if (qb.cols() != pb.cols())
        fail(Errc::DerivativeNoise, "Jordan basis rank " + std::to_string(qb.cols()) +
                                        " != rank P " + std::to_string(pb.cols()));
    rep.span_mismatch = std::max(subspace_mismatch(qb, pb), subspace_mismatch(pb, qb));
    return rep;
}

PReconstruction reconstruct_P(const std::vector<EigenBranch>& branches, const Direction& V,
                              const Mat& P_contour, const Config& cfg) {
    PReconstruction rec;
    const int n = static_cast<int>(P_contour.rows());
    std::vector<Vec> bs, as; // b_q = phi^(j)/j!,  a_p = V phi^(k)/k!
    std::vector<int> block_of, pos_in_block, block_size;
    for (size_t nu = 0; nu < branches.size(); ++nu) {
        double fact = 1.0;
        for (size_t j = 0; j < branches[nu].phi_derivs.size(); ++j) {
            if (j > 0) fact *= static_cast<double>(j);
            bs.push_back(branches[nu].phi_derivs[j] / fact);
            as.push_back(V.mat() * branches[nu].phi_derivs[j] / fact);
            block_of.push_back(static_cast<int>(nu));
            pos_in_block.push_back(static_cast<int>(j));
        }
        block_size.push_back(static_cast<int>(branches[nu].phi_derivs.size()));
    }
    const int N = static_cast<int>(bs.size());
    Mat b(N, N);
    for (int p = 0; p < N; ++p)
        for (int q = 0; q < N; ++q) b(p, q) = as[p].dot(bs[q]);
    rec.b_matrix = b;

    // block-diagonal skew-Hankel structure
    double bscale = std::max(1.0, b.cwiseAbs().maxCoeff());
    double defect = 0.0;
    for (int p = 0; p < N; ++p) {
        for (int q = 0; q < N; ++q) {
            if (block_of[p] != block_of[q]) {
                defect = std::max(defect, std::abs(b(p, q)) / bscale);
            } else {
                const int d = block_size[block_of[p]];
                if (pos_in_block[p] + pos_in_block[q] <= d - 2)
                    defect = std::max(defect, std::abs(b(p, q)) / bscale);
            }
        }
    }
    // anti-diagonal constancy within blocks
    for (int p = 0; p < N; ++p)
        for (int q = 0; q < N; ++q)
            for (int p2 = 0; p2 < N; ++p2)
                for (int q2 = 0; q2 < N; ++q2)
                    if (block_of[p] == block_of[q] && block_of[p2] == block_of[q2] &&
                        block_of[p] == block_of[p2] &&
                        pos_in_block[p] + pos_in_block[q] == pos_in_block[p2] + pos_in_block[q2])
                        defect = std::max(defect, std::abs(b(p, q) - b(p2, q2)) / bscale);
    rec.hankel_residual = defect;

    Eigen::ColPivHouseholderQR<Mat> qr(b.transpose());
    if (!qr.isInvertible()) fail(Errc::BMatrixSingular, "b matrix is singular");
    Mat alpha = qr.solve(Mat::Identity(N, N));

    Mat A(n, N), B(n, N);
    for (int p = 0; p < N; ++p) {
        A.col(p) = as[p];
        B.col(p) = bs[p];
    }
    rec.P_rec = B * alpha.transpose() * A.adjoint();
    rec.compare_norm = (rec.P_rec - P_contour).norm();
    return rec;
}

} // namespace sfl
