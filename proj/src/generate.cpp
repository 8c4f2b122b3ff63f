#include "sfl/generate.hpp"

#include <Eigen/QR>
#include <cmath>

#include "sfl/riesz.hpp"

namespace sfl {

std::uint64_t subseed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

namespace {

double uni(Rng& rng) { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng); }

Mat raw_complex(Rng& rng, int rows, int cols) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = cplx(uni(rng), uni(rng));
    return m;
}

Mat random_unitary(Rng& rng, int dim) {
    Eigen::HouseholderQR<Mat> qr(raw_complex(rng, dim, dim));
    Mat q = qr.householderQ();
    return q;
}

} // namespace

HermitianMatrix random_hermitian(Rng& rng, int dim, double scale) {
    Mat m = raw_complex(rng, dim, dim);
    return HermitianMatrix(scale * 0.5 * (m + m.adjoint().eval()));
}

Triple random_triple(Rng& rng, int dim) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        HermitianMatrix H = random_hermitian(rng, dim);
        Spectrum sp = eigh(H);
        const double lo = sp.eigenvalues.minCoeff(), hi = sp.eigenvalues.maxCoeff();
        if (lo > -0.2 || hi < 0.2) continue;
        if (dist_to_spectrum(H.mat(), 0.0) < 0.05) continue;
        HermitianMatrix V = random_hermitian(rng, dim);
        if (V.norm() < 0.1) continue;
        return Triple(0.0, H, V);
    }
    fail(Errc::GenerationFailed, "random_triple");
}

Triple degenerate_triple(Rng& rng, int dim, int m) {
    if (m < 1 || m >= dim) fail(Errc::InvalidInput, "need 1 <= m < dim");
    for (int attempt = 0; attempt < 200; ++attempt) {
        Mat u = random_unitary(rng, dim);
        RVec evals(dim);
        for (int i = 0; i < m; ++i) evals[i] = 0.0;
        bool ok = true;
        for (int i = m; i < dim; ++i) {
            evals[i] = 2.0 * uni(rng);
            if (std::abs(evals[i]) < 0.4) ok = false;
        }
        if (!ok) continue;
        Mat h = u * evals.asDiagonal() * u.adjoint();
        HermitianMatrix H(h, 1e-10);
        HermitianMatrix V = random_hermitian(rng, dim);
        // keep the crossing operator decisively non-degenerate
        Mat alpha = u.leftCols(m).adjoint() * V.mat() * u.leftCols(m);
        Eigen::SelfAdjointEigenSolver<Mat> ea(alpha);
        bool separated = true;
        for (int i = 0; i < m; ++i) {
            if (std::abs(ea.eigenvalues()[i]) < 0.15) separated = false;
            for (int j = i + 1; j < m; ++j)
                if (std::abs(ea.eigenvalues()[i] - ea.eigenvalues()[j]) < 0.15) separated = false;
        }
        if (!separated) continue;
        return Triple(0.0, H, V);
    }
    fail(Errc::GenerationFailed, "degenerate_triple");
}

Triple uturn_triple() {
    Mat h(2, 2), v(2, 2);
    h << 0, 1, 1, 0;
    v << 1, 0, 0, -1;
    return Triple(1.0, HermitianMatrix(h), HermitianMatrix(v));
}

Triple order3_triple() {
    Mat h = Mat::Zero(3, 3), v(3, 3);
    h(1, 1) = 1.0;
    h(2, 2) = -1.0;
    v << 0, 1, 1, 1, 1, 0, 1, 0, 0;
    return Triple(0.0, HermitianMatrix(h), HermitianMatrix(v));
}

Triple order_d_triple(Rng& rng, int d, int dim) {
    if (d < 1 || d > 4) fail(Errc::InvalidInput, "order_d supports d in 1..4");
    if (dim < std::max(2, d)) fail(Errc::InvalidInput, "dim too small for requested order");

    for (int attempt = 0; attempt < 100; ++attempt) {
        const int nh = dim - 1;
        RVec e(nh);
        for (int i = 0; i < nh; ++i) {
            double mag = 0.5 + 1.5 * std::abs(uni(rng));
            e[i] = (i % 2 == 0) ? mag : -mag; // alternating signs
        }
        Mat vraw = raw_complex(rng, nh, nh);
        Mat vhat = 0.5 * (vraw + vraw.adjoint().eval());
        Vec v = Vec::Zero(nh);
        double alpha = 0.0;

        if (d == 1) {
            alpha = (uni(rng) > 0 ? 1.0 : -1.0) * (0.5 + std::abs(uni(rng)));
            v = raw_complex(rng, nh, 1);
        } else if (d == 2) {
            v = raw_complex(rng, nh, 1);
            double q0 = 0.0;
            for (int i = 0; i < nh; ++i) q0 += std::norm(v[i]) / e[i];
            if (std::abs(q0) < 0.3) continue;
        } else {
            // weights cancel in q0 = sum |v_i|^2 / e_i over two opposite-sign slots
            const double g = 0.7 + 0.6 * std::abs(uni(rng));
            v[0] = g * std::sqrt(e[0]);
            v[1] = g * std::sqrt(-e[1]);
            Vec u(nh);
            for (int i = 0; i < nh; ++i) u[i] = v[i] / e[i];
            const double un2 = std::real(u.dot(u));
            if (d == 3) {
                double q1 = std::real(u.dot(vhat * u));
                if (std::abs(q1) < 0.3 * un2) {
                    const double bump = (q1 >= 0 ? 1.0 : -1.0) * 0.7;
                    vhat += bump * (u * u.adjoint());
                }
            } else {
                const double q1 = std::real(u.dot(vhat * u));
                vhat -= (q1 / (un2 * un2)) * (u * u.adjoint());
                Vec x = vhat * u;
                double q2 = 0.0;
                for (int i = 0; i < nh; ++i) q2 += std::norm(x[i]) / e[i];
                if (std::abs(q2) < 0.1 * std::real(x.dot(x))) continue;
            }
        }

        Mat h = Mat::Zero(dim, dim), vm(dim, dim);
        for (int i = 0; i < nh; ++i) h(i + 1, i + 1) = e[i];
        vm(0, 0) = alpha;
        for (int i = 0; i < nh; ++i) {
            vm(i + 1, 0) = v[i];
            vm(0, i + 1) = std::conj(v[i]);
        }
        vm.block(1, 1, nh, nh) = vhat;
        Triple t(0.0, HermitianMatrix(h, 1e-10), HermitianMatrix(vm, 1e-10));
        if (validates_order_d(t, d)) return t;
    }
    fail(Errc::GenerationFailed, "order_d_triple d=" + std::to_string(d));
}

Triple direct_sum(const Triple& a, const Triple& b) {
    if (a.lambda != b.lambda) fail(Errc::InvalidInput, "direct sum needs equal lambdas");
    const int na = a.dim(), nb = b.dim();
    Mat h = Mat::Zero(na + nb, na + nb), v = Mat::Zero(na + nb, na + nb);
    h.topLeftCorner(na, na) = a.H.mat();
    h.bottomRightCorner(nb, nb) = b.H.mat();
    v.topLeftCorner(na, na) = a.V.mat();
    v.bottomRightCorner(nb, nb) = b.V.mat();
    return Triple(a.lambda, HermitianMatrix(h), HermitianMatrix(v));
}

OperatorPath random_path(Rng& rng, int dim, int segments, double lambda) {
    std::vector<HermitianMatrix> vs;
    for (int i = 0; i <= segments; ++i) {
        for (int attempt = 0;; ++attempt) {
            HermitianMatrix H = random_hermitian(rng, dim);
            if (dist_to_spectrum(H.mat(), lambda) > 0.03 * (1.0 + H.norm())) {
                vs.push_back(std::move(H));
                break;
            }
            if (attempt > 200) fail(Errc::GenerationFailed, "random_path vertex");
        }
    }
    return OperatorPath(std::move(vs));
}

bool validates_order_d(const Triple& t, int d, const Config& cfg) {
    try {
        RieszPair rp = riesz_pair(t, t.lambda, cplx(0.0, 0.0), cfg);
        if (rp.N != d || rp.order_d != d) return false;
        JordanProfile jp = jordan_profile(rp, cfg);
        return jp.m == 1 && jp.sizes.size() == 1 && jp.sizes[0] == d;
    } catch (const Error&) {
        return false;
    }
}

} // namespace sfl
