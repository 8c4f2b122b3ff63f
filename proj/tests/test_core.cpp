#include <doctest.h>

#include "sfl/core.hpp"
#include "sfl/generate.hpp"

using namespace sfl;

TEST_CASE("eigh on the canonical small matrices") {
    Mat px(2, 2);
    px << 0, 1, 1, 0;
    Spectrum sp = eigh(HermitianMatrix(px));
    CHECK(sp.eigenvalues[0] == doctest::Approx(-1.0));
    CHECK(sp.eigenvalues[1] == doctest::Approx(1.0));

    Mat d3 = Mat::Zero(3, 3);
    d3(0, 0) = 3;
    d3(1, 1) = 1;
    d3(2, 2) = 2;
    sp = eigh(HermitianMatrix(d3));
    CHECK(sp.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(sp.eigenvalues[1] == doctest::Approx(2.0));
    CHECK(sp.eigenvalues[2] == doctest::Approx(3.0));

    sp = eigh(HermitianMatrix(Mat::Identity(4, 4)));
    for (int i = 0; i < 4; ++i) CHECK(sp.eigenvalues[i] == doctest::Approx(1.0));
    CHECK((sp.eigenvectors.adjoint() * sp.eigenvectors - Mat::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("eigh phase convention is deterministic") {
    Rng rng(7);
    HermitianMatrix h = random_hermitian(rng, 5);
    Spectrum a = eigh(h);
    Spectrum b = eigh(h);
    CHECK((a.eigenvectors - b.eigenvectors).norm() == 0.0);
    for (int j = 0; j < 5; ++j) {
        int imax = 0;
        a.eigenvectors.col(j).cwiseAbs().maxCoeff(&imax);
        CHECK(a.eigenvectors(imax, j).imag() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(a.eigenvectors(imax, j).real() > 0.0);
    }
}

TEST_CASE("non-Hermitian input is rejected") {
    Mat m(2, 2);
    m << 0, 1, 2, 0;
    CHECK_THROWS_AS(HermitianMatrix{m}, Error);
}

TEST_CASE("scalar resolvent products") {
    Mat h = Mat::Zero(1, 1), v = Mat::Identity(1, 1);
    Triple t(0.0, HermitianMatrix(h), HermitianMatrix(v));

    const double y = 0.7;
    Mat a = a_operator(t, cplx(0.0, y), 0.0);
    CHECK(std::abs(a(0, 0) - cplx(0.0, 1.0 / y)) < 1e-14);

    Mat a2 = a_operator(t, cplx(-2.5, 0.0), 0.0);
    CHECK(std::abs(a2(0, 0) - cplx(1.0 / 2.5, 0.0)) < 1e-14);

    Mat b = b_operator(t, cplx(0.0, y), 0.0);
    CHECK(std::abs(b(0, 0) - cplx(0.0, 1.0 / y)) < 1e-14);
}

TEST_CASE("second resolvent identity at two regular points") {
    Rng rng(11);
    Triple t = random_triple(rng, 4);
    const cplx z(0.13, 0.9);
    const cplx s(0.4, -0.2), r(-0.3, 0.5);
    Mat as = a_operator(t, z, s);
    Mat ar = a_operator(t, z, r);
    Mat id = Mat::Identity(4, 4);
    CHECK(((id + (s - r) * ar) * as - ar).norm() <= 1e-10 * std::max(1.0, ar.norm()));
}

TEST_CASE("B intertwines and is the adjoint at conjugate arguments") {
    Rng rng(13);
    Triple t = random_triple(rng, 5);
    const cplx z(0.2, 0.8), s(0.1, 0.0);
    Mat a = a_operator(t, z, s);
    Mat b = b_operator(t, z, s);
    CHECK((b * t.V.mat() - t.V.mat() * a).norm() < 1e-10 * t.scale() * a.norm());
    Mat badj = b_operator(t, std::conj(z), std::conj(s));
    CHECK((badj - a.adjoint()).norm() < 1e-10 * t.scale() * a.norm());
}

TEST_CASE("resolvent near a pole is flagged") {
    Mat h = Mat::Zero(2, 2), v = Mat::Identity(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = -1.0;
    Triple t(0.0, HermitianMatrix(h), HermitianMatrix(v));
    CHECK_THROWS_AS((void)a_operator(t, cplx(1.0, 0.0), 0.0), Error); // z in spec(H)
}

TEST_CASE("counting_above") {
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = -1;
    d(1, 1) = 2;
    CHECK(counting_above(HermitianMatrix(d), 0.0) == 1);
    d(0, 0) = 3;
    d(1, 1) = 1;
    CHECK(counting_above(HermitianMatrix(d), 0.0) == 2);
    d(0, 0) = -1;
    d(1, 1) = -3;
    CHECK(counting_above(HermitianMatrix(d), 0.0) == 0);
    d(1, 1) = 0.0;
    CHECK_THROWS_AS((void)counting_above(HermitianMatrix(d), 0.0), Error);
}

TEST_CASE("counting complement sums to the dimension") {
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        HermitianMatrix h = random_hermitian(rng, 6);
        const double lam = 0.21;
        if (dist_to_spectrum(h.mat(), lam) < 1e-6) continue;
        Spectrum sp = eigh(h);
        int below = 0;
        for (int i = 0; i < 6; ++i)
            if (sp.eigenvalues[i] < lam) ++below;
        CHECK(counting_above(h, lam) + below == 6);
    }
}
