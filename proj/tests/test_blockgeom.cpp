#include <doctest.h>

#include "sfl/blockgeom.hpp"
#include "sfl/generate.hpp"
#include "sfl/riesz.hpp"

using namespace sfl;

TEST_CASE("block split of the cubic instance") {
    Triple t = order3_triple();
    BlockDecomposition bd = block_split(t, 0.0);
    CHECK(bd.m() == 1);
    // alpha = V_00 = 0, and <R v, v> = 0 by the alternating weights
    CHECK(bd.alpha.norm() < 1e-12);
    Mat rfull = bd.sliced_resolvent();
    Vec v_full = bd.U0 * bd.v.col(0);
    CHECK(std::abs(v_full.dot(rfull * v_full)) < 1e-12);
    // <R Vhat R v, v> = 1 drives the third-order term
    Mat vhat_full = bd.U0 * bd.Vhat * bd.U0.adjoint();
    CHECK(std::abs(v_full.dot(rfull * vhat_full * rfull * v_full) - 1.0) < 1e-10);
}

TEST_CASE("U-turn crossing operator vanishes") {
    Triple t = uturn_triple();
    BlockDecomposition bd = block_split(t, 0.0);
    CHECK(bd.m() == 1);
    CHECK(bd.alpha.norm() < 1e-12);
}

TEST_CASE("simple crossing has alpha = lambda'(r)") {
    Mat h = Mat::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = -1.0;
    Triple t(0.0, HermitianMatrix(h), HermitianMatrix(Mat::Identity(2, 2)));
    BlockDecomposition bd = block_split(t, -1.0);
    REQUIRE(bd.m() == 1);
    CHECK(std::abs(bd.alpha(0, 0) - 1.0) < 1e-12);
}

TEST_CASE("block reassembly is exact") {
    Rng rng(47);
    Triple t = degenerate_triple(rng, 5, 2);
    BlockDecomposition bd = block_split(t, 0.0);
    const int n = t.dim();
    Mat U(n, n);
    U << bd.U0, bd.U1;
    Mat hblk = Mat::Zero(n, n);
    hblk.topLeftCorner(bd.U0.cols(), bd.U0.cols()) = bd.Hhat;
    hblk.bottomRightCorner(bd.m(), bd.m()) = t.lambda * Mat::Identity(bd.m(), bd.m());
    CHECK((U * hblk * U.adjoint() - t.h_at(0.0)).norm() < 1e-9 * t.scale());
    Mat vblk(n, n);
    vblk.topLeftCorner(bd.U0.cols(), bd.U0.cols()) = bd.Vhat;
    vblk.topRightCorner(bd.U0.cols(), bd.m()) = bd.v;
    vblk.bottomLeftCorner(bd.m(), bd.U0.cols()) = bd.v.adjoint();
    vblk.bottomRightCorner(bd.m(), bd.m()) = bd.alpha;
    CHECK((U * vblk * U.adjoint() - t.V.mat()).norm() < 1e-10 * t.scale());
}

TEST_CASE("Laurent data of the simple crossing: D_0 = [1/alpha]") {
    Mat h = Mat::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = -1.0;
    Triple t(0.0, HermitianMatrix(h), HermitianMatrix(Mat::Identity(2, 2)));
    BlockDecomposition bd = block_split(t, -1.0);
    LaurentData ld = laurent_D(t, bd, 1, 0.2);
    // alpha = 1 here, so D_0 = 1
    CHECK(std::abs(ld.coeff(0)(0, 0) - 1.0) < 1e-8);
    CHECK(ld.herm_residual < 1e-8);
    CHECK(ld.block_residual < 1e-10);
}

TEST_CASE("Laurent top coefficient matches the nilpotent block") {
    Triple t = order3_triple();
    RieszPair rp = riesz_pair(t, 0.0, 0.0);
    BlockDecomposition bd = block_split(t, 0.0);
    LaurentData ld = laurent_D(t, bd, rp.order_d, default_contour_radius(t, 0.0, 0.0));
    // A^{d-1} = U1 D_{d-1} v* U0^T in block form
    Mat apow = rp.A * rp.A;
    Mat top = bd.U1 * ld.coeff(2) * bd.v.adjoint() * bd.U0.adjoint();
    CHECK((apow - top).norm() < 1e-6 * t.scale());
    for (double c : ld.chain_residuals) CHECK(c < 1e-7 * t.scale());
}

TEST_CASE("S-nilpotent identities") {
    for (Triple t : {uturn_triple(), order3_triple()}) {
        RieszPair rp = riesz_pair(t, t.lambda, 0.0);
        BlockDecomposition bd = block_split(t, 0.0);
        LaurentData ld = laurent_D(t, bd, rp.order_d, default_contour_radius(t, t.lambda, 0.0));
        auto table = identity_S_A(t, bd, rp.P, rp.A, rp.Atilde, ld);
        for (const auto& [key, val] : table) {
            INFO(key);
            CHECK(val < 1e-5 * t.scale());
        }
    }
}

TEST_CASE("property A holds in the trivial cases") {
    Triple t3 = order3_triple();
    RieszPair rp = riesz_pair(t3, 0.0, 0.0);
    PropertyAB ab = property_AB(block_split(t3, 0.0), rp.P, rp.A, rp.order_d);
    CHECK(ab.A); // m = 1
    CHECK(ab.B);

    Rng rng(53);
    Triple t2 = degenerate_triple(rng, 5, 2); // d = 1 <= 2
    RieszPair rp2 = riesz_pair(t2, 0.0, 0.0);
    PropertyAB ab2 = property_AB(block_split(t2, 0.0), rp2.P, rp2.A, rp2.order_d);
    CHECK(ab2.A);
}

TEST_CASE("order-k span containment") {
    Triple t = order3_triple();
    BlockDecomposition bd = block_split(t, 0.0);
    for (int k = 2; k <= 3; ++k) {
        Mat yk = resonance_space(t, 0.0, 0.0, k);
        CHECK(order_k_span_check(bd, yk, k) < 1e-6);
    }
    Triple u = uturn_triple();
    BlockDecomposition bdu = block_split(u, 0.0);
    Mat y2 = resonance_space(u, 1.0, 0.0, 2);
    CHECK(order_k_span_check(bdu, y2, 2) < 1e-6);
}

TEST_CASE("resonance curve of the cubic instance: t(s) = -s^3/(1+s)") {
    Triple t = order3_triple();
    Vec chi = Vec::Zero(3);
    chi[0] = 1.0;
    std::vector<double> svals;
    for (int k = 0; k <= 6; ++k) {
        svals.push_back(0.1 * std::pow(0.5, k));
        svals.push_back(-0.1 * std::pow(0.5, k));
    }
    auto curve = trace_resonance_curve(t, 0.0, chi, svals, 3);
    for (const auto& c : curve) {
        const double expect = -c.s * c.s * c.s / (1.0 + c.s);
        CHECK(c.t == doctest::Approx(expect).epsilon(1e-6));
    }
    CHECK(tangency_order(curve, 3) == 3);
}

TEST_CASE("tangency orders of the canonical instances") {
    {
        Triple t = uturn_triple();
        Vec chi(2);
        chi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
        std::vector<double> svals;
        for (int k = 0; k <= 6; ++k) {
            svals.push_back(0.1 * std::pow(0.5, k));
            svals.push_back(-0.1 * std::pow(0.5, k));
        }
        auto curve = trace_resonance_curve(t, 0.0, chi, svals, 2);
        CHECK(tangency_order(curve, 2) == 2);
    }
    {
        Mat h = Mat::Zero(2, 2);
        h(0, 0) = 1.0;
        h(1, 1) = -1.0;
        Triple t(0.0, HermitianMatrix(h), HermitianMatrix(Mat::Identity(2, 2)));
        Vec chi = Vec::Zero(2);
        chi[0] = 1.0;
        std::vector<double> svals;
        for (int k = 0; k <= 6; ++k) {
            svals.push_back(0.1 * std::pow(0.5, k));
            svals.push_back(-0.1 * std::pow(0.5, k));
        }
        auto curve = trace_resonance_curve(t, -1.0, chi, svals, 1);
        CHECK(tangency_order(curve, 1) == 1);
        // transversal slope: t(s) = -lambda'(r) s + O(s^2) with lambda' = 1
        for (const auto& c : curve)
            if (std::abs(c.s) < 0.02) CHECK(c.t == doctest::Approx(-c.s).epsilon(0.1));
    }
}

TEST_CASE("a mis-stated tangency order is rejected") {
    Triple t = order3_triple();
    Vec chi = Vec::Zero(3);
    chi[0] = 1.0;
    std::vector<double> svals;
    for (int k = 0; k <= 6; ++k) svals.push_back(0.1 * std::pow(0.5, k));
    auto curve = trace_resonance_curve(t, 0.0, chi, svals, 3);
    CHECK_THROWS_AS((void)tangency_order(curve, 2), Error);
}
