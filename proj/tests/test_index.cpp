#include <doctest.h>

#include "sfl/generate.hpp"
#include "sfl/index.hpp"

using namespace sfl;

namespace {

Triple scalar_crossing() {
    Mat h = Mat::Zero(1, 1), v = Mat::Identity(1, 1);
    return Triple(0.0, HermitianMatrix(h), HermitianMatrix(v));
}

} // namespace

TEST_CASE("1x1 up-crossing has index +1") {
    Triple t = scalar_crossing();
    ResonancePoint p = locate_at(t, 0.0);
    IndexReport rep = resonance_index(t, p);
    CHECK(rep.index == 1);
    CHECK(rep.n_plus == 1);
    CHECK(rep.n_minus == 0);
    CHECK(rep.stable);
}

TEST_CASE("U-turn has index 0 with one member per half-plane") {
    Triple t = uturn_triple();
    ResonancePoint p = locate_at(t, 0.0);
    CHECK(p.alg_mult == 2);
    IndexReport rep = resonance_index(t, p);
    CHECK(rep.n_plus == 1);
    CHECK(rep.n_minus == 1);
    CHECK(rep.index == 0);
}

TEST_CASE("cubic instance has index +1 (N+ = 2, N- = 1)") {
    Triple t = order3_triple();
    ResonancePoint p = locate_at(t, 0.0);
    CHECK(p.alg_mult == 3);
    IndexReport rep = resonance_index(t, p);
    CHECK(rep.n_plus == 2);
    CHECK(rep.n_minus == 1);
    CHECK(rep.index == 1);
}

TEST_CASE("resonance matrix of the 1x1 crossing is [1]") {
    Triple t = scalar_crossing();
    ResonanceMatrix rm = resonance_matrix(t, locate_at(t, 0.0));
    CHECK(rm.rank == 1);
    CHECK(rm.signature == 1);
    CHECK(std::abs(rm.M(0, 0) - 1.0) < 1e-9);
}

TEST_CASE("U-turn resonance matrix has even-size skew-Hankel signature 0") {
    Triple t = uturn_triple();
    ResonanceMatrix rm = resonance_matrix(t, locate_at(t, 0.0));
    CHECK(rm.rank == 2);
    CHECK(rm.signature == 0);
    CHECK(rm.herm_residual < 1e-7 * t.scale());
}

TEST_CASE("cubic instance signature is +1") {
    Triple t = order3_triple();
    ResonanceMatrix rm = resonance_matrix(t, locate_at(t, 0.0));
    CHECK(rm.rank == 3);
    CHECK(rm.signature == 1);
}

TEST_CASE("index == signature across instances") {
    {
        Triple t = scalar_crossing();
        auto chk = index_signature_check(t, locate_at(t, 0.0));
        CHECK(chk.agree);
        CHECK(chk.index == 1);
    }
    {
        Triple t = uturn_triple();
        auto chk = index_signature_check(t, locate_at(t, 0.0));
        CHECK(chk.agree);
        CHECK(chk.index == 0);
    }
    // random 6x6 resonance points
    Rng rng(31);
    int checked = 0;
    for (int trial = 0; trial < 3; ++trial) {
        Triple t = random_triple(rng, 6);
        auto pts = real_resonance_points_on_segment(0.0, t.H, t.V, -1.0, 1.0);
        for (const auto& p : pts) {
            auto chk = index_signature_check(t, p);
            CHECK(chk.agree);
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("antisymmetry in the direction") {
    Triple t = order3_triple();
    ResonancePoint p = locate_at(t, 0.0);
    const int plus = resonance_index(t, p).index;
    Triple tneg(0.0, t.H, t.V.scaled(-1.0));
    const int minus = resonance_index(tneg, locate_at(tneg, 0.0)).index;
    CHECK(minus == -plus);
}

TEST_CASE("U-turn inequality |index| <= m") {
    Rng rng(37);
    for (int trial = 0; trial < 4; ++trial) {
        Triple t = degenerate_triple(rng, 5, 2);
        ResonancePoint p = locate_at(t, 0.0);
        CHECK(p.geo_mult == 2);
        IndexReport rep = resonance_index(t, p);
        CHECK(std::abs(rep.index) <= p.geo_mult);
    }
}

TEST_CASE("down-crossing sums against up-crossing on diag(1,-1)+rI") {
    Mat h = Mat::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = -1.0;
    Triple t(0.0, HermitianMatrix(h), HermitianMatrix(Mat::Identity(2, 2)));
    auto pts = real_resonance_points_on_segment(0.0, t.H, t.V, -2.0, 2.0);
    REQUIRE(pts.size() == 2);
    CHECK(resonance_index(t, pts[0]).index == 1);
    CHECK(resonance_index(t, pts[1]).index == 1);
}
