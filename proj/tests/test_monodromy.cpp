#include <doctest.h>

#include "sfl/generate.hpp"
#include "sfl/index.hpp"
#include "sfl/monodromy.hpp"

using namespace sfl;

TEST_CASE("1x1 trace is the circle itself with identity permutation") {
    Mat h = Mat::Zero(1, 1), v = Mat::Identity(1, 1);
    Triple t(0.0, HermitianMatrix(h), HermitianMatrix(v));
    ResonancePoint p = locate_at(t, 0.0);
    MonodromyTrace tr = track_group(t, p, 1e-2);
    REQUIRE(tr.permutation.size() == 1);
    CHECK(tr.permutation[0] == 0);
    // r(z) = z exactly: every position sits on the circle
    for (size_t j = 0; j < tr.theta.size(); ++j) {
        const cplx z = 0.0 + tr.rho * cplx(std::cos(tr.theta[j]), std::sin(tr.theta[j]));
        CHECK(std::abs(tr.positions[j][0] - z) < 1e-9);
    }
}

TEST_CASE("U-turn points swap after one round") {
    Triple t = uturn_triple();
    ResonancePoint p = locate_at(t, 0.0);
    MonodromyTrace tr = track_group(t, p, 1e-2);
    REQUIRE(tr.permutation.size() == 2);
    CHECK(tr.permutation[0] == 1);
    CHECK(tr.permutation[1] == 0);

    RieszPair rp = riesz_pair(t, 1.0, 0.0);
    auto cycles = cycle_decomposition(tr, jordan_profile(rp));
    REQUIRE(cycles.size() == 1);
    CHECK(cycles[0].length == 2);
    CHECK(cycles[0].b_parity == 0);
}

TEST_CASE("cubic instance traces a 3-cycle") {
    Triple t = order3_triple();
    ResonancePoint p = locate_at(t, 0.0);
    MonodromyTrace tr = track_group(t, p, 1e-2);
    REQUIRE(tr.permutation.size() == 3);
    RieszPair rp = riesz_pair(t, 0.0, 0.0);
    auto cycles = cycle_decomposition(tr, jordan_profile(rp));
    REQUIRE(cycles.size() == 1);
    CHECK(cycles[0].length == 3);
    CHECK(cycles[0].b_parity == 1);
}

TEST_CASE("decoupled m=2 instance gives two 1-cycles") {
    Mat h = Mat::Zero(3, 3), v = Mat::Zero(3, 3);
    h(2, 2) = 1.0;
    v(0, 0) = 1.0;
    v(1, 1) = -1.0;
    v(2, 2) = 1.0;
    Triple t(0.0, HermitianMatrix(h), HermitianMatrix(v));
    ResonancePoint p = locate_at(t, 0.0);
    CHECK(p.geo_mult == 2);
    MonodromyTrace tr = track_group(t, p, 1e-2);
    RieszPair rp = riesz_pair(t, 0.0, 0.0);
    auto cycles = cycle_decomposition(tr, jordan_profile(rp));
    REQUIRE(cycles.size() == 2);
    CHECK(cycles[0].length == 1);
    CHECK(cycles[1].length == 1);
}

TEST_CASE("cycle signs of the canonical instances") {
    {
        // simple up-crossing
        Mat h = Mat::Zero(1, 1), v = Mat::Identity(1, 1);
        Triple t(0.0, HermitianMatrix(h), HermitianMatrix(v));
        ResonancePoint p = locate_at(t, 0.0);
        MonodromyTrace tr = track_group(t, p, 1e-2);
        auto cycles = cycle_decomposition(tr, jordan_profile(riesz_pair(t, 0.0, 0.0)));
        auto branches = eigen_branches(t, 0.0, GridSpec{});
        CHECK(cycle_sign(t, p, tr, cycles[0], branches) == 1);
    }
    {
        // right U-turn: lambda'' > 0 gives +1 with b = 0
        Triple t = uturn_triple();
        ResonancePoint p = locate_at(t, 0.0);
        MonodromyTrace tr = track_group(t, p, 1e-2);
        auto cycles = cycle_decomposition(tr, jordan_profile(riesz_pair(t, 1.0, 0.0)));
        auto branches = eigen_branches(t, 0.0, GridSpec{});
        CHECK(cycle_sign(t, p, tr, cycles[0], branches) == 1);
    }
    {
        Triple t = order3_triple();
        ResonancePoint p = locate_at(t, 0.0);
        MonodromyTrace tr = track_group(t, p, 1e-2);
        auto cycles = cycle_decomposition(tr, jordan_profile(riesz_pair(t, 0.0, 0.0)));
        auto branches = eigen_branches(t, 0.0, GridSpec{});
        CHECK(cycle_sign(t, p, tr, cycles[0], branches) == 1);
    }
}

TEST_CASE("Puiseux fits recover slope and leading coefficient") {
    {
        Mat h = Mat::Zero(1, 1), v = Mat::Identity(1, 1);
        Triple t(0.0, HermitianMatrix(h), HermitianMatrix(v));
        ResonancePoint p = locate_at(t, 0.0);
        MonodromyTrace tr = track_group(t, p, 1e-2);
        auto cycles = cycle_decomposition(tr, jordan_profile(riesz_pair(t, 0.0, 0.0)));
        puiseux_leading(t, p, tr, cycles[0]);
        CHECK(cycles[0].fit_slope == doctest::Approx(1.0).epsilon(0.02));
        CHECK(cycles[0].puiseux_leading == doctest::Approx(1.0).epsilon(0.02));
    }
    {
        // r = sqrt(2) (z-1)^{1/2} (1 + O(z-1))
        Triple t = uturn_triple();
        ResonancePoint p = locate_at(t, 0.0);
        MonodromyTrace tr = track_group(t, p, 1e-2);
        auto cycles = cycle_decomposition(tr, jordan_profile(riesz_pair(t, 1.0, 0.0)));
        puiseux_leading(t, p, tr, cycles[0]);
        CHECK(cycles[0].fit_slope == doctest::Approx(0.5).epsilon(0.05));
        CHECK(std::abs(cycles[0].puiseux_leading) == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
    }
    {
        // r^3 = z (1 + O(z))
        Triple t = order3_triple();
        ResonancePoint p = locate_at(t, 0.0);
        MonodromyTrace tr = track_group(t, p, 1e-2);
        auto cycles = cycle_decomposition(tr, jordan_profile(riesz_pair(t, 0.0, 0.0)));
        puiseux_leading(t, p, tr, cycles[0]);
        CHECK(cycles[0].fit_slope == doctest::Approx(1.0 / 3.0).epsilon(0.05));
        CHECK(cycles[0].puiseux_leading == doctest::Approx(1.0).epsilon(0.1));
    }
}

TEST_CASE("cycle projections: single cycle reproduces P, moments reproduce A^k") {
    Triple t = order3_triple();
    ResonancePoint p = locate_at(t, 0.0);
    RieszPair rp = riesz_pair(t, 0.0, 0.0);
    MonodromyTrace tr = track_group(t, p, 1e-2);
    auto cycles = cycle_decomposition(tr, jordan_profile(rp));
    CycleProjection cp = cycle_projection(t, p, tr, cycles[0], rp.A);
    CHECK((cp.P_nu - rp.P).norm() < 1e-6 * std::max(1.0, rp.P.norm()));
    CHECK(cp.idem < 1e-6 * t.scale());
    CHECK(cp.commute_A < 1e-6 * t.scale());
    for (int k = 0; k < 3; ++k) CHECK(moment_limit_check(cp, p, rp.A, k) < 1e-4 * t.scale());
}

TEST_CASE("m=2 diagonal instance: projections are the coordinate projections") {
    Mat h = Mat::Zero(3, 3), v = Mat::Zero(3, 3);
    h(2, 2) = 1.0;
    v(0, 0) = 1.0;
    v(1, 1) = -1.0;
    v(2, 2) = 1.0;
    Triple t(0.0, HermitianMatrix(h), HermitianMatrix(v));
    ResonancePoint p = locate_at(t, 0.0);
    RieszPair rp = riesz_pair(t, 0.0, 0.0);
    MonodromyTrace tr = track_group(t, p, 1e-2);
    auto cycles = cycle_decomposition(tr, jordan_profile(rp));
    Mat sum = Mat::Zero(3, 3);
    for (const auto& c : cycles) {
        CycleProjection cp = cycle_projection(t, p, tr, c, rp.A);
        sum += cp.P_nu;
        // each projection is one of the coordinate projections e0 e0^T, e1 e1^T
        bool is_coord = false;
        for (int i = 0; i < 2; ++i) {
            Mat coord = Mat::Zero(3, 3);
            coord(i, i) = 1.0;
            if ((cp.P_nu - coord).norm() < 1e-6) is_coord = true;
        }
        CHECK(is_coord);
    }
    CHECK((sum - rp.P).norm() < 1e-7);
}

TEST_CASE("intersection numbers equal the resonance index") {
    {
        Triple t = uturn_triple();
        ResonancePoint p = locate_at(t, 0.0);
        CHECK(intersection_number(t, p) == 0);
        CHECK(resonance_index(t, p).index == 0);
    }
    {
        Triple t = order3_triple();
        ResonancePoint p = locate_at(t, 0.0);
        CHECK(intersection_number(t, p) == 1);
    }
    {
        // simple down-crossing
        Mat h = Mat::Zero(1, 1), v = -Mat::Identity(1, 1);
        Triple t(0.0, HermitianMatrix(h), HermitianMatrix(v));
        ResonancePoint p = locate_at(t, 0.0);
        CHECK(intersection_number(t, p) == -1);
        CHECK(resonance_index(t, p).index == -1);
    }
}

TEST_CASE("trace CSV is well-formed") {
    Triple t = uturn_triple();
    MonodromyTrace tr = track_group(t, locate_at(t, 0.0), 1e-2);
    std::string csv = trace_to_csv(tr);
    CHECK(csv.substr(0, 5) == "theta");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(tr.theta.size()) + 1);
}
