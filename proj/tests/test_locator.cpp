#include <doctest.h>

#include "sfl/generate.hpp"
#include "sfl/locator.hpp"

using namespace sfl;

namespace {

Triple diag_pm1_identity() {
    Mat h = Mat::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = -1.0;
    return Triple(0.0, HermitianMatrix(h), HermitianMatrix(Mat::Identity(2, 2)));
}

} // namespace

TEST_CASE("resonance points of H=diag(1,-1), V=I at z=0") {
    auto pts = resonance_points(diag_pm1_identity(), cplx(0.0, 0.0), Window{cplx(0, 0), 3.0});
    REQUIRE(pts.size() == 2);
    CHECK(std::abs(pts[0].r - cplx(-1.0, 0.0)) < 1e-8);
    CHECK(std::abs(pts[1].r - cplx(1.0, 0.0)) < 1e-8);
    CHECK(pts[0].alg_mult == 1);
    CHECK(pts[1].alg_mult == 1);
}

TEST_CASE("U-turn triple has a double point at r=0 for z=lambda") {
    Triple t = uturn_triple();
    auto pts = resonance_points(t, cplx(1.0, 0.0), Window{cplx(0, 0), 0.5});
    REQUIRE(pts.size() == 1);
    CHECK(std::abs(pts[0].r) < 1e-7);
    CHECK(pts[0].alg_mult == 2);
    CHECK(pts[0].geo_mult == 1);
}

TEST_CASE("U-turn group splits off axis as +-sqrt(z^2-1)") {
    Triple t = uturn_triple();
    const double y = 1e-4;
    auto pts = resonance_points(t, cplx(1.0, y), Window{cplx(0, 0), 0.5});
    REQUIRE(pts.size() == 2);
    // exact positions: r = +-sqrt(z^2 - 1)
    const cplx z(1.0, y);
    const cplx rexact = std::sqrt(z * z - 1.0);
    bool plus_found = false, minus_found = false;
    for (const auto& p : pts) {
        if (std::abs(p.r - rexact) < 1e-8) plus_found = true;
        if (std::abs(p.r + rexact) < 1e-8) minus_found = true;
    }
    CHECK(plus_found);
    CHECK(minus_found);
    CHECK(pts[0].r.imag() * pts[1].r.imag() < 0.0); // one per half-plane
}

TEST_CASE("segment locator finds simple crossings of diag(1,-1)+rI") {
    Triple t = diag_pm1_identity();
    auto pts = real_resonance_points_on_segment(0.0, t.H, t.V, -2.0, 2.0);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].r.real() == doctest::Approx(-1.0));
    CHECK(pts[1].r.real() == doctest::Approx(1.0));
    CHECK(pts[0].geo_mult == 1);
}

TEST_CASE("segment locator resolves the cubic instance as one triple point") {
    Triple t = order3_triple();
    auto pts = real_resonance_points_on_segment(0.0, t.H, t.V, -1.0, 1.0);
    REQUIRE(pts.size() == 1);
    CHECK(std::abs(pts[0].r.real()) < 1e-5);
    CHECK(pts[0].alg_mult == 3);
    CHECK(pts[0].geo_mult == 1);
}

TEST_CASE("an out-of-range threshold yields no points") {
    Triple t = diag_pm1_identity();
    auto pts = real_resonance_points_on_segment(5.0, t.H, t.V, -2.0, 2.0);
    CHECK(pts.empty());
}

TEST_CASE("resonant endpoints are rejected") {
    Triple t = diag_pm1_identity();
    CHECK_THROWS_AS(
        (void)real_resonance_points_on_segment(0.0, t.H, t.V, -1.0, 2.0), Error);
}

TEST_CASE("group membership of the U-turn point") {
    Triple t = uturn_triple();
    auto mem = group_members(t, cplx(0, 0), 2, cplx(1.0, 1e-6), 0.1);
    REQUIRE(mem.size() == 2);
    CHECK(mem[0].r.imag() * mem[1].r.imag() < 0.0);
}

TEST_CASE("1x1 group member moves onto the upper half-plane") {
    Mat h = Mat::Zero(1, 1), v = Mat::Identity(1, 1);
    Triple t(0.0, HermitianMatrix(h), HermitianMatrix(v));
    const double y = 1e-4;
    auto mem = group_members(t, cplx(0, 0), 1, cplx(0.0, y), 0.1);
    REQUIRE(mem.size() == 1);
    CHECK(std::abs(mem[0].r - cplx(0.0, y)) < 1e-10); // r(z) = z exactly
}

TEST_CASE("cubic group keeps total multiplicity 3 off axis") {
    Triple t = order3_triple();
    auto mem = group_members(t, cplx(0, 0), 3, cplx(0.0, 1e-6), 0.2);
    int total = 0;
    for (const auto& p : mem) total += p.alg_mult;
    CHECK(total == 3);
    CHECK(mem.size() == 3);
}

TEST_CASE("group leak is detected when the radius is too small") {
    Triple t = uturn_triple();
    // at y = 1e-2 the members sit ~0.14 from the origin, outside radius 0.05
    CHECK_THROWS_AS((void)group_members(t, cplx(0, 0), 2, cplx(1.0, 1e-2), 0.05), Error);
}

TEST_CASE("conjugate symmetry of the member set") {
    Rng rng(23);
    Triple t = random_triple(rng, 5);
    const cplx z(0.05, 0.13);
    auto a = resonance_points(t, z, Window{cplx(0, 0), 1.5});
    auto b = resonance_points(t, std::conj(z), Window{cplx(0, 0), 1.5});
    REQUIRE(a.size() == b.size());
    for (const auto& p : a) {
        bool matched = false;
        for (const auto& q : b)
            if (std::abs(std::conj(p.r) - q.r) < 1e-7 && p.alg_mult == q.alg_mult) matched = true;
        CHECK(matched);
    }
}

TEST_CASE("adaptive clustering keeps defective clusters together") {
    // synthetic: a defective triple eigenvalue splatters like eps^(1/3)
    std::vector<cplx> vals;
    const double spread = 3e-6;
    for (int k = 0; k < 3; ++k)
        vals.push_back(cplx(0.5, 0.0) + spread * std::polar(1.0, 2.0 * M_PI * k / 3.0));
    vals.push_back(cplx(0.9, 0.0));
    auto clusters = cluster_values(vals, 1.0, true, Config{});
    REQUIRE(clusters.size() == 2);
    const size_t big = clusters[0].size() > clusters[1].size() ? 0 : 1;
    CHECK(clusters[big].size() == 3);
}
