#include <doctest.h>

#include "sfl/flow.hpp"
#include "sfl/generate.hpp"

using namespace sfl;

namespace {

OperatorPath scalar_path(double a, double b) {
    Mat ma(1, 1), mb(1, 1);
    ma(0, 0) = a;
    mb(0, 0) = b;
    return OperatorPath({HermitianMatrix(ma), HermitianMatrix(mb)});
}

OperatorPath diag_path() {
    // diag(1,-1) + r I for r in [-2, 2]
    Mat h0 = Mat::Zero(2, 2), h1 = Mat::Zero(2, 2);
    h0(0, 0) = -1.0;
    h0(1, 1) = -3.0;
    h1(0, 0) = 3.0;
    h1(1, 1) = 1.0;
    return OperatorPath({HermitianMatrix(h0), HermitianMatrix(h1)});
}

OperatorPath uturn_path() {
    // H_r = [[r,1],[1,-r]] for r in [-1,1], threshold lambda = 1
    Mat h0(2, 2), h1(2, 2);
    h0 << -1, 1, 1, 1;
    h1 << 1, 1, 1, -1;
    return OperatorPath({HermitianMatrix(h0), HermitianMatrix(h1)});
}

} // namespace

TEST_CASE("normalisation path: all four engines give 1") {
    OperatorPath f = scalar_path(-0.7, 1.3);
    FlowReport rep = flow_report(f, 0.0);
    CHECK(rep.tri == 1);
    CHECK(rep.intersection == 1);
    CHECK(rep.endpoint == 1);
    CHECK(std::abs(rep.ssf - 1.0) < 0.01);
    CHECK(rep.agreement);
}

TEST_CASE("diag path: two up-crossings give 2") {
    FlowReport rep = flow_report(diag_path(), 0.0);
    CHECK(rep.tri == 2);
    CHECK(rep.intersection == 2);
    CHECK(rep.endpoint == 2);
    CHECK(std::abs(rep.ssf - 2.0) < 0.02);
    CHECK(rep.agreement);
    REQUIRE(rep.per_resonance.size() == 2);
    CHECK(rep.per_resonance[0].index == 1);
    CHECK(rep.per_resonance[1].index == 1);
}

TEST_CASE("U-turn path: all engines give 0") {
    FlowReport rep = flow_report(uturn_path(), 1.0);
    CHECK(rep.tri == 0);
    CHECK(rep.intersection == 0);
    CHECK(rep.endpoint == 0);
    CHECK(std::abs(rep.ssf) < 0.02);
    CHECK(rep.agreement);
}

TEST_CASE("reversal antisymmetry") {
    OperatorPath f = diag_path();
    CHECK(total_resonance_index(f.reversed(), 0.0).total == -2);
    CHECK(endpoint_flow(f.reversed(), 0.0) == -2);
}

TEST_CASE("resonant vertex is rejected") {
    Mat h0 = Mat::Zero(1, 1), h1 = Mat::Zero(1, 1);
    h1(0, 0) = 1.0;
    OperatorPath f({HermitianMatrix(h0), HermitianMatrix(h1)});
    CHECK_THROWS_AS((void)total_resonance_index(f, 0.0), Error);
}

TEST_CASE("essential codimension equals its kernel-cokernel definition") {
    Rng rng(59);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 3 + static_cast<int>(subseed(59, trial) % 4);
        // random orthogonal projections of random ranks
        Mat a = Mat::Zero(n, n), b = Mat::Zero(n, n);
        std::uniform_int_distribution<int> rk(0, n);
        HermitianMatrix ha = random_hermitian(rng, n);
        HermitianMatrix hb = random_hermitian(rng, n);
        Spectrum sa = eigh(ha), sb = eigh(hb);
        const int ra = rk(rng), rb = rk(rng);
        for (int i = 0; i < ra; ++i)
            a += sa.eigenvectors.col(i) * sa.eigenvectors.col(i).adjoint();
        for (int i = 0; i < rb; ++i)
            b += sb.eigenvectors.col(i) * sb.eigenvectors.col(i).adjoint();
        CHECK(essential_codimension(a, b) == essential_codimension_by_kernels(a, b));
        CHECK(essential_codimension(a, b) == rb - ra);
    }
}

TEST_CASE("endpoint flow telescopes over partitions") {
    OperatorPath f = diag_path();
    // split the single segment into three
    const Mat h0 = f.vertices[0].mat(), h1 = f.vertices[1].mat();
    OperatorPath g({HermitianMatrix(h0), HermitianMatrix(0.7 * h0 + 0.3 * h1),
                    HermitianMatrix(0.2 * h0 + 0.8 * h1), HermitianMatrix(h1)});
    CHECK(endpoint_flow(g, 0.0) == endpoint_flow(f, 0.0));
    CHECK(total_resonance_index(g, 0.0).total == 2);
}

TEST_CASE("ssf quadrature matches the arctan closed form on the scalar path") {
    OperatorPath f = scalar_path(-0.5, 1.5);
    const double val = ssf_poisson(f, 0.0);
    CHECK(std::abs(val - 1.0) < 0.01);
}

TEST_CASE("Robbin-Salamon axiom suite passes on seeded trials") {
    Config cfg;
    RsAxiomReport rep = rs_axiom_suite(cfg, 2024, 6);
    for (const auto& ax : rep.axioms) {
        INFO(ax.axiom);
        CHECK(ax.failures == 0);
        CHECK(ax.trials > 0);
    }
}

TEST_CASE("stability: U-turn perturbations sum to 0, cubic to +1") {
    {
        Triple t = uturn_triple();
        StabilityReport rep = stability_check(t, locate_at(t, 0.0), 1e-3, 6, 77);
        CHECK(rep.failures == 0);
    }
    {
        Triple t = order3_triple();
        StabilityReport rep = stability_check(t, locate_at(t, 0.0), 1e-3, 6, 78);
        CHECK(rep.failures == 0);
    }
}

TEST_CASE("direct sum of the normalisation path with its reverse gives 0") {
    Mat a0(1, 1), a1(1, 1);
    a0(0, 0) = -0.8;
    a1(0, 0) = 0.9;
    Mat d0 = Mat::Zero(2, 2), d1 = Mat::Zero(2, 2);
    d0.topLeftCorner(1, 1) = a0;
    d0.bottomRightCorner(1, 1) = a1;
    d1.topLeftCorner(1, 1) = a1;
    d1.bottomRightCorner(1, 1) = a0;
    OperatorPath f({HermitianMatrix(d0), HermitianMatrix(d1)});
    CHECK(total_resonance_index(f, 0.0).total == 0);
    CHECK(endpoint_flow(f, 0.0) == 0);
}
