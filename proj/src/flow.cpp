#include "sfl/flow.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>

#include "sfl/generate.hpp"
#include "sfl/monodromy.hpp"

namespace sfl {

namespace {

Triple segment_triple(const OperatorPath& path, int seg, double lambda) {
    return Triple(lambda, path.vertices[seg], path.vertices[seg + 1] - path.vertices[seg]);
}

std::vector<ResonancePoint> segment_points(const OperatorPath& path, int seg, double lambda,
                                           const Config& cfg) {
    const Triple t = segment_triple(path, seg, lambda);
    try {
        return real_resonance_points_on_segment(lambda, t.H, t.V, 0.0, 1.0, cfg);
    } catch (const Error& e) {
        if (e.code() == Errc::ResonantEndpoint)
            fail(Errc::ResonantVertex, "path vertex resonant at lambda");
        throw;
    }
}

} // namespace

TriBreakdown total_resonance_index(const OperatorPath& path, double lambda, const Config& cfg) {
    TriBreakdown out;
    for (int seg = 0; seg < path.segments(); ++seg) {
        const Triple t = segment_triple(path, seg, lambda);
        for (const auto& p : segment_points(path, seg, lambda, cfg)) {
            ResonanceContribution c;
            c.segment = seg;
            c.r = p.r.real();
            c.index = resonance_index(t, p, cfg).index;
            out.contributions.push_back(c);
            out.total += c.index;
        }
    }
    return out;
}

int total_intersection_number(const OperatorPath& path, double lambda, const Config& cfg) {
    int total = 0;
    for (int seg = 0; seg < path.segments(); ++seg) {
        const Triple t = segment_triple(path, seg, lambda);
        for (const auto& p : segment_points(path, seg, lambda, cfg))
            total += intersection_number(t, p, cfg);
    }
    return total;
}

int endpoint_flow(const OperatorPath& path, double lambda, const Config& cfg) {
    return counting_above(path.vertices.back(), lambda, cfg) -
           counting_above(path.vertices.front(), lambda, cfg);
}

namespace {

// 8-point Gauss-Legendre nodes and weights on [-1, 1]
constexpr double kGlx[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                            0.9602898564975363};
constexpr double kGlw[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                            0.1012285362903763};

double ssf_integrand(const Triple& t, double r, double y) {
    Eigen::SelfAdjointEigenSolver<Mat> es(t.h_at(r));
    double acc = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double vd = std::real(es.eigenvectors().col(i).dot(t.V.mat() * es.eigenvectors().col(i)));
        const double d = es.eigenvalues()[i] - t.lambda;
        acc += vd * y / (d * d + y * y);
    }
    return acc / M_PI;
}

double ssf_segment_at_y(const Triple& t, const std::vector<double>& points, double y) {
    // panel breakpoints refine dyadically toward each resonance point
    std::set<double> cuts{0.0, 1.0};
    for (double r0 : points) {
        for (int k = -3; k <= 60; ++k) {
            const double off = y * std::pow(2.0, k);
            if (off > 2.0) break;
            for (double s : {r0 - off, r0 + off})
                if (s > 0.0 && s < 1.0) cuts.insert(s);
        }
        if (r0 > 0.0 && r0 < 1.0) cuts.insert(r0);
    }
    for (int i = 1; i < 8; ++i) cuts.insert(i / 8.0);

    double acc = 0.0;
    double prev = *cuts.begin();
    for (auto it = std::next(cuts.begin()); it != cuts.end(); ++it) {
        const double a = prev, b = *it;
        prev = b;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        if (half <= 0.0) continue;
        for (int q = 0; q < 4; ++q) {
            acc += half * kGlw[q] * ssf_integrand(t, mid + half * kGlx[q], y);
            acc += half * kGlw[q] * ssf_integrand(t, mid - half * kGlx[q], y);
        }
    }
    return acc;
}

} // namespace

double ssf_poisson(const OperatorPath& path, double lambda, const Config& cfg) {
    double total = 0.0;
    for (int seg = 0; seg < path.segments(); ++seg) {
        const Triple t = segment_triple(path, seg, lambda);
        if (t.V.norm() == 0.0) continue;
        std::vector<double> pts;
        for (const auto& p : segment_points(path, seg, lambda, cfg)) pts.push_back(p.r.real());
        const double scale = t.scale();
        // two smallest y of the schedule, Richardson-extrapolated to y -> 0
        const double yb = cfg.y_min_factor * scale;
        const double ya = yb * cfg.y_ratio;
        const double fa = ssf_segment_at_y(t, pts, ya);
        const double fb = ssf_segment_at_y(t, pts, yb);
        total += (cfg.y_ratio * fb - fa) / (cfg.y_ratio - 1.0);
    }
    return total;
}

FlowReport flow_report(const OperatorPath& path, double lambda, const Config& cfg) {
    FlowReport rep;
    TriBreakdown tri = total_resonance_index(path, lambda, cfg);
    rep.tri = tri.total;
    rep.per_resonance = tri.contributions;
    rep.intersection = 0;
    size_t k = 0;
    for (int seg = 0; seg < path.segments(); ++seg) {
        const Triple t = segment_triple(path, seg, lambda);
        for (const auto& p : segment_points(path, seg, lambda, cfg)) {
            const int in = intersection_number(t, p, cfg);
            if (k < rep.per_resonance.size()) rep.per_resonance[k].intersection = in;
            ++k;
            rep.intersection += in;
        }
    }
    rep.endpoint = endpoint_flow(path, lambda, cfg);
    rep.ssf = ssf_poisson(path, lambda, cfg);
    rep.agreement = rep.tri == rep.intersection && rep.tri == rep.endpoint &&
                    std::abs(rep.ssf - rep.tri) <= cfg.ssf_tol;
    return rep;
}

int essential_codimension(const Mat& P, const Mat& Q, const Config& cfg) {
    return svd_rank(Q, cfg.rank_tol) - svd_rank(P, cfg.rank_tol);
}

int essential_codimension_by_kernels(const Mat& P, const Mat& Q, const Config& cfg) {
    const Mat bp = range_basis(P, cfg.rank_tol);
    const Mat bq = range_basis(Q, cfg.rank_tol);
    int r = 0;
    if (bp.cols() > 0 && bq.cols() > 0) {
        const Mat t = bp.adjoint() * bq; // PQ as a map im Q -> im P
        r = svd_rank(t, cfg.rank_tol);
    }
    const int ker = static_cast<int>(bq.cols()) - r;
    const int coker = static_cast<int>(bp.cols()) - r;
    return ker - coker;
}

namespace {

OperatorPath perturb_interior(const OperatorPath& path, Rng& rng, double eps, double lambda) {
    std::vector<HermitianMatrix> vs = path.vertices;
    for (size_t i = 1; i + 1 < vs.size(); ++i) {
        for (int attempt = 0; attempt < 100; ++attempt) {
            HermitianMatrix cand = vs[i] + random_hermitian(rng, path.dim(), eps);
            if (dist_to_spectrum(cand.mat(), lambda) > 0.02 * (1.0 + cand.norm())) {
                vs[i] = cand;
                break;
            }
        }
    }
    return OperatorPath(vs);
}

} // namespace

RsAxiomReport rs_axiom_suite(const Config& cfg, std::uint64_t seed, int trials) {
    RsAxiomReport rep;
    std::uniform_int_distribution<int> dims(2, 5);
    std::uniform_int_distribution<int> segs(1, 3);

    AxiomResult homotopy{"homotopy"};
    for (int i = 0; i < trials; ++i) {
        Rng rng(subseed(seed, 1000 + i));
        ++homotopy.trials;
        OperatorPath f = random_path(rng, dims(rng), 1 + segs(rng), 0.0);
        OperatorPath g = perturb_interior(f, rng, 1e-2, 0.0);
        const int tf = total_resonance_index(f, 0.0, cfg).total;
        const int tg = total_resonance_index(g, 0.0, cfg).total;
        if (tf != tg) {
            ++homotopy.failures;
            homotopy.counterexamples.push_back("trial " + std::to_string(i) + ": " +
                                               std::to_string(tf) + " vs " + std::to_string(tg));
        }
    }
    rep.axioms.push_back(std::move(homotopy));

    AxiomResult constancy{"constancy"};
    for (int i = 0; i < trials; ++i) {
        Rng rng(subseed(seed, 2000 + i));
        ++constancy.trials;
        OperatorPath f = random_path(rng, dims(rng), 1, 0.0);
        OperatorPath c({f.vertices[0], f.vertices[0]});
        if (total_resonance_index(c, 0.0, cfg).total != 0) ++constancy.failures;
    }
    rep.axioms.push_back(std::move(constancy));

    AxiomResult catenation{"catenation"};
    for (int i = 0; i < trials; ++i) {
        Rng rng(subseed(seed, 3000 + i));
        ++catenation.trials;
        const int n = dims(rng);
        OperatorPath f = random_path(rng, n, 1, 0.0);
        double c = 0.0;
        HermitianMatrix mid = f.vertices[0];
        bool ok = false;
        for (int attempt = 0; attempt < 50; ++attempt) {
            c = 0.3 + 0.4 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            mid = f.vertices[0] + (f.vertices[1] - f.vertices[0]).scaled(c);
            if (dist_to_spectrum(mid.mat(), 0.0) > 0.02 * (1.0 + mid.norm())) {
                ok = true;
                break;
            }
        }
        if (!ok) continue;
        const int whole = total_resonance_index(f, 0.0, cfg).total;
        const int first = total_resonance_index(OperatorPath({f.vertices[0], mid}), 0.0, cfg).total;
        const int second = total_resonance_index(OperatorPath({mid, f.vertices[1]}), 0.0, cfg).total;
        if (whole != first + second) {
            ++catenation.failures;
            catenation.counterexamples.push_back("trial " + std::to_string(i));
        }
    }
    rep.axioms.push_back(std::move(catenation));

    AxiomResult dsum{"direct_sum"};
    for (int i = 0; i < trials; ++i) {
        Rng rng(subseed(seed, 4000 + i));
        ++dsum.trials;
        const int na = dims(rng), nb = dims(rng), ns = segs(rng);
        OperatorPath f = random_path(rng, na, ns, 0.0);
        OperatorPath g = random_path(rng, nb, ns, 0.0);
        std::vector<HermitianMatrix> vs;
        for (int j = 0; j <= ns; ++j) {
            Mat m = Mat::Zero(na + nb, na + nb);
            m.topLeftCorner(na, na) = f.vertices[j].mat();
            m.bottomRightCorner(nb, nb) = g.vertices[j].mat();
            vs.push_back(HermitianMatrix(m));
        }
        const int sum = total_resonance_index(OperatorPath(vs), 0.0, cfg).total;
        const int parts = total_resonance_index(f, 0.0, cfg).total +
                          total_resonance_index(g, 0.0, cfg).total;
        if (sum != parts) {
            ++dsum.failures;
            dsum.counterexamples.push_back("trial " + std::to_string(i));
        }
    }
    rep.axioms.push_back(std::move(dsum));

    AxiomResult norm{"normalisation"};
    for (int i = 0; i < trials; ++i) {
        Rng rng(subseed(seed, 5000 + i));
        ++norm.trials;
        const double a = 0.3 + std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const double b = 0.3 + std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        Mat ma(1, 1), mb(1, 1);
        ma(0, 0) = -a;
        mb(0, 0) = b;
        OperatorPath f({HermitianMatrix(ma), HermitianMatrix(mb)});
        if (total_resonance_index(f, 0.0, cfg).total != 1) ++norm.failures;
    }
    rep.axioms.push_back(std::move(norm));
    return rep;
}

StabilityReport stability_check(const Triple& t, const ResonancePoint& r, double perturbation_size,
                                int trials, std::uint64_t seed, const Config& cfg) {
    StabilityReport rep;
    const int base = resonance_index(t, r, cfg).index;
    const HermitianMatrix Hr = t.H + t.V.scaled(r.r.real());
    const double rho = default_group_radius(t, t.lambda, r.r, cfg);

    // the split points sit ~perturbation_size apart with eigenvalue slopes of
    // the same order, so their half-plane counts only settle once y is well
    // below perturbation_size^2
    Config inner = cfg;
    inner.y0_factor = cfg.y0_factor * perturbation_size * perturbation_size;
    inner.y_min_factor = std::max(cfg.y_min_factor * perturbation_size * perturbation_size, 1e-13);

    for (int i = 0; i < trials; ++i) {
        Rng rng(subseed(seed, 7000 + i));
        ++rep.trials;
        const bool perturb_direction = (i % 2 == 0);
        try {
            Triple tp = t;
            if (perturb_direction) {
                HermitianMatrix G = random_hermitian(rng, t.dim());
                HermitianMatrix W = t.V + G.scaled(perturbation_size * t.V.norm() / G.norm());
                tp = Triple(t.lambda, Hr, W);
            } else {
                HermitianMatrix G = random_hermitian(rng, t.dim());
                HermitianMatrix Hp = Hr + G.scaled(perturbation_size * (1.0 + Hr.norm()) / G.norm());
                tp = Triple(t.lambda, Hp, t.V);
            }
            auto pts = real_resonance_points_on_segment(t.lambda, tp.H, tp.V, -rho, rho, cfg);
            int sum = 0;
            for (const auto& p : pts) sum += resonance_index(tp, p, inner).index;
            if (sum != base) {
                ++rep.failures;
                rep.details.push_back("trial " + std::to_string(i) + ": sum " + std::to_string(sum) +
                                      " != base " + std::to_string(base));
            }
        } catch (const Error& e) {
            ++rep.failures;
            rep.details.push_back("trial " + std::to_string(i) + ": " + e.what());
        }
    }
    return rep;
}

} // namespace sfl
