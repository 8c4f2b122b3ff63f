#include "sfl/locator.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace sfl {

namespace {

// A defective eigenvalue of multiplicity k splatters into a cluster of
// diameter ~ (machine eps * cond)^(1/k); clusters of size k are accepted up
// to that radius when the spectral parameter is real. Off the real axis all
// group points are simple and only the measurement tolerance applies.
double cluster_threshold(double scale, int merged_size, bool defective_ok, const Config& cfg) {
    double thr = cfg.mult_gap;
    if (defective_ok && merged_size > 1)
        thr = std::max(thr, 10.0 * std::pow(cfg.cluster_eps, 1.0 / merged_size));
    return scale * thr;
}

cplx centroid(const std::vector<cplx>& vals, const std::vector<int>& idx) {
    cplx c{};
    for (int i : idx) c += vals[i];
    return c / static_cast<double>(idx.size());
}

struct BasePoint {
    cplx s0;
    Vec sigma; // eigenvalues of A_z(s0)
};

// Candidates on rings around the window, at angles designed not to line up
// with the real axis where the poles of A_z(s) usually sit. 1/||A||_F bounds
// the distance from s0 to the nearest pole, so the cheap score needs only the
// winner to be eigendecomposed.
std::optional<BasePoint> search_base_point(const Triple& t, cplx z, const Window& w, const Config& cfg) {
    const double r0 = std::max(w.radius, 0.1);
    std::optional<cplx> best_s0;
    Mat best_a;
    double best_score = -1.0;
    for (double g : {1.6, 2.4, 3.5, 5.0}) {
        for (int j = 0; j < 8; ++j) {
            const double th = 2.0 * M_PI * j / 8.0 + 0.39;
            const cplx s0 = w.center + g * r0 * cplx(std::cos(th), std::sin(th));
            Mat a;
            try {
                a = a_operator(t, z, s0, cfg);
            } catch (const Error&) {
                continue;
            }
            const double score = 1.0 / std::max(a.norm(), 1e-300);
            if (score > best_score) {
                best_score = score;
                best_s0 = s0;
                best_a = std::move(a);
            }
        }
        if (best_score > 0.2 * r0) break;
    }
    if (!best_s0) return std::nullopt;
    Eigen::ComplexEigenSolver<Mat> es(best_a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) return std::nullopt;
    return BasePoint{*best_s0, es.eigenvalues()};
}

} // namespace

std::vector<std::vector<int>> cluster_values(const std::vector<cplx>& vals, double scale,
                                             bool defective_ok, const Config& cfg) {
    const int n = static_cast<int>(vals.size());
    if (n == 0) return {};

    // single-linkage dendrogram via Kruskal on all pairs
    struct Node {
        int left = -1, right = -1;
        std::vector<int> members;
    };
    std::vector<Node> nodes(n);
    for (int i = 0; i < n; ++i) nodes[i].members = {i};
    std::vector<int> root(n);
    for (int i = 0; i < n; ++i) root[i] = i;
    std::function<int(int)> find = [&](int i) { return root[i] == i ? i : root[i] = find(root[i]); };

    struct Edge {
        double d;
        int i, j;
    };
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({std::abs(vals[i] - vals[j]), i, j});
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });

    std::vector<int> node_of(n);
    for (int i = 0; i < n; ++i) node_of[i] = i;
    int top = -1;
    for (const auto& e : edges) {
        const int a = find(e.i), b = find(e.j);
        if (a == b) continue;
        Node merged;
        merged.left = node_of[a];
        merged.right = node_of[b];
        merged.members = nodes[node_of[a]].members;
        merged.members.insert(merged.members.end(), nodes[node_of[b]].members.begin(),
                              nodes[node_of[b]].members.end());
        nodes.push_back(std::move(merged));
        root[b] = a;
        node_of[a] = static_cast<int>(nodes.size()) - 1;
        top = node_of[a];
    }
    if (top < 0) top = 0; // single point

    // top-down cut: keep the largest subtrees whose diameter is plausible for
    // their size
    auto diameter = [&](const std::vector<int>& idx) {
        double d = 0.0;
        for (size_t a = 0; a < idx.size(); ++a)
            for (size_t b = a + 1; b < idx.size(); ++b)
                d = std::max(d, std::abs(vals[idx[a]] - vals[idx[b]]));
        return d;
    };
    std::vector<std::vector<int>> out;
    std::vector<int> stack{top};
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        const Node& nd = nodes[id];
        const int k = static_cast<int>(nd.members.size());
        if (k == 1 || diameter(nd.members) <= cluster_threshold(scale, k, defective_ok, cfg)) {
            out.push_back(nd.members);
        } else {
            stack.push_back(nd.left);
            stack.push_back(nd.right);
        }
    }
    return out;
}

std::vector<ResonancePoint> resonance_points(const Triple& t, cplx z, const Window& window,
                                             const Config& cfg) {
    auto bp = search_base_point(t, z, window, cfg);
    if (!bp) fail(Errc::NoRegularBasePoint, "no regular base point near window");

    std::vector<cplx> mapped;
    for (int i = 0; i < bp->sigma.size(); ++i) {
        const cplx sg = bp->sigma[i];
        if (std::abs(sg) > cfg.sigma_floor) mapped.push_back(bp->s0 - 1.0 / sg);
    }
    const double scale = std::max(1.0, std::abs(window.center) + window.radius);
    const bool z_real = std::abs(z.imag()) < 1e-14 * std::max(1.0, std::abs(z.real()));
    auto clusters = cluster_values(mapped, scale, z_real, cfg);

    std::vector<ResonancePoint> out;
    for (const auto& cl : clusters) {
        cplx r = centroid(mapped, cl);
        if (!window.contains(r, 1e-9 * scale)) continue;
        ResonancePoint p;
        p.z = z;
        p.alg_mult = static_cast<int>(cl.size());
        // For real z a cluster straddling the real axis is a real point whose
        // defective eigenvalue split off symmetrically; snap it back.
        if (z_real && std::abs(r.imag()) <= cluster_threshold(scale, p.alg_mult, z_real, cfg))
            r = cplx(r.real(), 0.0);
        p.r = r;
        // geometric multiplicity = dim ker(H + rV - z); the cluster centroid
        // benefits from trace cancellation, so a tight kernel threshold works
        // even for defective points
        Mat m = t.h_at(p.r);
        m.diagonal().array() -= z;
        Eigen::JacobiSVD<Mat> svd(m);
        const auto& sv = svd.singularValues();
        const double kthr = 1e-6 * std::max(1.0, std::abs(p.r)) * (1.0 + t.V.norm());
        int null_dim = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv[i] <= kthr) ++null_dim;
        p.geo_mult = std::max(1, null_dim);
        if (p.geo_mult > p.alg_mult) p.geo_mult = p.alg_mult;
        out.push_back(p);
    }
    // flag near-coincident distinct points rather than guessing a merge
    for (size_t i = 0; i < out.size(); ++i)
        for (size_t j = i + 1; j < out.size(); ++j)
            if (std::abs(out[i].r - out[j].r) < 10.0 * cfg.mult_gap * scale)
                out[i].resolved = out[j].resolved = false;
    std::sort(out.begin(), out.end(), [](const ResonancePoint& a, const ResonancePoint& b) {
        if (a.r.real() != b.r.real()) return a.r.real() < b.r.real();
        return a.r.imag() < b.r.imag();
    });
    return out;
}

std::vector<ResonancePoint> real_resonance_points_on_segment(double lambda, const HermitianMatrix& H,
                                                             const Direction& V, double a, double b,
                                                             const Config& cfg) {
    if (!(a < b)) fail(Errc::InvalidInput, "need a < b");
    Triple t(lambda, H, V);
    const double margin = cfg.gap_tol * t.scale();
    if (dist_to_spectrum(t.h_at(a), lambda) <= margin)
        fail(Errc::ResonantEndpoint, "lambda in spectrum at segment start");
    if (dist_to_spectrum(t.h_at(b), lambda) <= margin)
        fail(Errc::ResonantEndpoint, "lambda in spectrum at segment end");

    if (V.norm() == 0.0) return {};

    Window w{cplx(0.5 * (a + b), 0.0), 0.5 * (b - a)};
    auto pts = resonance_points(t, lambda, w, cfg);
    const double scale = std::max(1.0, std::max(std::abs(a), std::abs(b)));

    std::vector<ResonancePoint> out;
    for (auto& p : pts) {
        if (std::abs(p.r.imag()) > cluster_threshold(scale, p.alg_mult, true, cfg))
            continue; // genuinely complex
        double r = p.r.real();
        if (!(r > a + margin && r < b - margin)) continue;
        // polish simple crossings with Newton on the nearest eigenvalue branch
        if (p.alg_mult == 1) {
            for (int it = 0; it < 3; ++it) {
                Spectrum sp = eigh(Mat(t.h_at(r)), cfg);
                int imin = 0;
                (sp.eigenvalues.array() - lambda).abs().minCoeff(&imin);
                const Vec phi = sp.eigenvectors.col(imin);
                const double deriv = std::real(phi.dot(V.mat() * phi));
                if (std::abs(deriv) < 1e-8) break;
                r -= (sp.eigenvalues[imin] - lambda) / deriv;
            }
        }
        p.r = cplx(r, 0.0);
        out.push_back(p);
    }
    std::sort(out.begin(), out.end(),
              [](const ResonancePoint& x, const ResonancePoint& y) { return x.r.real() < y.r.real(); });
    return out;
}

std::vector<ResonancePoint> group_members(const Triple& t, cplx r_parent, int parent_N, cplx z,
                                          double radius, const Config& cfg) {
    Window w{r_parent, radius};
    auto pts = resonance_points(t, z, w, cfg);
    int total = 0;
    for (auto& p : pts) {
        p.group_id = 0;
        total += p.alg_mult;
    }
    if (total != parent_N)
        fail(Errc::GroupLeak, "group multiplicity " + std::to_string(total) + " != parent " +
                                  std::to_string(parent_N));
    return pts;
}

ResonancePoint locate_at(const Triple& t, double r_hint, const Config& cfg) {
    auto pts = resonance_points(t, t.lambda, Window{cplx(r_hint, 0.0), 0.05 * (1.0 + std::abs(r_hint))},
                                cfg);
    const ResonancePoint* best = nullptr;
    for (const auto& p : pts) {
        if (std::abs(p.r.imag()) > 1e-8) continue;
        if (!best || std::abs(p.r - r_hint) < std::abs(best->r - r_hint)) best = &p;
    }
    if (!best) fail(Errc::InvalidInput, "no real resonance point near " + std::to_string(r_hint));
    ResonancePoint out = *best;
    out.r = cplx(out.r.real(), 0.0);
    return out;
}

double default_group_radius(const Triple& t, double lambda, cplx r, const Config& cfg) {
    Window w{r, 1.0};
    auto pts = resonance_points(t, lambda, w, cfg);
    double nearest = std::numeric_limits<double>::infinity();
    const double scale = std::max(1.0, std::abs(r) + 1.0);
    for (const auto& p : pts) {
        const double d = std::abs(p.r - r);
        if (d > 10.0 * cfg.mult_gap * scale) nearest = std::min(nearest, d);
    }
    return std::min(0.5 * nearest, cfg.group_radius_cap);
}

} // namespace sfl
