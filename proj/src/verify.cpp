#include "sfl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "sfl/blockgeom.hpp"
#include "sfl/flow.hpp"
#include "sfl/generate.hpp"
#include "sfl/index.hpp"
#include "sfl/monodromy.hpp"
#include "sfl/parallel.hpp"

namespace sfl {

void VerifyReport::merge(const VerifyReport& other) {
    for (const auto& [key, st] : other.stats) {
        CheckStat& mine = stats[key];
        mine.checks += st.checks;
        mine.failures += st.failures;
        mine.worst = std::max(mine.worst, st.worst);
        for (const auto& n : st.notes)
            if (mine.notes.size() < 8) mine.notes.push_back(n);
    }
    numerical_errors += other.numerical_errors;
    for (const auto& n : other.error_notes)
        if (error_notes.size() < 16) error_notes.push_back(n);
}

namespace {

void check_core(const Triple& t, Rng& rng, VerifyReport& rep, const Config& cfg) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const cplx z(u(rng), 0.5 + 0.5 * std::abs(u(rng)));
    const cplx s(u(rng), u(rng));
    const cplx r(u(rng), u(rng));

    const Mat as = a_operator(t, z, s, cfg);
    const Mat ar = a_operator(t, z, r, cfg);
    const Mat id = Mat::Identity(t.dim(), t.dim());
    const double resid = ((id + (s - r) * ar) * as - ar).norm();
    rep.stats["core.resolvent_identity"].record(resid <= 1e-9 * std::max(1.0, ar.norm()), resid);

    const Mat bs = b_operator(t, z, s, cfg);
    const double intertwine = (bs * t.V.mat() - t.V.mat() * as).norm();
    rep.stats["core.b_intertwine"].record(intertwine <= 1e-10 * std::max(1.0, as.norm()) * t.scale(),
                                          intertwine);
    const Mat badj = b_operator(t, std::conj(z), std::conj(s), cfg);
    const double adj = (badj - as.adjoint()).norm();
    rep.stats["core.b_adjoint"].record(adj <= 1e-10 * std::max(1.0, as.norm()) * t.scale(), adj);

    Spectrum sp = eigh(t.H, cfg);
    const Mat rec = sp.eigenvectors *
                    sp.eigenvalues.asDiagonal().toDenseMatrix().cast<cplx>() *
                    sp.eigenvectors.adjoint();
    const double erec = (rec - t.H.mat()).norm();
    rep.stats["core.eigh_reconstruct"].record(erec <= cfg.eig_tol * std::max(1.0, t.H.norm()), erec);

    try {
        const double lam = t.lambda + 0.371;
        if (dist_to_spectrum(t.H.mat(), lam) > cfg.gap_tol * t.scale()) {
            int above = counting_above(t.H, lam, cfg);
            int below = 0;
            for (int i = 0; i < sp.eigenvalues.size(); ++i)
                if (sp.eigenvalues[i] < lam) ++below;
            rep.stats["core.counting_complement"].record(above + below == t.dim());
        }
    } catch (const Error&) {
    }
}

void check_locator(const Triple& t, Rng& rng, VerifyReport& rep, const Config& cfg) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const cplx z(t.lambda + 0.1 * u(rng), 0.02 + 0.2 * std::abs(u(rng)));
    const Window w{cplx(0.0, 0.0), 2.0};
    auto pts = resonance_points(t, z, w, cfg);
    auto conj_pts = resonance_points(t, std::conj(z), w, cfg);

    bool real_found = false;
    for (const auto& p : pts)
        if (std::abs(p.r.imag()) < 1e-10) real_found = true;
    rep.stats["locator.nonreal_z_no_real_points"].record(!real_found);

    bool sym = pts.size() == conj_pts.size();
    if (sym) {
        for (const auto& p : pts) {
            bool matched = false;
            for (const auto& q : conj_pts)
                if (std::abs(std::conj(p.r) - q.r) < 1e-6 * (1.0 + std::abs(p.r)) &&
                    p.alg_mult == q.alg_mult)
                    matched = true;
            if (!matched) sym = false;
        }
    }
    rep.stats["locator.conjugate_symmetry"].record(sym);
}

// battery applied to a single real resonance point; `deep` controls the
// expensive monodromy/eigenpath/block stages
void check_point(const Triple& t, const ResonancePoint& p, VerifyReport& rep, const Config& cfg,
                 bool deep) {
    const double scale = t.scale();
    RieszPair rp = riesz_pair(t, t.lambda, p.r, cfg);

    rep.stats["riesz.idem"].record(rp.res.idem <= 1e-8 * std::max(1.0, rp.P.norm()), rp.res.idem);
    rep.stats["riesz.nilp"].record(rp.res.nilp <= 1e-6, rp.res.nilp);
    rep.stats["riesz.reduce"].record(rp.res.reduce <= 1e-7, rp.res.reduce);
    rep.stats["riesz.commute"].record(rp.res.commute <= 1e-7, rp.res.commute);
    rep.stats["riesz.trace_integer"].record(rp.res.trace_dev <= 1e-6, rp.res.trace_dev);
    rep.stats["riesz.vp_qv"].record(rp.res.vp_qv <= 1e-7 * scale, rp.res.vp_qv);
    rep.stats["riesz.N_matches_locator"].record(rp.N == p.alg_mult);

    JordanProfile jp = jordan_profile(rp, cfg);
    rep.stats["riesz.profile_m"].record(jp.m == p.geo_mult);

    // resonance space staircase
    {
        int prev_dim = 0;
        bool mono = true;
        Mat prev_basis;
        for (int k = 1; k <= rp.order_d; ++k) {
            Mat yk = resonance_space(t, t.lambda, p.r, k, cfg);
            if (k == 1 && yk.cols() != jp.m) mono = false;
            if (yk.cols() < prev_dim) mono = false;
            if (k == rp.order_d && yk.cols() != rp.N) mono = false;
            if (prev_basis.cols() > 0) {
                const double angle = subspace_mismatch(rp.A * yk, prev_basis);
                rep.stats["riesz.A_maps_spaces"].record(angle <= 1e-5, angle);
            }
            prev_dim = static_cast<int>(yk.cols());
            prev_basis = std::move(yk);
        }
        rep.stats["riesz.space_staircase"].record(mono);
    }

    // orthogonality of distinct points of the same z
    {
        auto all_pts = resonance_points(t, t.lambda, Window{p.r, 1.0}, cfg);
        for (const auto& q : all_pts) {
            if (std::abs(q.r - p.r) < 1e-6) continue;
            if (std::abs(q.r.imag()) > 1e-10) continue;
            RieszPair rq = riesz_pair(t, t.lambda, q.r, cfg);
            const double cross = (rp.P * rq.P).norm();
            rep.stats["riesz.point_orthogonality"].record(cross <= 1e-6 * scale, cross);
        }
    }

    IndexSignatureCheck isc = index_signature_check(t, p, cfg);
    rep.stats["index.signature_equal"].record(isc.agree, 0.0,
                                              "index " + std::to_string(isc.index) + " sig " +
                                                  std::to_string(isc.signature));
    rep.stats["index.uturn_inequality"].record(std::abs(isc.index) <= p.geo_mult);

    {
        // negate the direction at the resonant operator: (lambda; H_r, -V)
        Triple tneg(t.lambda, t.H + t.V.scaled(p.r.real()), t.V.scaled(-1.0));
        const int ing = resonance_index(tneg, locate_at(tneg, 0.0, cfg), cfg).index;
        rep.stats["index.antisymmetry"].record(ing == -isc.index);
    }

    // direction reduction V -> V P_lambda
    {
        Mat vp = t.V.mat() * rp.P;
        vp = 0.5 * (vp + vp.adjoint().eval());
        const HermitianMatrix Hr = t.H + t.V.scaled(p.r.real());
        Triple tvp(t.lambda, Hr, HermitianMatrix(vp, 1e-6));
        const int ivp = resonance_index(tvp, locate_at(tvp, 0.0, cfg), cfg).index;
        rep.stats["index.reduction_invariance"].record(ivp == isc.index);

        const double rho = default_group_radius(t, t.lambda, p.r, cfg);
        double worst = 0.0;
        for (double soff : {0.31 * rho, -0.47 * rho}) {
            Mat m1 = Hr.mat() + soff * vp;
            m1.diagonal().array() -= t.lambda;
            Mat m2 = Hr.mat() + soff * t.V.mat();
            m2.diagonal().array() -= t.lambda;
            const Mat lhs = guarded_solve(m1, vp, cfg, "reduction check");
            const Mat rhs = guarded_solve(m2, vp, cfg, "reduction check");
            worst = std::max(worst, (lhs - rhs).norm());
        }
        rep.stats["index.resolvent_reduction"].record(worst <= 1e-6 * scale, worst);
    }

    if (rp.N == 1) {
        // local constancy for simple directions
        Rng prng(subseed(0x5151, static_cast<std::uint64_t>(p.r.real() * 1e6) + t.dim()));
        const HermitianMatrix Hr = t.H + t.V.scaled(p.r.real());
        HermitianMatrix G = random_hermitian(prng, t.dim());
        HermitianMatrix W = t.V + G.scaled(1e-3 * t.V.norm() / G.norm());
        Triple tw(t.lambda, Hr, W);
        const int iw = resonance_index(tw, locate_at(tw, 0.0, cfg), cfg).index;
        rep.stats["index.local_constancy"].record(iw == isc.index);
    }

    if (!deep) return;

    // --- monodromy ---
    MonodromyTrace trace = track_group(t, p, cfg.track_rho * (1.0 + std::abs(t.lambda)), cfg);
    auto cycles = cycle_decomposition(trace, jp);
    rep.stats["monodromy.cycle_jordan"].record(true); // mismatch throws

    auto branches = eigen_branches(t, p.r.real(), GridSpec{}, cfg);

    int inter = 0;
    for (auto& c : cycles) {
        c.sign = cycle_sign(t, p, trace, c, branches, cfg);
        inter += c.b_parity * c.sign;
        puiseux_leading(t, p, trace, c, cfg);
        rep.stats["monodromy.puiseux_slope"].record(
            std::abs(c.fit_slope - 1.0 / c.length) <= cfg.puiseux_slope_tol,
            std::abs(c.fit_slope - 1.0 / c.length));

        // one or two real members per side; two must straddle r_parent
        for (double th : {0.0, M_PI}) {
            const auto& pos = trace.at_angle(th);
            std::vector<double> reals;
            for (int mtrk : c.members)
                if (std::abs(pos[mtrk].imag()) <= 1e-5) reals.push_back(pos[mtrk].real());
            rep.stats["monodromy.real_member_count"].record(reals.size() <= 2);
            if (reals.size() == 2)
                rep.stats["monodromy.real_members_straddle"].record(
                    (reals[0] - p.r.real()) * (reals[1] - p.r.real()) < 0);
        }
    }
    rep.stats["monodromy.intersection_equals_index"].record(
        inter == isc.index, 0.0,
        "intersection " + std::to_string(inter) + " index " + std::to_string(isc.index));

    if (rp.N <= 5) {
        Mat sum = Mat::Zero(t.dim(), t.dim());
        for (const auto& c : cycles) {
            CycleProjection cp = cycle_projection(t, p, trace, c, rp.A, cfg);
            sum += cp.P_nu;
            rep.stats["monodromy.projection_idem"].record(cp.idem <= 1e-6 * scale, cp.idem);
            rep.stats["monodromy.projection_commute"].record(cp.commute_A <= 1e-6 * scale,
                                                             cp.commute_A);
            for (int k = 0; k < c.length; ++k) {
                const double mres = moment_limit_check(cp, p, rp.A, k);
                rep.stats["monodromy.moment_limit"].record(mres <= cfg.moment_tol * scale, mres);
            }
        }
        const double part = (sum - rp.P).norm();
        rep.stats["monodromy.projection_partition"].record(part <= 1e-7 * std::max(1.0, rp.P.norm()),
                                                           part);
    }

    // --- eigenpath ---
    {
        int sum_orders = 0;
        std::vector<int> orders;
        for (const auto& b : branches) {
            sum_orders += b.order;
            orders.push_back(b.order);
            rep.stats["eigenpath.order_consistent"].record(branch_order(b, t.V, cfg) == b.order);
        }
        std::sort(orders.begin(), orders.end(), std::greater<int>());
        rep.stats["eigenpath.sum_orders"].record(sum_orders == rp.N);
        rep.stats["eigenpath.structure_match"].record(orders == jp.sizes);

        OrthogonalityReport orep = orthogonality_suite(branches, t.V, cfg);
        rep.stats["eigenpath.orthogonality"].record(
            std::max(orep.max_cross, orep.max_within) <= 1e-5,
            std::max(orep.max_cross, orep.max_within));

        JordanBasisReport jb = jordan_basis(branches, rp, cfg);
        rep.stats["eigenpath.chain"].record(jb.max_chain_residual <= cfg.basis_tol * 10,
                                            jb.max_chain_residual);
        rep.stats["eigenpath.span"].record(jb.span_mismatch <= 1e-5, jb.span_mismatch);

        if (rp.order_d <= 3) {
            PReconstruction prc = reconstruct_P(branches, t.V, rp.P, cfg);
            rep.stats["eigenpath.reconstruct_P"].record(
                prc.compare_norm <= 1e-4 * std::max(1.0, rp.P.norm()), prc.compare_norm);
            rep.stats["eigenpath.hankel_pattern"].record(prc.hankel_residual <= 1e-5,
                                                         prc.hankel_residual);
        }
    }

    // --- block geometry ---
    {
        BlockDecomposition bd = block_split(t, p.r.real(), cfg);
        const int n = t.dim();
        Mat U(n, n);
        U << bd.U0, bd.U1;
        Mat hblk = Mat::Zero(n, n);
        hblk.topLeftCorner(bd.U0.cols(), bd.U0.cols()) = bd.Hhat;
        hblk.bottomRightCorner(bd.m(), bd.m()) = t.lambda * Mat::Identity(bd.m(), bd.m());
        const double reass = (U * hblk * U.adjoint() - t.h_at(p.r.real())).norm();
        rep.stats["block.reassembly"].record(reass <= 1e-8 * scale, reass);

        const double rho = default_group_radius(t, t.lambda, p.r, cfg);
        LaurentData ld = laurent_D(t, bd, rp.order_d, 0.4 * rho, cfg);
        rep.stats["block.d_resolvent_block"].record(ld.block_residual <= 1e-7 * scale,
                                                    ld.block_residual);
        for (double cres : ld.chain_residuals)
            rep.stats["block.laurent_chain"].record(cres <= 1e-5 * scale, cres);

        Mat apow = rp.P;
        for (int j = 1; j < rp.order_d; ++j) apow = rp.A * apow;
        Mat top = bd.U1 * ld.coeff(rp.order_d - 1) * bd.v.adjoint() * bd.U0.adjoint();
        if (rp.order_d == 1) top += bd.p_eig(); // A^0 = P carries the eigenspace identity
        const double dtop = (apow - top).norm();
        rep.stats["block.d_top_block"].record(dtop <= 1e-5 * scale, dtop);

        auto table = identity_S_A(t, bd, rp.P, rp.A, rp.Atilde, ld, cfg);
        for (const auto& [key, val] : table) {
            const bool relaxed = key.find("sum") != std::string::npos && key[0] != '(';
            rep.stats[relaxed ? "block.identity_unused" : "block.identity_SA"].record(
                val <= (relaxed ? 1e-5 : 1e-6) * scale, val, key);
        }

        PropertyAB ab = property_AB(bd, rp.P, rp.A, rp.order_d, cfg);
        if (jp.m == 1 || rp.order_d <= 2)
            rep.stats["block.property_A_trivial_cases"].record(ab.A, ab.a_mismatch);
        if (ab.B && !ab.A)
            rep.stats["block.property_B_without_A"].record(true, 0.0, "conjecture counterexample");

        for (int k = 2; k <= rp.order_d; ++k) {
            Mat yk = resonance_space(t, t.lambda, p.r, k, cfg);
            const double spanres = order_k_span_check(bd, yk, k, cfg);
            rep.stats["block.order_k_span"].record(spanres <= 1e-5, spanres);
        }

        for (int c = 0; c < bd.m(); ++c) {
            const double nv = (t.V.mat() * bd.U1.col(c)).norm();
            rep.stats["block.regular_V_nonzero"].record(nv > 1e-8 * std::max(1.0, t.V.norm()), -nv);
        }

        // tangency of the curve through the deepest eigenvector
        int longest = 0;
        for (size_t b = 1; b < branches.size(); ++b)
            if (branches[b].order > branches[longest].order) longest = static_cast<int>(b);
        std::vector<double> svals;
        const double s0 = std::min(0.1, 0.5 * rho);
        for (int k = 0; k <= 6; ++k) {
            svals.push_back(s0 * std::pow(0.5, k));
            svals.push_back(-s0 * std::pow(0.5, k));
        }
        try {
            auto curve = trace_resonance_curve(t, p.r.real(), branches[longest].phi_derivs[0],
                                               svals, rp.order_d, cfg);
            tangency_order(curve, rp.order_d, cfg);
            rep.stats["block.tangency_order"].record(true);
        } catch (const Error& e) {
            rep.stats["block.tangency_order"].record(false, 0.0, e.what());
        }
    }
}

void check_path(const OperatorPath& path, VerifyReport& rep, const Config& cfg) {
    FlowReport fr = flow_report(path, 0.0, cfg);
    rep.stats["flow.tri_eq_intersection"].record(fr.tri == fr.intersection);
    rep.stats["flow.tri_eq_endpoint"].record(fr.tri == fr.endpoint);
    rep.stats["flow.ssf_close"].record(std::abs(fr.ssf - fr.tri) <= cfg.ssf_tol,
                                       std::abs(fr.ssf - fr.tri));
    const int rev = total_resonance_index(path.reversed(), 0.0, cfg).total;
    rep.stats["flow.reversal_antisymmetry"].record(rev == -fr.tri);
}

VerifyReport run_trial(const Config& cfg, std::uint64_t seed, int i) {
    VerifyReport rep;
    Rng rng(subseed(seed, i));
    const int kind = i % 6;
    try {
        switch (kind) {
            case 0: {
                std::uniform_int_distribution<int> dims(2, 8);
                Triple t = random_triple(rng, dims(rng));
                check_core(t, rng, rep, cfg);
                check_locator(t, rng, rep, cfg);
                auto pts = real_resonance_points_on_segment(0.0, t.H, t.V, -1.2, 1.2, cfg);
                if (!pts.empty()) check_point(t, pts[pts.size() / 2], rep, cfg, /*deep=*/true);
                break;
            }
            case 1: {
                const int d = 2 + (i / 6) % 3;
                std::uniform_int_distribution<int> extra(0, 2);
                Triple t = order_d_triple(rng, d, std::max(2, d) + extra(rng));
                check_point(t, locate_at(t, 0.0, cfg), rep, cfg, true);
                break;
            }
            case 2: {
                const int m = 2 + (i / 6) % 2;
                std::uniform_int_distribution<int> dims(m + 2, m + 5);
                Triple t = degenerate_triple(rng, dims(rng), m);
                check_point(t, locate_at(t, 0.0, cfg), rep, cfg, true);
                break;
            }
            case 3: {
                const int d1 = 2 + (i / 6) % 2;
                const int d2 = 1 + (i / 6) % 2;
                Triple a = order_d_triple(rng, d1, d1 + 1);
                Triple b = d2 == 1 ? degenerate_triple(rng, 3, 1) : order_d_triple(rng, d2, d2 + 1);
                Triple t = direct_sum(a, b);
                check_point(t, locate_at(t, 0.0, cfg), rep, cfg, true);
                break;
            }
            case 4: {
                std::uniform_int_distribution<int> dims(2, 6), segs(1, 3);
                check_path(random_path(rng, dims(rng), segs(rng), 0.0), rep, cfg);
                break;
            }
            case 5: {
                Triple t = (i / 6) % 2 == 0 ? uturn_triple() : order3_triple();
                ResonancePoint p = locate_at(t, 0.0, cfg);
                check_point(t, p, rep, cfg, true);
                StabilityReport st = stability_check(t, p, 1e-3, 4, subseed(seed, 800 + i), cfg);
                rep.stats["stability.group_sum"].record(st.failures == 0, st.failures,
                                                        st.details.empty() ? "" : st.details[0]);
                break;
            }
        }
    } catch (const Error& e) {
        ++rep.numerical_errors;
        rep.error_notes.push_back("trial " + std::to_string(i) + " kind " + std::to_string(kind) +
                                  ": " + e.what());
    }
    return rep;
}

} // namespace

VerifyReport run_verify(const Config& cfg, std::uint64_t seed, int trials) {
    std::vector<VerifyReport> parts(std::max(trials, 0));
    parallel_for(trials, [&](int i) { parts[i] = run_trial(cfg, seed, i); }, cfg.threads);
    VerifyReport rep;
    for (const auto& part : parts) rep.merge(part);
    return rep;
}

std::string verify_summary(const VerifyReport& rep) {
    std::ostringstream os;
    os.precision(3);
    long fails = 0;
    for (const auto& [key, st] : rep.stats) {
        os << (st.failures == 0 ? "pass " : "FAIL ") << key << ": " << st.checks - st.failures << "/"
           << st.checks << " worst " << st.worst << "\n";
        for (const auto& n : st.notes) os << "      " << n << "\n";
        fails += st.failures;
    }
    os << "invariant failures: " << fails << ", numerical errors: " << rep.numerical_errors << "\n";
    for (const auto& n : rep.error_notes) os << "  error: " << n << "\n";
    return os.str();
}

} // namespace sfl
