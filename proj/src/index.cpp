#include "sfl/index.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <optional>

namespace sfl {

IndexReport resonance_index(const Triple& t, const ResonancePoint& r, const Config& cfg) {
    if (std::abs(r.r.imag()) > 0.0) fail(Errc::InvalidInput, "resonance index needs a real point");
    const double scale = t.scale();
    const double radius = default_group_radius(t, t.lambda, r.r, cfg);

    IndexReport rep;
    std::optional<std::pair<int, int>> prev;
    for (double y = cfg.y0_factor * scale; y >= cfg.y_min_factor * scale / (1.0 + 1e-12);
         y /= cfg.y_ratio) {
        std::vector<ResonancePoint> members;
        try {
            members = group_members(t, r.r, r.alg_mult, cplx(t.lambda, y), radius, cfg);
        } catch (const Error& e) {
            if (e.code() == Errc::GroupLeak && !prev) continue; // y still too coarse
            throw;
        }
        int np = 0, nm = 0;
        for (const auto& p : members) {
            if (p.r.imag() > 0)
                np += p.alg_mult;
            else if (p.r.imag() < 0)
                nm += p.alg_mult;
            else
                fail(Errc::GroupLeak, "real member at non-real z");
        }
        if (prev && prev->first == np && prev->second == nm) {
            rep.n_plus = np;
            rep.n_minus = nm;
            rep.index = np - nm;
            rep.y_used = y;
            rep.stable = true;
            return rep;
        }
        prev = {np, nm};
    }
    fail(Errc::Unstable, "half-plane counts did not stabilize over the y schedule");
}

ResonanceMatrix resonance_matrix(const Triple& t, const ResonancePoint& r, const Config& cfg) {
    if (std::abs(r.r.imag()) > 0.0) fail(Errc::InvalidInput, "resonance matrix needs a real point");
    RieszPair rp = riesz_pair(t, t.lambda, r.r, cfg);

    ResonanceMatrix rm;
    Mat M = t.V.mat() * rp.P;
    rm.herm_residual = (M - M.adjoint()).norm();
    rm.M = 0.5 * (M + M.adjoint().eval());
    rm.rank = svd_rank(rm.M, cfg.rank_tol);

    Eigen::SelfAdjointEigenSolver<Mat> es(rm.M, Eigen::EigenvaluesOnly);
    const double thr = cfg.sig_tol * std::max(1e-300, rm.M.norm());
    int pos = 0, neg = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double e = es.eigenvalues()[i];
        if (std::abs(e) > thr && std::abs(e) < 10.0 * thr)
            fail(Errc::SignatureAmbiguous, "eigenvalue " + std::to_string(e) +
                                               " within a decade of sig_tol");
        if (e > thr)
            ++pos;
        else if (e < -thr)
            ++neg;
    }
    rm.signature = pos - neg;
    return rm;
}

IndexSignatureCheck index_signature_check(const Triple& t, const ResonancePoint& r,
                                          const Config& cfg) {
    IndexSignatureCheck chk;
    chk.index = resonance_index(t, r, cfg).index;
    chk.signature = resonance_matrix(t, r, cfg).signature;
    chk.agree = chk.index == chk.signature;
    return chk;
}

} // namespace sfl
