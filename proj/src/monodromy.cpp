#include "sfl/monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sfl {

namespace {

double min_pairwise(const std::vector<cplx>& pts) {
    double sep = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) sep = std::min(sep, std::abs(pts[i] - pts[j]));
    return sep;
}

// bijective nearest assignment; returns per-track new positions or the
// largest displacement through `worst` when it exceeds the guard
bool assign_nearest(const std::vector<cplx>& prev, const std::vector<cplx>& next, double guard,
                    std::vector<cplx>& out, double* worst) {
    const int n = static_cast<int>(prev.size());
    struct Entry {
        double d;
        int i, j;
    };
    std::vector<Entry> entries;
    entries.reserve(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) entries.push_back({std::abs(prev[i] - next[j]), i, j});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
    std::vector<int> mi(n, -1), mj(n, 0);
    int placed = 0;
    double w = 0.0;
    for (const auto& e : entries) {
        if (mi[e.i] >= 0 || mj[e.j]) continue;
        mi[e.i] = e.j;
        mj[e.j] = 1;
        w = std::max(w, e.d);
        if (++placed == n) break;
    }
    if (worst) *worst = w;
    if (w > guard) return false;
    out.resize(n);
    for (int i = 0; i < n; ++i) out[i] = next[mi[i]];
    return true;
}

// group members as simple points; nudges theta when a transient value
// collision makes the clustering merge two tracks
std::vector<cplx> simple_members(const Triple& t, const ResonancePoint& parent, double radius,
                                 double rho, double& theta, double dtheta, const Config& cfg) {
    for (int attempt = 0;; ++attempt) {
        const cplx z = t.lambda + rho * cplx(std::cos(theta), std::sin(theta));
        auto mem = group_members(t, parent.r, parent.alg_mult, z, radius, cfg);
        bool simple = true;
        for (const auto& p : mem)
            if (p.alg_mult != 1) simple = false;
        if (simple) {
            std::vector<cplx> out;
            for (const auto& p : mem) out.push_back(p.r);
            return out;
        }
        if (attempt >= 3) fail(Errc::GroupCollision, "group point of multiplicity > 1 on the circle");
        theta += 1e-3 * dtheta * (attempt + 1);
    }
}

} // namespace

const std::vector<cplx>& MonodromyTrace::at_angle(double th) const {
    size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < theta.size(); ++i) {
        const double d = std::abs(theta[i] - th);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return positions[best];
}

namespace {

MonodromyTrace track_group_at(const Triple& t, const ResonancePoint& parent, double rho_eff,
                              double radius, const Config& cfg) {
    MonodromyTrace tr;
    tr.r_parent = parent.r;
    tr.parent_N = parent.alg_mult;
    tr.rho = rho_eff;

    const double dtheta0 = 2.0 * M_PI / cfg.theta_steps;
    const double dtheta_min = 2.0 * M_PI / std::pow(2.0, cfg.theta_max_halvings);

    double th = 0.0;
    std::vector<cplx> cur = simple_members(t, parent, radius, rho_eff, th, dtheta0, cfg);
    std::sort(cur.begin(), cur.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    const std::vector<cplx> start = cur;
    tr.theta.push_back(th);
    tr.positions.push_back(cur);

    double target = th;
    while (target < 2.0 * M_PI - 1e-12) {
        double step = dtheta0;
        for (;;) {
            double th_next = std::min(target + step, 2.0 * M_PI);
            double th_eval = th_next;
            std::vector<cplx> raw = simple_members(t, parent, radius, rho_eff, th_eval, step, cfg);
            const double guard = 0.5 * min_pairwise(cur);
            std::vector<cplx> matched;
            double worst = 0.0;
            if (assign_nearest(cur, raw, guard, matched, &worst)) {
                cur = std::move(matched);
                target = th_next; // nominal angle; th_eval may carry a tiny nudge
                tr.theta.push_back(th_eval);
                tr.positions.push_back(cur);
                break;
            }
            step *= 0.5;
            if (step < dtheta_min)
                fail(Errc::TrackingAmbiguous, "displacement " + std::to_string(worst) +
                                                  " exceeds guard at minimal step");
        }
    }

    // permutation: where each track ends relative to the starting slots
    std::vector<cplx> final_pos = tr.positions.back();
    const double guard = 0.5 * min_pairwise(start);
    tr.permutation.assign(start.size(), -1);
    for (size_t i = 0; i < final_pos.size(); ++i) {
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < start.size(); ++j) {
            const double d = std::abs(final_pos[i] - start[j]);
            if (d < bd) {
                bd = d;
                best = static_cast<int>(j);
            }
        }
        if (bd > guard) fail(Errc::TrackingAmbiguous, "loop closure mismatch");
        tr.permutation[i] = best;
    }
    std::vector<int> seen(tr.permutation.size(), 0);
    for (int p : tr.permutation) {
        if (p < 0 || seen[p]) fail(Errc::TrackingAmbiguous, "permutation is not a bijection");
        seen[p] = 1;
    }
    return tr;
}

} // namespace

MonodromyTrace track_group(const Triple& t, const ResonancePoint& parent, double rho,
                           const Config& cfg) {
    const double radius = default_group_radius(t, t.lambda, parent.r, cfg);
    // shrink rho until the whole circle can be walked without the group
    // leaving the window or colliding
    double rho_eff = rho;
    for (int k = 0;; ++k) {
        try {
            return track_group_at(t, parent, rho_eff, radius, cfg);
        } catch (const Error& e) {
            if (k >= 24) throw;
            if (e.code() == Errc::GroupLeak || e.code() == Errc::GroupCollision)
                rho_eff *= 0.5;
            else
                throw;
        }
    }
}

std::vector<Cycle> cycle_decomposition(const MonodromyTrace& trace, const JordanProfile& jp) {
    const int n = static_cast<int>(trace.permutation.size());
    std::vector<int> seen(n, 0);
    std::vector<Cycle> cycles;
    for (int i = 0; i < n; ++i) {
        if (seen[i]) continue;
        Cycle c;
        int j = i;
        while (!seen[j]) {
            seen[j] = 1;
            c.members.push_back(j);
            j = trace.permutation[j];
        }
        c.length = static_cast<int>(c.members.size());
        c.b_parity = c.length % 2;
        cycles.push_back(std::move(c));
    }
    std::vector<int> lens;
    for (const auto& c : cycles) lens.push_back(c.length);
    std::sort(lens.begin(), lens.end(), std::greater<int>());
    if (lens != jp.sizes) {
        std::string got, want;
        for (int l : lens) got += std::to_string(l) + " ";
        for (int l : jp.sizes) want += std::to_string(l) + " ";
        fail(Errc::CycleJordanMismatch, "cycle lengths [" + got + "] != Jordan sizes [" + want + "]");
    }
    std::sort(cycles.begin(), cycles.end(),
              [](const Cycle& a, const Cycle& b) { return a.length > b.length; });
    return cycles;
}

namespace {

struct RealMember {
    cplx position;
    double theta; // 0 or pi
    bool found = false;
};

// real member of the cycle with Re(r) > Re(r_parent), looked up at z =
// lambda + rho and z = lambda - rho; tolerances are relative to the spread of
// the cycle members at that z
RealMember find_positive_real_member(const MonodromyTrace& trace, const Cycle& cycle) {
    RealMember rm;
    for (double th : {0.0, M_PI}) {
        const auto& pos = trace.at_angle(th);
        double spread = 0.0;
        for (int mtrk : cycle.members)
            spread = std::max(spread, std::abs(pos[mtrk] - trace.r_parent));
        if (spread <= 0.0) continue;
        for (int mtrk : cycle.members) {
            const cplx p = pos[mtrk];
            if (std::abs(p.imag()) <= 0.05 * spread &&
                p.real() - trace.r_parent.real() > 0.05 * spread) {
                rm.position = p;
                rm.theta = th;
                rm.found = true;
                return rm;
            }
        }
    }
    return rm;
}

} // namespace

int cycle_sign(const Triple& t, const ResonancePoint& parent, const MonodromyTrace& trace,
               const Cycle& cycle, const std::vector<EigenBranch>& branches, const Config& cfg) {
    RealMember rm = find_positive_real_member(trace, cycle);
    if (!rm.found) fail(Errc::SignDisagreement, "no real member with r > r_parent found");

    // route (iii): along the tracked circle, theta slightly past 0 (or slightly
    // before pi) realises exactly z + iy with y = rho*theta; read the sign of
    // Im r from the neighbouring trace samples of the same track
    size_t i0 = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < trace.theta.size(); ++j) {
        const double d = std::abs(trace.theta[j] - rm.theta);
        if (d < bd) {
            bd = d;
            i0 = j;
        }
    }
    int track = -1;
    const auto& at0 = trace.positions[i0];
    for (int mtrk : cycle.members)
        if (std::abs(at0[mtrk] - rm.position) < 1e-9 * (1.0 + std::abs(rm.position))) track = mtrk;
    if (track < 0) fail(Errc::SignDisagreement, "real member not found on the trace grid");

    const int dir = rm.theta < 0.5 * M_PI ? +1 : -1; // increase theta at 0, decrease at pi
    int sign_track = 0;
    for (size_t off = 1; off <= 3 && sign_track == 0; ++off) {
        const size_t j = i0 + dir * static_cast<int>(off);
        if (j >= trace.positions.size()) break;
        const double im = trace.positions[j][track].imag();
        if (std::abs(im) > 1e-10 * (1.0 + std::abs(parent.r))) sign_track = im > 0 ? 1 : -1;
    }
    if (sign_track == 0)
        fail(Errc::SignDisagreement, "real branch did not leave the axis along the circle");

    // route (i)/(ii): sign of the leading derivative of the matched eigenpath;
    // the match goes by the predicted distance |r' - r_parent| = (rho/|eps|)^(1/d)
    const double dist = std::abs(rm.position - trace.r_parent);
    struct Candidate {
        double miss;
        int sign;
    };
    std::vector<Candidate> cands;
    for (size_t b = 0; b < branches.size(); ++b) {
        if (branches[b].order != cycle.length) continue;
        const double lead = branches[b].lam_derivs[branches[b].order - 1];
        double f = 1.0;
        for (int i = 2; i <= branches[b].order; ++i) f *= i;
        const double eps_nu = lead / f;
        const double predicted = std::pow(trace.rho / std::abs(eps_nu), 1.0 / cycle.length);
        cands.push_back({std::abs(std::log(predicted) - std::log(dist)), lead > 0 ? 1 : -1});
    }
    if (cands.empty())
        fail(Errc::SignDisagreement, "no eigenpath of order " + std::to_string(cycle.length));
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.miss < b.miss; });
    int sign_deriv = cands[0].sign;
    if (cands.size() > 1 && cands[1].miss - cands[0].miss < std::log(2.0) &&
        cands[1].sign != cands[0].sign) {
        // two branches with near-equal |eps|: the side the real member lives on
        // separates their signs (the positive real member sits at z > lambda
        // exactly when the leading coefficient is positive)
        sign_deriv = rm.theta < 0.5 * M_PI ? 1 : -1;
    }

    if (sign_track != sign_deriv)
        fail(Errc::SignDisagreement, "tracking sign " + std::to_string(sign_track) +
                                         " vs eigenpath sign " + std::to_string(sign_deriv));
    return sign_track;
}

namespace {

// follow all N tracks radially inward from the trace at angle th0 down the
// halving schedule; returns positions per level (level 0 = trace radius)
std::vector<std::vector<cplx>> radial_track(const Triple& t, const ResonancePoint& parent,
                                            const MonodromyTrace& trace, double th0, int levels,
                                            const Config& cfg) {
    const double radius = default_group_radius(t, t.lambda, parent.r, cfg);
    std::vector<std::vector<cplx>> out;
    std::vector<cplx> cur = trace.at_angle(th0);
    out.push_back(cur);
    const cplx dir(std::cos(th0), std::sin(th0));
    for (int k = 1; k <= levels; ++k) {
        const double rho_k = trace.rho * std::pow(0.5, k);
        const double rho_prev = trace.rho * std::pow(0.5, k - 1);
        // adaptive substeps between consecutive radii keep matching unambiguous
        double at = rho_prev;
        while (at > rho_k * (1.0 + 1e-12)) {
            double step = at - rho_k;
            for (int halvings = 0;; ++halvings) {
                const double rho_q = at - step;
                const cplx z = t.lambda + rho_q * dir;
                auto mem = group_members(t, parent.r, parent.alg_mult, z, radius, cfg);
                std::vector<cplx> raw;
                for (const auto& p : mem)
                    for (int c = 0; c < p.alg_mult; ++c) raw.push_back(p.r);
                if (static_cast<int>(raw.size()) != static_cast<int>(cur.size()))
                    fail(Errc::GroupCollision, "member collision during radial tracking");
                const double guard = 0.75 * std::max(min_pairwise(cur), 1e-14);
                std::vector<cplx> matched;
                if (assign_nearest(cur, raw, guard, matched, nullptr)) {
                    cur = std::move(matched);
                    at = rho_q;
                    break;
                }
                step *= 0.5;
                if (halvings > 14) fail(Errc::TrackingAmbiguous, "radial step lost a track");
            }
        }
        out.push_back(cur);
    }
    return out;
}

} // namespace

void puiseux_leading(const Triple& t, const ResonancePoint& parent, const MonodromyTrace& trace,
                     Cycle& cycle, const Config& cfg) {
    const int levels = 7; // two decades of rho
    auto rad = radial_track(t, parent, trace, 0.5 * M_PI, levels, cfg);

    std::vector<double> xs, ys;
    for (int k = 0; k <= levels; ++k) {
        const double rho_k = trace.rho * std::pow(0.5, k);
        double mean_log = 0.0;
        for (int mtrk : cycle.members) mean_log += std::log(std::abs(rad[k][mtrk] - trace.r_parent));
        xs.push_back(std::log(rho_k));
        ys.push_back(mean_log / cycle.length);
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    cycle.fit_slope = slope;
    double ss = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - slope * xs[i] - intercept;
        ss += e * e;
    }
    cycle.fit_residual = std::sqrt(ss / n);
    const double want = 1.0 / cycle.length;
    if (std::abs(slope - want) > cfg.puiseux_slope_tol * std::max(1.0, 1.0 / want))
        fail(Errc::ExponentMismatch, "Puiseux slope " + std::to_string(slope) + " expected " +
                                         std::to_string(want));
    double magnitude = std::exp(intercept);
    // sign from the real branch when the cycle length is odd; for even cycles
    // the sign is a labeling convention and is reported positive
    double sign = 1.0;
    if (cycle.length % 2 == 1) {
        RealMember rm = find_positive_real_member(trace, cycle);
        if (rm.found) {
            const double root = rm.theta < 0.5 * M_PI ? 1.0 : -1.0; // sign of (z-lambda)^(1/d), d odd
            sign = (rm.position.real() - trace.r_parent.real()) * root > 0 ? 1.0 : -1.0;
        }
    }
    cycle.puiseux_leading = sign * magnitude;
}

CycleProjection cycle_projection(const Triple& t, const ResonancePoint& parent,
                                 const MonodromyTrace& trace, const Cycle& cycle, const Mat& A,
                                 const Config& cfg) {
    CycleProjection cp;
    const double group_radius = default_group_radius(t, t.lambda, parent.r, cfg);
    auto rad = radial_track(t, parent, trace, 0.5 * M_PI, cfg.z_levels, cfg);

    // the member idempotents blow up like |z-lambda|^-(d-1)/d, so their
    // absolute quadrature error must be driven well below riesz_tol
    Config inner = cfg;
    inner.riesz_tol = std::min(cfg.riesz_tol, 1e-11);

    Mat prev;
    std::vector<Mat> mp_prev;
    std::vector<cplx> mr_prev;
    double prev_diff = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int k = 2; k <= cfg.z_levels; ++k) {
        const double rho_k = trace.rho * std::pow(0.5, k);
        const cplx z = t.lambda + cplx(0.0, rho_k);
        // contour radius: safely inside the gaps between all group members
        // (a one-member group has no gap; fall back to the group radius)
        const double sep = std::min(min_pairwise(rad[k]), group_radius);
        const double cradius = 0.35 * sep;
        Mat sum = Mat::Zero(t.dim(), t.dim());
        std::vector<Mat> mp;
        std::vector<cplx> mr;
        for (int mtrk : cycle.members) {
            RieszPair pr = riesz_pair(t, z, rad[k][mtrk], inner, cradius);
            sum += pr.P;
            mp.push_back(pr.P);
            mr.push_back(rad[k][mtrk]);
        }
        if (prev.size() > 0) {
            const double diff = (sum - prev).norm();
            if (diff <= 1e-8 * std::max(1.0, sum.norm()) ||
                (k == cfg.z_levels && diff < cfg.cauchy_ratio * prev_diff)) {
                // Richardson in z: the limits are analytic at lambda, so the
                // halving schedule leaves an O(rho) error the two-point
                // extrapolation removes
                cp.P_nu = 2.0 * sum - prev;
                cp.member_P = std::move(mp);
                cp.member_r = std::move(mr);
                cp.member_P_prev = std::move(mp_prev);
                cp.member_r_prev = std::move(mr_prev);
                cp.z_final = z;
                cp.cauchy_last = diff;
                converged = true;
                break;
            }
            if (diff > prev_diff * 1.5 && k > 4)
                fail(Errc::NoConvergence, "Cauchy differences increasing");
            prev_diff = diff;
        }
        prev = std::move(sum);
        mp_prev = std::move(mp);
        mr_prev = std::move(mr);
        if (k == cfg.z_levels && !converged) {
            cp.P_nu = prev;
            cp.cauchy_last = prev_diff;
            fail(Errc::NoConvergence, "projection limit did not settle");
        }
    }
    cp.idem = (cp.P_nu * cp.P_nu - cp.P_nu).norm();
    cp.commute_A = (cp.P_nu * A - A * cp.P_nu).norm();
    return cp;
}

double moment_limit_check(const CycleProjection& cp, const ResonancePoint& parent, const Mat& A,
                          int k) {
    Mat sum = Mat::Zero(A.rows(), A.cols());
    for (size_t j = 0; j < cp.member_P.size(); ++j)
        sum += std::pow(cp.member_r[j] - parent.r, k) * cp.member_P[j];
    if (cp.member_P_prev.size() == cp.member_P.size()) {
        Mat sum_prev = Mat::Zero(A.rows(), A.cols());
        for (size_t j = 0; j < cp.member_P_prev.size(); ++j)
            sum_prev += std::pow(cp.member_r_prev[j] - parent.r, k) * cp.member_P_prev[j];
        sum = 2.0 * sum - sum_prev;
    }
    Mat apow = Mat::Identity(A.rows(), A.cols());
    for (int i = 0; i < k; ++i) apow = A * apow;
    return (sum - cp.P_nu * apow).norm();
}

int intersection_number(const Triple& t, const ResonancePoint& parent, const Config& cfg) {
    RieszPair rp = riesz_pair(t, t.lambda, parent.r, cfg);
    JordanProfile jp = jordan_profile(rp, cfg);
    MonodromyTrace trace = track_group(t, parent, cfg.track_rho * (1.0 + std::abs(t.lambda)), cfg);
    auto cycles = cycle_decomposition(trace, jp);
    auto branches = eigen_branches(t, parent.r.real(), GridSpec{}, cfg);
    int total = 0;
    for (auto& c : cycles) {
        if (c.b_parity == 0) continue; // U-turns contribute nothing
        c.sign = cycle_sign(t, parent, trace, c, branches, cfg);
        total += c.b_parity * c.sign;
    }
    return total;
}

std::string trace_to_csv(const MonodromyTrace& trace) {
    std::ostringstream os;
    os.precision(17);
    os << "theta";
    for (size_t i = 0; i < trace.positions[0].size(); ++i)
        os << ",re_" << i << ",im_" << i;
    os << "\n";
    for (size_t j = 0; j < trace.theta.size(); ++j) {
        os << trace.theta[j];
        for (const cplx& p : trace.positions[j]) os << "," << p.real() << "," << p.imag();
        os << "\n";
    }
    return os.str();
}

} // namespace sfl
