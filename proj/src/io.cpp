#include "sfl/io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace sfl {

Json matrix_to_json(const Mat& m) {
    Json entries = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) {
            const cplx v = m(i, j);
            if (v.imag() == 0.0)
                row.push_back(v.real());
            else
                row.push_back(Json::array({v.real(), v.imag()}));
        }
        entries.push_back(std::move(row));
    }
    return Json{{"dim", m.rows()}, {"entries", std::move(entries)}};
}

Mat matrix_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("entries"))
        fail(Errc::InvalidInput, "matrix JSON needs dim and entries");
    const int n = j.at("dim").get<int>();
    const Json& entries = j.at("entries");
    if (!entries.is_array() || static_cast<int>(entries.size()) != n)
        fail(Errc::InvalidInput, "entries row count != dim");
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
        const Json& row = entries.at(i);
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            fail(Errc::InvalidInput, "entries column count != dim");
        for (int k = 0; k < n; ++k) {
            const Json& e = row.at(k);
            if (e.is_number())
                m(i, k) = cplx(e.get<double>(), 0.0);
            else if (e.is_array() && e.size() == 2)
                m(i, k) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
            else
                fail(Errc::InvalidInput, "matrix entry must be number or [re,im]");
        }
    }
    return m;
}

Json triple_to_json(const Triple& t) {
    return Json{{"lambda", t.lambda}, {"H", matrix_to_json(t.H.mat())}, {"V", matrix_to_json(t.V.mat())}};
}

Triple triple_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("lambda") || !j.contains("H") || !j.contains("V"))
        fail(Errc::InvalidInput, "triple JSON needs lambda, H, V");
    return Triple(j.at("lambda").get<double>(), HermitianMatrix(matrix_from_json(j.at("H"))),
                  HermitianMatrix(matrix_from_json(j.at("V"))));
}

Json path_to_json(const OperatorPath& p) {
    Json vs = Json::array();
    for (const auto& v : p.vertices) vs.push_back(matrix_to_json(v.mat()));
    return Json{{"vertices", std::move(vs)}};
}

OperatorPath path_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("vertices") || !j.at("vertices").is_array())
        fail(Errc::InvalidInput, "path JSON needs a vertices array");
    std::vector<HermitianMatrix> vs;
    for (const auto& v : j.at("vertices")) vs.push_back(HermitianMatrix(matrix_from_json(v)));
    return OperatorPath(std::move(vs));
}

Json flow_report_to_json(const FlowReport& rep) {
    Json res = Json::array();
    for (const auto& c : rep.per_resonance)
        res.push_back(Json{{"segment", c.segment},
                           {"r", c.r},
                           {"index", c.index},
                           {"intersection", c.intersection}});
    return Json{{"tri", rep.tri},          {"intersection", rep.intersection},
                {"endpoint", rep.endpoint}, {"ssf", rep.ssf},
                {"resonances", std::move(res)}, {"agreement", rep.agreement}};
}

void apply_config_json(Config& cfg, const Json& j) {
    if (!j.is_object()) fail(Errc::InvalidInput, "config JSON must be an object");
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("herm_tol", cfg.herm_tol);
    get("eig_tol", cfg.eig_tol);
    get("gap_tol", cfg.gap_tol);
    get("cond_max", cfg.cond_max);
    get("sigma_floor", cfg.sigma_floor);
    get("mult_gap", cfg.mult_gap);
    get("cluster_eps", cfg.cluster_eps);
    get("group_radius_cap", cfg.group_radius_cap);
    get("riesz_tol", cfg.riesz_tol);
    get("rank_tol", cfg.rank_tol);
    get("angle_tol", cfg.angle_tol);
    get("contour_nodes", cfg.contour_nodes);
    get("max_nodes", cfg.max_nodes);
    get("contour_radius_frac", cfg.contour_radius_frac);
    get("contour_radius_cap", cfg.contour_radius_cap);
    get("sig_tol", cfg.sig_tol);
    get("y0_factor", cfg.y0_factor);
    get("y_min_factor", cfg.y_min_factor);
    get("y_ratio", cfg.y_ratio);
    get("theta_steps", cfg.theta_steps);
    get("theta_max_halvings", cfg.theta_max_halvings);
    get("track_rho", cfg.track_rho);
    get("z_rho0", cfg.z_rho0);
    get("z_levels", cfg.z_levels);
    get("cauchy_ratio", cfg.cauchy_ratio);
    get("moment_tol", cfg.moment_tol);
    get("puiseux_slope_tol", cfg.puiseux_slope_tol);
    get("deriv_eps", cfg.deriv_eps);
    get("richardson_levels", cfg.richardson_levels);
    get("deriv_floor", cfg.deriv_floor);
    get("ortho_tol", cfg.ortho_tol);
    get("basis_tol", cfg.basis_tol);
    get("overlap_min", cfg.overlap_min);
    get("ssf_tol", cfg.ssf_tol);
    get("ssf_y0_factor", cfg.ssf_y0_factor);
    get("ssf_quad_order", cfg.ssf_quad_order);
    get("seed", cfg.seed);
    get("threads", cfg.threads);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::InvalidInput, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::InvalidInput, "cannot write " + path);
    out << content;
}

} // namespace sfl
