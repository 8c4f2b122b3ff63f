#pragma once

#include <cstdint>
#include <vector>

namespace sfl {

// All tolerances and schedules in one place. Defaults are tuned for double
// precision at dimensions up to ~32; every field can be overridden from a
// JSON config file or CLI flags.
struct Config {
    // core tolerances
    double herm_tol = 1e-12;   // hermiticity of inputs, relative
    double eig_tol = 1e-10;    // eigendecomposition residuals, relative
    double gap_tol = 1e-8;     // minimal distance of lambda from spectra at endpoints
    double cond_max = 1e12;    // resolvent condition guard

    // locator
    double sigma_floor = 1e-9;   // eigenvalues of A below this map to no resonance point
    double mult_gap = 1e-6;      // relative cluster radius for multiplicity estimation
    double cluster_eps = 1e-13;  // defective clusters of size k spread like cluster_eps^(1/k)
    double group_radius_cap = 0.25;

    // riesz calculus
    double riesz_tol = 1e-8;
    double rank_tol = 1e-7;
    double angle_tol = 1e-6;
    int contour_nodes = 64;
    int max_nodes = 1024;
    double contour_radius_frac = 0.4;
    double contour_radius_cap = 0.5;

    // index engine
    double sig_tol = 1e-7;   // relative, applied to ||VP||
    double y0_factor = 1e-2; // y schedule: y0_factor*scale down to y_min_factor*scale
    double y_min_factor = 1e-8;
    double y_ratio = 10.0;

    // monodromy
    int theta_steps = 48;          // initial steps per full circle
    int theta_max_halvings = 16;   // refinement floor 2*pi/2^16
    double track_rho = 1e-2;       // default circle radius factor
    double z_rho0 = 1e-2;          // limit schedule rho_k = z_rho0 * 2^-k
    int z_levels = 12;
    double cauchy_ratio = 0.7;
    double moment_tol = 1e-4;
    double puiseux_slope_tol = 0.05; // 5% on 1/d exponent fits

    // eigenpath
    double deriv_eps = 1e-12;
    int richardson_levels = 3;
    double deriv_floor = 1e-5;
    double ortho_tol = 1e-8;
    double basis_tol = 1e-5;
    double overlap_min = 0.7;

    // flow engines
    double ssf_tol = 0.1;
    double ssf_y0_factor = 1e-2; // two smallest y used for Richardson in y
    int ssf_quad_order = 8;

    // harness
    std::uint64_t seed = 0;
    int threads = 0; // 0 = hardware_concurrency, capped by SFL_THREADS

    double y_schedule_scale(double scale) const { return y0_factor * scale; }
};

} // namespace sfl
