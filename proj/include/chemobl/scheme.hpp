#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "chemobl/fields.hpp"
#include "chemobl/grid.hpp"
#include "chemobl/tridiag.hpp"

namespace chemobl {

struct SchemeConfig {
    double theta = 1.0;       // implicitness of the diffusion terms, [0.5, 1]
    double cfl_advect = 0.4;  // advective CFL safety factor, (0, 1]
    int max_picard = 1;       // cap on flux-closure iterations (1 = explicit upwind pass)
    double tol_picard = 1e-12;
    bool adaptive_dt = false;  // recompute dt from the CFL rule each step
    double tol_mass = 1e-12;   // per-step relative mass-drift guard
    double tol_max = 1e-10;    // slack on the c maximum principle
    double tol_compat = 1e-8;  // gate on the initial-data compatibility residuals

    void validate() const {
        if (!(theta >= 0.5 && theta <= 1.0)) throw std::invalid_argument("SchemeConfig: theta must be in [0.5,1]");
        if (!(cfl_advect > 0.0 && cfl_advect <= 1.0))
            throw std::invalid_argument("SchemeConfig: cfl_advect must be in (0,1]");
        if (max_picard < 1) throw std::invalid_argument("SchemeConfig: max_picard must be >= 1");
        if (!(tol_picard > 0.0)) throw std::invalid_argument("SchemeConfig: tol_picard must be > 0");
    }
};

struct StepReport {
    double dt_used = 0.0;
    double mass_before = 0.0;
    double mass_after = 0.0;
    double c_min = 0.0;
    double c_max = 0.0;
    int picard_iters = 0;
    double w_min_pre_clamp = 0.0;
    int clamp_count = 0;
};

namespace detail {

inline double minmod(double x, double y) {
    if (x > 0.0 && y > 0.0) return std::min(x, y);
    if (x < 0.0 && y < 0.0) return std::max(x, y);
    return 0.0;
}

/// Limited upwind value of w at face i+1/2 for face velocity u = c_r there.
/// Donor-cell fallback at the faces next to the walls (no second slope).
inline double upwind_face_value(const std::vector<double>& w, int i, double u, int n) {
    if (u >= 0.0) {
        const double slope = (i == 0) ? 0.0 : minmod(w[static_cast<size_t>(i)] - w[static_cast<size_t>(i - 1)],
                                                     w[static_cast<size_t>(i + 1)] - w[static_cast<size_t>(i)]);
        return w[static_cast<size_t>(i)] + 0.5 * slope;
    }
    const double slope = (i + 1 == n - 1)
                             ? 0.0
                             : minmod(w[static_cast<size_t>(i + 1)] - w[static_cast<size_t>(i)],
                                      w[static_cast<size_t>(i + 2)] - w[static_cast<size_t>(i + 1)]);
    return w[static_cast<size_t>(i + 1)] - 0.5 * slope;
}

/// Cell volume of node i consistent with the trapezoidal weighted mass
/// (half cells at the walls), so face fluxes telescope exactly.
inline double cell_volume(const RadialGrid& grid, int i) {
    const double v = grid.spacing * grid.weight(i);
    return (i == 0 || i == grid.num_nodes - 1) ? 0.5 * v : v;
}

struct WStepResult {
    std::vector<double> w;
    int picard_iters = 0;
    double min_pre_clamp = 0.0;
    int clamp_count = 0;
};

/// One step of the w-equation in divergence form,
///   w_t = r^{1-n} d/dr [ r^{n-1} (w_r - w c_r) ],
/// with zero total flux at both walls. Diffusion is theta-implicit
/// (tridiagonal); the chemotactic flux uses the face velocity c_r from the
/// supplied (already updated) c field with limited upwinding. When
/// max_picard > 1 the advective flux is re-evaluated from the running iterate
/// until the fixed point settles.
inline WStepResult advance_w(const std::vector<double>& w_old, const std::vector<double>& c_new, double dt,
                             const RadialGrid& grid, const SchemeConfig& cfg, double t) {
    const int n = grid.num_nodes;
    const double h = grid.spacing;
    const double theta = cfg.theta;

    // face velocities u_{i+1/2} = (c_{i+1}-c_i)/h, i = 0..n-2
    std::vector<double> u(static_cast<size_t>(n - 1));
    for (int i = 0; i < n - 1; ++i)
        u[static_cast<size_t>(i)] = (c_new[static_cast<size_t>(i + 1)] - c_new[static_cast<size_t>(i)]) / h;

    std::vector<double> lower(static_cast<size_t>(n)), diag(static_cast<size_t>(n)), upper(static_cast<size_t>(n)),
        rhs(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double fhi = (i < n - 1) ? grid.face_weight(i) : 0.0;
        const double flo = (i > 0) ? grid.face_weight(i - 1) : 0.0;
        const double vol = cell_volume(grid, i);
        diag[static_cast<size_t>(i)] = vol + theta * dt * (fhi + flo) / h;
        upper[static_cast<size_t>(i)] = -theta * dt * fhi / h;
        lower[static_cast<size_t>(i)] = -theta * dt * flo / h;
    }

    WStepResult out;
    std::vector<double> w_iter = w_old;
    for (int iter = 1; iter <= cfg.max_picard; ++iter) {
        // advective face fluxes from the current iterate
        std::vector<double> adv(static_cast<size_t>(n - 1));
        for (int i = 0; i < n - 1; ++i)
            adv[static_cast<size_t>(i)] =
                -u[static_cast<size_t>(i)] * upwind_face_value(w_iter, i, u[static_cast<size_t>(i)], n);

        for (int i = 0; i < n; ++i) {
            const double fhi = (i < n - 1) ? grid.face_weight(i) : 0.0;
            const double flo = (i > 0) ? grid.face_weight(i - 1) : 0.0;
            double r = cell_volume(grid, i) * w_old[static_cast<size_t>(i)];
            if (i < n - 1) r += dt * fhi * adv[static_cast<size_t>(i)];
            if (i > 0) r -= dt * flo * adv[static_cast<size_t>(i - 1)];
            if (theta < 1.0) {
                double dold = 0.0;
                if (i < n - 1)
                    dold += fhi * (w_old[static_cast<size_t>(i + 1)] - w_old[static_cast<size_t>(i)]) / h;
                if (i > 0) dold -= flo * (w_old[static_cast<size_t>(i)] - w_old[static_cast<size_t>(i - 1)]) / h;
                r += (1.0 - theta) * dt * dold;
            }
            rhs[static_cast<size_t>(i)] = r;
        }

        std::vector<double> w_new = solve_tridiagonal(lower, diag, upper, rhs, t);
        out.picard_iters = iter;
        if (iter > 1) {
            double delta = 0.0, scale = 0.0;
            for (int i = 0; i < n; ++i) {
                delta = std::max(delta, std::abs(w_new[static_cast<size_t>(i)] - w_iter[static_cast<size_t>(i)]));
                scale = std::max(scale, std::abs(w_new[static_cast<size_t>(i)]));
            }
            w_iter = std::move(w_new);
            if (delta <= cfg.tol_picard * (1.0 + scale)) break;
            if (iter == cfg.max_picard)
                throw solver_error("Picard iteration on the chemotactic flux did not converge", t);
        } else {
            w_iter = std::move(w_new);
            if (cfg.max_picard == 1) break;
        }
    }

    // clamp roundoff-size negative values (counted)
    out.min_pre_clamp = *std::min_element(w_iter.begin(), w_iter.end());
    for (double& v : w_iter)
        if (v < 0.0) {
            v = 0.0;
            ++out.clamp_count;
        }
    out.w = std::move(w_iter);
    return out;
}

/// theta-implicit step of the oxygen equation
///   c_t = eps r^{1-n} d/dr ( r^{n-1} c_r ) - w c
/// with ghost-node Robin closure c_r(a) = -kappa[lambda-c(a)],
/// c_r(b) = kappa[lambda-c(b)] folded into the wall rows, and the reaction
/// taken implicitly. For eps = 0 this reduces to c_i / (1 + dt w_i).
inline std::vector<double> advance_c(const std::vector<double>& c_old, const std::vector<double>& w_old, double dt,
                                     const ModelParams& params, const RadialGrid& grid, const SchemeConfig& cfg,
                                     double t) {
    const int n = grid.num_nodes;
    const double h = grid.spacing;
    const double theta = cfg.theta;
    const double eps = params.eps;
    const double kap = params.kappa;
    const double lam = params.lambda;

    auto beta_hi = [&](int i) { return grid.face_weight(i) / (grid.weight(i) * h * h); };
    auto beta_lo = [&](int i) { return grid.face_weight(i - 1) / (grid.weight(i) * h * h); };

    // L(c)_i with the Robin ghost values substituted at the walls
    auto radial_laplacian = [&](const std::vector<double>& c, int i) {
        if (i == 0) {
            return (beta_hi(0) + beta_lo(0)) * (c[1] - c[0]) + 2.0 * kap * beta_lo(0) * h * (lam - c[0]);
        }
        if (i == n - 1) {
            return (beta_hi(n - 1) + beta_lo(n - 1)) * (c[static_cast<size_t>(n - 2)] - c[static_cast<size_t>(n - 1)]) +
                   2.0 * kap * beta_hi(n - 1) * h * (lam - c[static_cast<size_t>(n - 1)]);
        }
        return beta_hi(i) * (c[static_cast<size_t>(i + 1)] - c[static_cast<size_t>(i)]) -
               beta_lo(i) * (c[static_cast<size_t>(i)] - c[static_cast<size_t>(i - 1)]);
    };

    std::vector<double> lower(static_cast<size_t>(n), 0.0), diag(static_cast<size_t>(n)),
        upper(static_cast<size_t>(n), 0.0), rhs(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double d = 1.0 + dt * w_old[static_cast<size_t>(i)];
        double r = c_old[static_cast<size_t>(i)];
        if (i == 0) {
            const double bsum = beta_hi(0) + beta_lo(0);
            d += theta * dt * eps * (bsum + 2.0 * kap * beta_lo(0) * h);
            upper[0] = -theta * dt * eps * bsum;
            r += theta * dt * eps * 2.0 * kap * beta_lo(0) * h * lam;
        } else if (i == n - 1) {
            const double bsum = beta_hi(n - 1) + beta_lo(n - 1);
            d += theta * dt * eps * (bsum + 2.0 * kap * beta_hi(n - 1) * h);
            lower[static_cast<size_t>(i)] = -theta * dt * eps * bsum;
            r += theta * dt * eps * 2.0 * kap * beta_hi(n - 1) * h * lam;
        } else {
            d += theta * dt * eps * (beta_hi(i) + beta_lo(i));
            upper[static_cast<size_t>(i)] = -theta * dt * eps * beta_hi(i);
            lower[static_cast<size_t>(i)] = -theta * dt * eps * beta_lo(i);
        }
        if (theta < 1.0) r += (1.0 - theta) * dt * eps * radial_laplacian(c_old, i);
        diag[static_cast<size_t>(i)] = d;
        rhs[static_cast<size_t>(i)] = r;
    }
    return solve_tridiagonal(lower, diag, upper, rhs, t);
}

/// Advective CFL bound: cfl * dr / (max_i |c_r|_i + dr).
inline double cfl_limit(const std::vector<double>& c, const RadialGrid& grid, const SchemeConfig& cfg) {
    const auto cr = first_derivative(c, grid);
    double m = 0.0;
    for (double v : cr) m = std::max(m, std::abs(v));
    return cfg.cfl_advect * grid.spacing / (m + grid.spacing);
}

inline void enforce_step_invariants(const StepReport& rep, const SchemeConfig& cfg, double c_bound, double t) {
    const double scale = std::max(std::abs(rep.mass_before), 1e-30);
    if (std::abs(rep.mass_after - rep.mass_before) > cfg.tol_mass * scale)
        throw solver_error("mass drift beyond tolerance", t);
    if (rep.c_min < -cfg.tol_max || rep.c_max > c_bound * (1.0 + cfg.tol_max) + cfg.tol_max)
        throw solver_error("c left [0, max(||c0||,lambda)] beyond tolerance", t);
    if (rep.w_min_pre_clamp < -1e-12)
        throw solver_error("w undershoot beyond tolerance (CFL too aggressive?)", t);
}

inline int fixed_step_count(const ModelParams& params) {
    const double raw = params.t_final / params.dt;
    int steps = static_cast<int>(std::lround(raw));
    if (steps < 1 || std::abs(raw - static_cast<double>(steps)) > 1e-8)
        steps = static_cast<int>(std::ceil(raw - 1e-12));
    return steps;
}

}  // namespace detail

}  // namespace chemobl
