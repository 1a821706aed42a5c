#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "chemobl/fields.hpp"
#include "chemobl/grid.hpp"
#include "chemobl/limit_state.hpp"
#include "chemobl/scheme.hpp"
#include "chemobl/trajectory.hpp"

namespace chemobl {

enum class NormKind { SupC, L2, H1, H2, WeightedL2, WeightedH1 };

/// Discrete norms over the grid. L2/H1/H2 use the plain trapezoid rule;
/// the weighted variants insert r^{n-1}. H1/H2 add first/second difference
/// terms built from the diagnostic stencils.
inline double discrete_norm(std::span<const double> values, const RadialGrid& grid, NormKind kind) {
    detail::require_length(values, grid, "discrete_norm");
    const int n = grid.num_nodes;
    if (kind == NormKind::SupC) {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
    if (kind == NormKind::H2 && n < 5) throw std::invalid_argument("discrete_norm: H2 needs at least 5 nodes");

    const bool weighted = (kind == NormKind::WeightedL2 || kind == NormKind::WeightedH1);
    auto quad = [&](const std::vector<double>& sq) {
        return weighted ? weighted_integral(sq, grid) : unweighted_integral(sq, grid);
    };
    std::vector<double> sq(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) sq[i] = values[i] * values[i];
    double total = quad(sq);
    if (kind == NormKind::H1 || kind == NormKind::H2 || kind == NormKind::WeightedH1) {
        const auto d1 = first_derivative(values, grid);
        for (size_t i = 0; i < grid.size(); ++i) sq[i] = d1[i] * d1[i];
        total += quad(sq);
    }
    if (kind == NormKind::H2) {
        const auto d2 = second_derivative(values, grid);
        for (size_t i = 0; i < grid.size(); ++i) sq[i] = d2[i] * d2[i];
        total += quad(sq);
    }
    return std::sqrt(total);
}

/// \int r^{n-1}(w log w - w + 1) dr + coeff * \int r^{n-1}(d_r sqrt c)^2 dr,
/// with w log w = 0 below 1e-300. Throws on c <= 0 or w < 0.
inline double entropy_functional_impl(const FieldState& state, const RadialGrid& grid, double grad_coeff) {
    detail::require_length(state.w, grid, "entropy_functional");
    detail::require_length(state.c, grid, "entropy_functional");
    std::vector<double> integrand(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        const double w = state.w[i];
        if (w < 0.0) throw std::domain_error("entropy_functional: negative w");
        const double wlogw = (w < 1e-300) ? 0.0 : w * std::log(w);
        integrand[i] = wlogw - w + 1.0;
    }
    double total = weighted_integral(integrand, grid);

    std::vector<double> sqrt_c(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        if (!(state.c[i] > 0.0)) throw std::domain_error("entropy_functional: c must be positive");
        sqrt_c[i] = std::sqrt(state.c[i]);
    }
    const auto d = first_derivative(sqrt_c, grid);
    for (size_t i = 0; i < grid.size(); ++i) integrand[i] = d[i] * d[i];
    total += grad_coeff * weighted_integral(integrand, grid);
    return total;
}

inline double entropy_functional(const FieldState& state, const RadialGrid& grid) {
    return entropy_functional_impl(state, grid, 1.0);
}

/// The kappa=0 Lyapunov combination (coefficient 2 on the gradient term),
/// exactly nonincreasing for the continuous system.
inline double entropy_lyapunov(const FieldState& state, const RadialGrid& grid) {
    return entropy_functional_impl(state, grid, 2.0);
}

// ---------------------------------------------------------------------------
// rate fitting

struct RateFit {
    std::vector<std::pair<double, double>> samples;  // (eps, error)
    double slope = 0.0;
    double intercept = 0.0;   // in log coordinates
    double max_residual = 0.0;  // max |log err - (slope log eps + intercept)|
};

/// Least-squares line through (log eps, log error); slope is the empirical rate.
inline RateFit fit_rate(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("fit_rate: need at least 2 samples");
    for (const auto& [e, err] : samples)
        if (!(e > 0.0) || !(err > 0.0)) throw std::invalid_argument("fit_rate: samples must be positive");
    const double n = static_cast<double>(samples.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [e, err] : samples) {
        const double x = std::log(e), y = std::log(err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    RateFit fit;
    fit.samples = samples;
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_rate: need at least two distinct eps values");
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    for (const auto& [e, err] : samples)
        fit.max_residual = std::max(fit.max_residual, std::abs(std::log(err) - (fit.slope * std::log(e) + fit.intercept)));
    return fit;
}

// ---------------------------------------------------------------------------
// boundary-layer diagnostics

struct BLReport {
    double delta = 0.0;
    double interior_sup_grad_err_w = 0.0;
    double interior_sup_grad_err_c = 0.0;
    double full_sup_grad_err_w = 0.0;
    double full_sup_grad_err_c = 0.0;
    bool occurrence_flag = false;
};

/// sup over nodes with r in [a+delta, b-delta] of |d_r (u_eps - u_limit)|.
inline double interior_gradient_error(std::span<const double> eps_snap, std::span<const double> limit_snap,
                                      const RadialGrid& grid, double delta) {
    detail::require_length(eps_snap, grid, "interior_gradient_error");
    detail::require_length(limit_snap, grid, "interior_gradient_error");
    if (!(delta > 0.0) || !(delta < 0.5 * (grid.outer_radius - grid.inner_radius)))
        throw std::invalid_argument("interior_gradient_error: delta must be in (0, (b-a)/2)");
    std::vector<double> diff(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) diff[i] = eps_snap[i] - limit_snap[i];
    const auto d = first_derivative(diff, grid);
    double sup = 0.0;
    bool any = false;
    for (int i = 0; i < grid.num_nodes; ++i) {
        const double r = grid.node(i);
        if (r >= grid.inner_radius + delta && r <= grid.outer_radius - delta) {
            sup = std::max(sup, std::abs(d[static_cast<size_t>(i)]));
            any = true;
        }
    }
    if (!any) throw std::invalid_argument("interior_gradient_error: empty interior node set");
    return sup;
}

/// Full-interval counterpart (delta = 0).
inline double full_gradient_error(std::span<const double> eps_snap, std::span<const double> limit_snap,
                                  const RadialGrid& grid) {
    detail::require_length(eps_snap, grid, "full_gradient_error");
    std::vector<double> diff(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) diff[i] = eps_snap[i] - limit_snap[i];
    const auto d = first_derivative(diff, grid);
    double sup = 0.0;
    for (double v : d) sup = std::max(sup, std::abs(v));
    return sup;
}

struct BLOccurrence {
    bool occurs = false;
    double witness_time = 0.0;
};

/// Scans the limit run's wall series for the earliest time with
/// w0(a,t) > tol_pos or w0(b,t) > tol_pos.
inline BLOccurrence bl_occurrence(const TrajectoryRecord& limit_record, double tol_pos = 1e-10) {
    for (const auto& s : limit_record.wall_series)
        if (s.w_a > tol_pos || s.w_b > tol_pos) return {true, s.t};
    return {false, 0.0};
}

/// The Robin-reduction expression evaluated from the stored history integrals:
///   c0(wall) e^{-Iw} {1 - e^{-Iwc}} - lambda {1 - e^{-(Iwc+Iw)}}.
/// When it vanishes for all t, the eps->0 difference field satisfies the
/// homogeneous Robin relation at that wall.
inline double robin_reduction_residual(const LimitState& state, Endpoint end, const ModelParams& params) {
    const double iw = (end == Endpoint::Inner) ? state.int_w_a : state.int_w_b;
    const double iwc = (end == Endpoint::Inner) ? state.int_wc_a : state.int_wc_b;
    const double c0w = (end == Endpoint::Inner) ? state.c0_wall_a : state.c0_wall_b;
    return c0w * std::exp(-iw) * (1.0 - std::exp(-iwc)) - params.lambda * (1.0 - std::exp(-(iwc + iw)));
}

// ---------------------------------------------------------------------------
// uniform-in-eps monitors

/// Third-derivative surrogate D2(D1(v)) on the nodes where both stencils are
/// central (indices 2..n-4); other entries are zero.
inline std::vector<double> third_derivative_surrogate(std::span<const double> v, const RadialGrid& grid) {
    detail::require_length(v, grid, "third_derivative_surrogate");
    const int n = grid.num_nodes;
    if (n < 7) throw std::invalid_argument("third_derivative_surrogate: need at least 7 nodes");
    const double h = grid.spacing;
    std::vector<double> out(grid.size(), 0.0);
    auto d1 = [&](int i) { return (v[static_cast<size_t>(i + 1)] - v[static_cast<size_t>(i - 1)]) / (2.0 * h); };
    for (int i = 2; i <= n - 3; ++i)
        out[static_cast<size_t>(i)] = (d1(i + 1) - 2.0 * d1(i) + d1(i - 1)) / (h * h);
    return out;
}

struct MonitorEntry {
    std::string name;
    double value = 0.0;
};

using MonitorTable = std::vector<MonitorEntry>;

/// Discrete surrogates of the uniform-estimate left-hand sides: sup-in-time
/// squared H1 norms of w and c, time-integrated squared H1 norms of the time
/// derivatives (finite differences of consecutive snapshots), and the
/// eps-weighted curvature terms. For kappa > 0 the curvature weights are
/// eps^{1/2} and eps^{3/2}; for kappa = 0 they are 1 and eps.
inline MonitorTable uniform_monitor(const TrajectoryRecord& record, const ModelParams& params, const RadialGrid& grid) {
    const auto& snaps = record.snapshots;
    if (snaps.size() < 2) throw std::invalid_argument("uniform_monitor: need at least 2 snapshots");

    double sup_h1_w = 0.0, sup_h1_c = 0.0, sup_l2_crr = 0.0;
    double int_h1_wt = 0.0, int_h1_ct = 0.0, int_l2_crrr = 0.0;

    std::vector<double> diffw(grid.size()), diffc(grid.size());
    for (size_t k = 0; k < snaps.size(); ++k) {
        const double h1w = discrete_norm(snaps[k].w, grid, NormKind::H1);
        const double h1c = discrete_norm(snaps[k].c, grid, NormKind::H1);
        sup_h1_w = std::max(sup_h1_w, h1w * h1w);
        sup_h1_c = std::max(sup_h1_c, h1c * h1c);

        const auto crr = second_derivative(snaps[k].c, grid);
        const double l2crr = discrete_norm(crr, grid, NormKind::L2);
        sup_l2_crr = std::max(sup_l2_crr, l2crr * l2crr);

        if (k + 1 < snaps.size()) {
            const double dt = snaps[k + 1].t - snaps[k].t;
            for (size_t i = 0; i < grid.size(); ++i) {
                diffw[i] = (snaps[k + 1].w[i] - snaps[k].w[i]) / dt;
                diffc[i] = (snaps[k + 1].c[i] - snaps[k].c[i]) / dt;
            }
            const double h1wt = discrete_norm(diffw, grid, NormKind::H1);
            const double h1ct = discrete_norm(diffc, grid, NormKind::H1);
            int_h1_wt += h1wt * h1wt * dt;
            int_h1_ct += h1ct * h1ct * dt;

            const auto crrr = third_derivative_surrogate(snaps[k].c, grid);
            const double l2crrr = discrete_norm(crrr, grid, NormKind::L2);
            int_l2_crrr += l2crrr * l2crrr * dt;
        }
    }

    const bool kpos = params.kappa > 0.0;
    const double wcrr = kpos ? std::sqrt(params.eps) : 1.0;
    const double wcrrr = kpos ? std::pow(params.eps, 1.5) : params.eps;
    return MonitorTable{
        {"sup_t_H1sq_w", sup_h1_w},
        {"sup_t_H1sq_c", sup_h1_c},
        {"int_t_H1sq_wt", int_h1_wt},
        {"int_t_H1sq_ct", int_h1_ct},
        {kpos ? "eps12_sup_t_L2sq_crr" : "sup_t_L2sq_crr", wcrr * sup_l2_crr},
        {kpos ? "eps32_int_t_L2sq_crrr" : "eps_int_t_L2sq_crrr", wcrrr * int_l2_crrr},
    };
}

/// Diagnostics row shared by both solvers. Computes each derivative field
/// once; the norm values agree with discrete_norm / entropy_functional.
inline DiagnosticsRow make_diagnostics_row(const FieldState& state, const RadialGrid& grid, const StepReport* rep) {
    DiagnosticsRow row;
    row.t = state.t;
    row.mass = weighted_integral(state.w, grid);
    row.c_min = *std::min_element(state.c.begin(), state.c.end());
    row.c_max = *std::max_element(state.c.begin(), state.c.end());

    std::vector<double> sq(grid.size());
    auto usq = [&](const std::vector<double>& v) {
        for (size_t i = 0; i < grid.size(); ++i) sq[i] = v[i] * v[i];
        return unweighted_integral(sq, grid);
    };
    auto wsq = [&](const std::vector<double>& v) {
        for (size_t i = 0; i < grid.size(); ++i) sq[i] = v[i] * v[i];
        return weighted_integral(sq, grid);
    };

    const auto d1w = first_derivative(state.w, grid);
    const auto d2w = second_derivative(state.w, grid);
    const auto d1c = first_derivative(state.c, grid);
    const auto d2c = second_derivative(state.c, grid);
    const double l2w2 = usq(state.w), d1w2 = usq(d1w), d2w2 = usq(d2w);
    const double l2c2 = usq(state.c), d1c2 = usq(d1c), d2c2 = usq(d2c);
    row.l2_w = std::sqrt(l2w2);
    row.h1_w = std::sqrt(l2w2 + d1w2);
    row.h2_w = std::sqrt(l2w2 + d1w2 + d2w2);
    row.l2_c = std::sqrt(l2c2);
    row.h1_c = std::sqrt(l2c2 + d1c2);
    row.h2_c = std::sqrt(l2c2 + d1c2 + d2c2);
    row.h2_c_weighted = std::sqrt(wsq(state.c) + wsq(d1c) + wsq(d2c));

    // entropy pieces: A = int r^{n-1}(w log w - w + 1), B = int r^{n-1}(d_r sqrt c)^2
    std::vector<double> tmp(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        const double w = state.w[i];
        if (w < 0.0) throw std::domain_error("make_diagnostics_row: negative w");
        tmp[i] = ((w < 1e-300) ? 0.0 : w * std::log(w)) - w + 1.0;
    }
    const double ent_a = weighted_integral(tmp, grid);
    for (size_t i = 0; i < grid.size(); ++i) {
        if (!(state.c[i] > 0.0)) throw std::domain_error("make_diagnostics_row: c must be positive");
        tmp[i] = std::sqrt(state.c[i]);
    }
    const double ent_b = wsq(first_derivative(tmp, grid));
    row.entropy = ent_a + ent_b;
    row.entropy_lyap = ent_a + 2.0 * ent_b;

    row.sup_w = discrete_norm(state.w, grid, NormKind::SupC);
    row.sup_c = discrete_norm(state.c, grid, NormKind::SupC);
    if (rep) {
        row.dt_used = rep->dt_used;
        row.w_min_pre_clamp = rep->w_min_pre_clamp;
        row.clamp_count = rep->clamp_count;
        row.picard_iters = rep->picard_iters;
    }
    return row;
}

}  // namespace chemobl
