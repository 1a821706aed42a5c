#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "chemobl/analysis.hpp"
#include "chemobl/fields.hpp"
#include "chemobl/grid.hpp"
#include "chemobl/limit_state.hpp"
#include "chemobl/scheme.hpp"
#include "chemobl/trajectory.hpp"

namespace chemobl {

inline LimitState make_limit_state(const InitialData& init, const RadialGrid& grid) {
    detail::require_length(init.w0, grid, "make_limit_state");
    detail::require_length(init.c0, grid, "make_limit_state");
    LimitState s;
    s.w0_field = init.w0;
    s.c0_field = init.c0;
    s.c0_wall_a = init.c0.front();
    s.c0_wall_b = init.c0.back();
    return s;
}

/// Closed-form wall oxygen c0(wall) * exp(-\int_0^t w0(wall)), evaluated from
/// the stored history integral, independent of the stepped c field.
inline double limit_boundary_c(const LimitState& state, Endpoint end) {
    const double iw = (end == Endpoint::Inner) ? state.int_w_a : state.int_w_b;
    const double c0w = (end == Endpoint::Inner) ? state.c0_wall_a : state.c0_wall_b;
    return c0w * std::exp(-iw);
}

/// Closed-form wall oxygen gradient
///   -kappa [lambda - c0(a)] exp(-\int_0^t (w0 c0 + w0)(a))   at r=a,
///   +kappa [lambda - c0(b)] exp(-\int_0^t (w0 c0 + w0)(b))   at r=b.
inline double limit_boundary_cr(const LimitState& state, Endpoint end, const ModelParams& params) {
    const double iw = (end == Endpoint::Inner) ? state.int_w_a : state.int_w_b;
    const double iwc = (end == Endpoint::Inner) ? state.int_wc_a : state.int_wc_b;
    const double c0w = (end == Endpoint::Inner) ? state.c0_wall_a : state.c0_wall_b;
    const double sign = (end == Endpoint::Inner) ? -1.0 : 1.0;
    return sign * params.kappa * (params.lambda - c0w) * std::exp(-(iwc + iw));
}

/// Advances the limit system by one step. The oxygen ODE c_t = -w c is
/// integrated with the exact per-step exponential using the trapezoidal time
/// average of w, realized as a predictor pass (left-endpoint w supplies the
/// drift for the w-step) and an exact corrector. w uses the same conservative
/// machinery as the diffusive solver with zero total wall flux.
inline std::pair<LimitState, StepReport> step_limit(const LimitState& state, const ModelParams& params,
                                                    const SchemeConfig& cfg, const RadialGrid& grid,
                                                    double dt_override = 0.0) {
    cfg.validate();
    detail::require_length(state.w0_field, grid, "step_limit");
    detail::require_length(state.c0_field, grid, "step_limit");

    const double limit = detail::cfl_limit(state.c0_field, grid, cfg);
    double dt = (dt_override > 0.0) ? dt_override : params.dt;
    if (cfg.adaptive_dt)
        dt = std::min({limit, grid.spacing, dt});
    else if (dt > limit * (1.0 + 1e-9))
        throw solver_error("advective CFL violated in limit step", state.t);

    StepReport rep;
    rep.dt_used = dt;
    rep.mass_before = weighted_integral(state.w0_field, grid);

    const size_t nn = grid.size();
    // predictor: c with left-endpoint w
    std::vector<double> c_pred(nn);
    for (size_t i = 0; i < nn; ++i) c_pred[i] = state.c0_field[i] * std::exp(-dt * state.w0_field[i]);

    auto wres = detail::advance_w(state.w0_field, c_pred, dt, grid, cfg, state.t);

    // corrector: exact exponential with the trapezoidal average of w
    LimitState next;
    next.t = state.t + dt;
    next.w0_field = std::move(wres.w);
    next.c0_field.resize(nn);
    for (size_t i = 0; i < nn; ++i) {
        const double wbar = 0.5 * (state.w0_field[i] + next.w0_field[i]);
        next.c0_field[i] = state.c0_field[i] * std::exp(-dt * wbar);
    }
    next.c0_wall_a = state.c0_wall_a;
    next.c0_wall_b = state.c0_wall_b;

    // boundary history integrals, trapezoid in time
    const size_t last = nn - 1;
    next.int_w_a = state.int_w_a + 0.5 * dt * (state.w0_field[0] + next.w0_field[0]);
    next.int_w_b = state.int_w_b + 0.5 * dt * (state.w0_field[last] + next.w0_field[last]);
    next.int_wc_a = state.int_wc_a +
                    0.5 * dt * (state.w0_field[0] * state.c0_field[0] + next.w0_field[0] * next.c0_field[0]);
    next.int_wc_b = state.int_wc_b + 0.5 * dt * (state.w0_field[last] * state.c0_field[last] +
                                                 next.w0_field[last] * next.c0_field[last]);

    rep.picard_iters = wres.picard_iters;
    rep.w_min_pre_clamp = wres.min_pre_clamp;
    rep.clamp_count = wres.clamp_count;
    rep.mass_after = weighted_integral(next.w0_field, grid);
    rep.c_min = *std::min_element(next.c0_field.begin(), next.c0_field.end());
    rep.c_max = *std::max_element(next.c0_field.begin(), next.c0_field.end());
    return {std::move(next), rep};
}

/// Runs the limit solver to t_final; snapshots and diagnostics as run_eps,
/// with the analytic wall values recorded alongside the stepped fields.
inline TrajectoryRecord run_limit(const InitialData& init, const ModelParams& params, const SchemeConfig& cfg,
                                  const RadialGrid& grid, int snapshot_stride = 1,
                                  LimitState* final_state_out = nullptr) {
    params.validate();
    cfg.validate();
    if (snapshot_stride < 1) throw std::invalid_argument("run_limit: snapshot_stride must be >= 1");

    TrajectoryRecord record;
    record.preset_name = init.preset_name;
    LimitState state = make_limit_state(init, grid);
    record.initial_mass = weighted_integral(state.w0_field, grid);
    record.c_bound = std::max(*std::max_element(init.c0.begin(), init.c0.end()), params.lambda);

    auto wall_sample = [&](const LimitState& s) {
        const size_t last = grid.size() - 1;
        WallSample ws;
        ws.t = s.t;
        ws.w_a = s.w0_field[0];
        ws.w_b = s.w0_field[last];
        ws.c_a = s.c0_field[0];
        ws.c_b = s.c0_field[last];
        ws.int_w_a = s.int_w_a;
        ws.int_w_b = s.int_w_b;
        ws.int_wc_a = s.int_wc_a;
        ws.int_wc_b = s.int_wc_b;
        ws.c_ana_a = limit_boundary_c(s, Endpoint::Inner);
        ws.c_ana_b = limit_boundary_c(s, Endpoint::Outer);
        ws.cr_ana_a = limit_boundary_cr(s, Endpoint::Inner, params);
        ws.cr_ana_b = limit_boundary_cr(s, Endpoint::Outer, params);
        return ws;
    };
    auto as_field = [](const LimitState& s) { return FieldState{s.w0_field, s.c0_field, s.t}; };

    record.snapshots.push_back({0.0, state.w0_field, state.c0_field});
    record.diagnostics.push_back(make_diagnostics_row(as_field(state), grid, nullptr));
    record.wall_series.push_back(wall_sample(state));

    const int steps = cfg.adaptive_dt ? -1 : detail::fixed_step_count(params);
    int k = 0;
    while (state.t < params.t_final * (1.0 - 1e-12)) {
        double dt = params.dt;
        if (!cfg.adaptive_dt && k == steps - 1) dt = params.t_final - state.t;
        if (cfg.adaptive_dt) dt = std::min(dt, params.t_final - state.t);
        auto [next, rep] = step_limit(state, params, cfg, grid, dt);
        detail::enforce_step_invariants(rep, cfg, record.c_bound, state.t);
        state = std::move(next);
        ++k;
        record.total_clamp_events += rep.clamp_count;
        record.diagnostics.push_back(make_diagnostics_row(as_field(state), grid, &rep));
        record.wall_series.push_back(wall_sample(state));
        if (k % snapshot_stride == 0) record.snapshots.push_back({state.t, state.w0_field, state.c0_field});
    }
    if (record.snapshots.back().t < state.t)
        record.snapshots.push_back({state.t, state.w0_field, state.c0_field});
    record.final_state = as_field(state);
    record.total_steps = k;
    if (final_state_out) *final_state_out = std::move(state);
    return record;
}

}  // namespace chemobl
