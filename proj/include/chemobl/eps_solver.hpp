#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "chemobl/analysis.hpp"
#include "chemobl/fields.hpp"
#include "chemobl/grid.hpp"
#include "chemobl/scheme.hpp"
#include "chemobl/trajectory.hpp"

namespace chemobl {

/// Advances (w, c) by one step of the diffusive system. The oxygen equation is
/// stepped first (implicit radial diffusion with Robin ghost closure, implicit
/// reaction), then the bacterial equation in divergence form with the
/// chemotactic drift taken from the just-updated c. dt must respect the
/// advective CFL bound; violations are rejected with a solver_error.
inline std::pair<FieldState, StepReport> step_eps(const FieldState& state, const ModelParams& params,
                                                  const SchemeConfig& cfg, const RadialGrid& grid,
                                                  double dt_override = 0.0) {
    params.validate();
    cfg.validate();
    detail::require_length(state.w, grid, "step_eps");
    detail::require_length(state.c, grid, "step_eps");

    const double limit = detail::cfl_limit(state.c, grid, cfg);
    double dt = (dt_override > 0.0) ? dt_override : params.dt;
    if (cfg.adaptive_dt)
        dt = std::min({limit, grid.spacing, dt});
    else if (dt > limit * (1.0 + 1e-9))
        throw solver_error("advective CFL violated: dt=" + std::to_string(dt) + " > " + std::to_string(limit),
                           state.t);

    StepReport rep;
    rep.dt_used = dt;
    rep.mass_before = weighted_integral(state.w, grid);

    FieldState next;
    next.t = state.t + dt;
    next.c = detail::advance_c(state.c, state.w, dt, params, grid, cfg, state.t);
    auto wres = detail::advance_w(state.w, next.c, dt, grid, cfg, state.t);
    next.w = std::move(wres.w);

    rep.picard_iters = wres.picard_iters;
    rep.w_min_pre_clamp = wres.min_pre_clamp;
    rep.clamp_count = wres.clamp_count;
    rep.mass_after = weighted_integral(next.w, grid);
    rep.c_min = *std::min_element(next.c.begin(), next.c.end());
    rep.c_max = *std::max_element(next.c.begin(), next.c.end());
    return {std::move(next), rep};
}

/// Runs the diffusive solver to t_final, recording snapshots every
/// `snapshot_stride` steps (plus the initial and final states), per-step
/// diagnostics, and the wall-value series.
inline TrajectoryRecord run_eps(const InitialData& init, const ModelParams& params, const SchemeConfig& cfg,
                                const RadialGrid& grid, int snapshot_stride = 1) {
    params.validate();
    cfg.validate();
    if (snapshot_stride < 1) throw std::invalid_argument("run_eps: snapshot_stride must be >= 1");
    if (params.eps > 0.0) {
        const auto compat = check_compatibility(init, params, grid, cfg.tol_compat);
        if (!compat.all_pass())
            throw std::invalid_argument("run_eps: initial data fails the compatibility conditions");
    }

    TrajectoryRecord record;
    record.preset_name = init.preset_name;
    FieldState state{init.w0, init.c0, 0.0};
    record.initial_mass = weighted_integral(state.w, grid);
    record.c_bound = std::max(*std::max_element(init.c0.begin(), init.c0.end()), params.lambda);

    const size_t last = grid.size() - 1;
    record.snapshots.push_back({0.0, state.w, state.c});
    record.diagnostics.push_back(make_diagnostics_row(state, grid, nullptr));
    record.wall_series.push_back({0.0, state.w[0], state.w[last], state.c[0], state.c[last]});

    const int steps = cfg.adaptive_dt ? -1 : detail::fixed_step_count(params);
    int k = 0;
    while (state.t < params.t_final * (1.0 - 1e-12)) {
        double dt = params.dt;
        if (!cfg.adaptive_dt && k == steps - 1) dt = params.t_final - state.t;  // land on T exactly
        if (cfg.adaptive_dt) dt = std::min(dt, params.t_final - state.t);
        auto [next, rep] = step_eps(state, params, cfg, grid, dt);
        detail::enforce_step_invariants(rep, cfg, record.c_bound, state.t);
        state = std::move(next);
        ++k;
        record.total_clamp_events += rep.clamp_count;
        record.diagnostics.push_back(make_diagnostics_row(state, grid, &rep));
        record.wall_series.push_back({state.t, state.w[0], state.w[last], state.c[0], state.c[last]});
        if (k % snapshot_stride == 0) record.snapshots.push_back({state.t, state.w, state.c});
    }
    if (record.snapshots.back().t < state.t) record.snapshots.push_back({state.t, state.w, state.c});
    record.final_state = state;
    record.total_steps = k;
    return record;
}

}  // namespace chemobl
