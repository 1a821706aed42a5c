#pragma once

#include <string>
#include <vector>

#include "chemobl/fields.hpp"

namespace chemobl {

struct Snapshot {
    double t = 0.0;
    std::vector<double> w;
    std::vector<double> c;
};

/// Per-step scalar diagnostics (one row per completed step, plus t=0).
struct DiagnosticsRow {
    double t = 0.0;
    double mass = 0.0;
    double c_min = 0.0;
    double c_max = 0.0;
    double entropy = 0.0;       // \int r^{n-1}(w log w - w + 1) + \int r^{n-1}(d_r sqrt c)^2
    double entropy_lyap = 0.0;  // same with coefficient 2 on the gradient term
    double l2_w = 0.0;
    double h1_w = 0.0;
    double h2_w = 0.0;
    double l2_c = 0.0;
    double h1_c = 0.0;
    double h2_c = 0.0;
    double h2_c_weighted = 0.0;  // sqrt(weighted L2^2 + |D1|^2 + |D2|^2) of c
    double sup_w = 0.0;
    double sup_c = 0.0;
    double dt_used = 0.0;
    double w_min_pre_clamp = 0.0;
    int clamp_count = 0;
    int picard_iters = 0;
};

/// Wall-value samples recorded every step. For limit runs the accumulator
/// and analytic columns are populated; eps runs carry the field values only.
struct WallSample {
    double t = 0.0;
    double w_a = 0.0, w_b = 0.0;
    double c_a = 0.0, c_b = 0.0;
    double int_w_a = 0.0, int_w_b = 0.0;    // \int_0^t w(wall) dtau
    double int_wc_a = 0.0, int_wc_b = 0.0;  // \int_0^t (w c)(wall) dtau
    double c_ana_a = 0.0, c_ana_b = 0.0;    // closed-form wall values of c
    double cr_ana_a = 0.0, cr_ana_b = 0.0;  // closed-form wall values of c_r
};

struct TrajectoryRecord {
    std::string preset_name;
    std::vector<Snapshot> snapshots;         // every `stride` steps plus t=0 and t=T
    std::vector<DiagnosticsRow> diagnostics; // every step
    std::vector<WallSample> wall_series;     // every step
    FieldState final_state;
    double initial_mass = 0.0;
    double c_bound = 0.0;  // max(||c0||_inf, lambda)
    int total_steps = 0;
    int total_clamp_events = 0;
};

}  // namespace chemobl
