#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "chemobl/grid.hpp"

namespace chemobl {

/// Bacterial density w and oxygen concentration c at one time level.
struct FieldState {
    std::vector<double> w;
    std::vector<double> c;
    double t = 0.0;
};

struct ModelParams {
    double eps = 1e-2;    // oxygen diffusion rate, 0 <= eps < 1
    double kappa = 1.0;   // absorption rate, >= 0
    double lambda = 1.0;  // oxygen saturation, > 0
    double dt = 1e-4;     // fixed time step
    double t_final = 0.5;

    void validate() const {
        if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("ModelParams: eps must be in [0,1)");
        if (!(kappa >= 0.0)) throw std::invalid_argument("ModelParams: kappa must be >= 0");
        if (!(lambda > 0.0)) throw std::invalid_argument("ModelParams: lambda must be > 0");
        if (!(dt > 0.0)) throw std::invalid_argument("ModelParams: dt must be > 0");
        if (!(t_final >= dt)) throw std::invalid_argument("ModelParams: t_final must be >= dt");
    }
};

struct InitialData {
    std::vector<double> w0;
    std::vector<double> c0;
    std::string preset_name;
};

/// Amplitudes of the cosine presets: w0 = A + B cos(pi (r-a)/(b-a)).
struct PresetOptions {
    double amp_base = 1.0;   // A
    double amp_cos = 0.5;    // B, requires A > B >= 0
};

/// One compatibility residual with its pass flag.
struct CompatEntry {
    std::string label;
    double residual = 0.0;
    bool applicable = true;
    bool pass = true;
};

struct CompatibilityReport {
    double tol = 1e-8;
    CompatEntry w_flux_a, w_flux_b, robin_a, robin_b;
    bool all_pass() const {
        return w_flux_a.pass && w_flux_b.pass && robin_a.pass && robin_b.pass;
    }
};

namespace detail {

struct TableRow {
    double r, w, c;
};

inline std::vector<TableRow> read_initial_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("initial-data file not readable: " + path);
    std::vector<TableRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        TableRow row{};
        if (ls >> row.r >> row.w >> row.c) rows.push_back(row);
    }
    if (rows.size() < 2) throw std::invalid_argument("initial-data file needs at least 2 rows: " + path);
    for (size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].r > rows[i - 1].r))
            throw std::invalid_argument("initial-data rows must be strictly ascending in r: " + path);
    return rows;
}

inline double interp_column(const std::vector<TableRow>& rows, double r, bool want_w) {
    size_t k = 1;
    while (k + 1 < rows.size() && rows[k].r < r) ++k;
    const auto& lo = rows[k - 1];
    const auto& hi = rows[k];
    const double s = (r - lo.r) / (hi.r - lo.r);
    return want_w ? lo.w + s * (hi.w - lo.w) : lo.c + s * (hi.c - lo.c);
}

}  // namespace detail

/// Builds nodal initial data from a named preset or a tabulated "file:<path>".
inline InitialData make_preset(const std::string& name, const RadialGrid& grid, const ModelParams& params,
                               const PresetOptions& opts = {}) {
    const int n = grid.num_nodes;
    const double a = grid.inner_radius;
    const double b = grid.outer_radius;
    const double span = b - a;
    InitialData init;
    init.preset_name = name;
    init.w0.assign(grid.size(), 0.0);
    init.c0.assign(grid.size(), params.lambda);

    if (name == "zero_bacteria") {
        return init;
    }
    if (name == "cosine_bump" || name == "neumann_pair") {
        if (!(opts.amp_base > opts.amp_cos && opts.amp_cos >= 0.0))
            throw std::invalid_argument("make_preset: cosine amplitudes need A > B >= 0");
        for (int i = 0; i < n; ++i) {
            const double phase = std::numbers::pi * (grid.node(i) - a) / span;
            init.w0[static_cast<size_t>(i)] = opts.amp_base + opts.amp_cos * std::cos(phase);
            if (name == "neumann_pair")
                init.c0[static_cast<size_t>(i)] = params.lambda * (1.0 + 0.5 * std::cos(phase));
        }
        return init;
    }
    if (name == "no_layer") {
        // w0 == 0 with a nonconstant c0 that satisfies the Robin relations
        // c0_r(a) = -kappa[lambda-c0(a)], c0_r(b) = kappa[lambda-c0(b)] exactly:
        // c0 = lambda - (lambda/2) exp(-kappa (r-m)^2/(b-a)), m the midpoint.
        const double m = 0.5 * (a + b);
        for (int i = 0; i < n; ++i) {
            const double r = grid.node(i);
            const double g = std::exp(-params.kappa * (r - m) * (r - m) / span);
            init.c0[static_cast<size_t>(i)] = params.lambda - 0.5 * params.lambda * g;
        }
        return init;
    }
    if (name.rfind("file:", 0) == 0) {
        const auto rows = detail::read_initial_table(name.substr(5));
        const double slack = 1e-12 * span;
        if (rows.front().r > a + slack || rows.back().r < b - slack)
            throw std::invalid_argument("initial-data file does not cover [a,b]");
        for (int i = 0; i < n; ++i) {
            const double r = grid.node(i);
            init.w0[static_cast<size_t>(i)] = detail::interp_column(rows, r, true);
            init.c0[static_cast<size_t>(i)] = detail::interp_column(rows, r, false);
        }
        return init;
    }
    throw std::invalid_argument("make_preset: unknown preset name '" + name + "'");
}

namespace detail {

/// Fourth-order one-sided wall derivatives (5-point stencils), sharp enough
/// that compatible presets leave only roundoff-scale residuals on fine grids.
inline std::pair<double, double> wall_first_derivatives(std::span<const double> v, const RadialGrid& grid) {
    if (grid.num_nodes < 5)
        throw std::invalid_argument("wall_first_derivatives: need at least 5 nodes");
    const double h = grid.spacing;
    const size_t m = grid.size() - 1;
    const double da = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h);
    const double db =
        (25.0 * v[m] - 48.0 * v[m - 1] + 36.0 * v[m - 2] - 16.0 * v[m - 3] + 3.0 * v[m - 4]) / (12.0 * h);
    return {da, db};
}

}  // namespace detail

/// Discrete residuals of the t=0 compatibility conditions: zero bacterial flux
/// w0_r = w0 c0_r at both walls, and the Robin relations for c0 (the latter only
/// when the diffusive (eps>0) boundary conditions apply).
inline CompatibilityReport check_compatibility(const InitialData& init, const ModelParams& params,
                                               const RadialGrid& grid, double tol = 1e-8) {
    detail::require_length(init.w0, grid, "check_compatibility");
    detail::require_length(init.c0, grid, "check_compatibility");
    const auto [w0r_a, w0r_b] = detail::wall_first_derivatives(init.w0, grid);
    const auto [c0r_a, c0r_b] = detail::wall_first_derivatives(init.c0, grid);
    const size_t last = grid.size() - 1;

    CompatibilityReport rep;
    rep.tol = tol;
    rep.w_flux_a = {"w0_r - w0 c0_r at r=a", std::abs(w0r_a - init.w0[0] * c0r_a), true, true};
    rep.w_flux_b = {"w0_r - w0 c0_r at r=b", std::abs(w0r_b - init.w0[last] * c0r_b), true, true};
    const bool robin_applies = params.eps > 0.0;
    rep.robin_a = {"c0_r + kappa (lambda - c0) at r=a",
                   std::abs(c0r_a + params.kappa * (params.lambda - init.c0[0])), robin_applies, true};
    rep.robin_b = {"c0_r - kappa (lambda - c0) at r=b",
                   std::abs(c0r_b - params.kappa * (params.lambda - init.c0[last])), robin_applies, true};
    for (CompatEntry* e : {&rep.w_flux_a, &rep.w_flux_b, &rep.robin_a, &rep.robin_b})
        e->pass = !e->applicable || e->residual <= tol;
    return rep;
}

}  // namespace chemobl
