#pragma once

#include <string>

#include "chemobl/fields.hpp"
#include "chemobl/grid.hpp"
#include "chemobl/io.hpp"
#include "chemobl/scheme.hpp"

namespace chemobl {

/// One run's complete configuration, assembled from a sectioned config file.
struct RunConfig {
    double a = 1.0, b = 2.0;
    int n_dim = 3;
    int num_nodes = 801;
    ModelParams params;
    SchemeConfig scheme;
    std::string preset = "cosine_bump";
    PresetOptions preset_opts;
    double tol_compat = 1e-8;
    std::string output_dir = "out";
    int stride = 50;

    RadialGrid make_grid() const { return RadialGrid(a, b, n_dim, num_nodes); }
    InitialData make_init(const RadialGrid& grid) const { return make_preset(preset, grid, params, preset_opts); }
};

inline RunConfig run_config_from(const ConfigMap& m) {
    RunConfig rc;
    rc.a = cfg_num(m, "domain.a", rc.a);
    rc.b = cfg_num(m, "domain.b", rc.b);
    rc.n_dim = static_cast<int>(cfg_num(m, "domain.n", rc.n_dim));
    rc.num_nodes = static_cast<int>(cfg_num(m, "domain.N", rc.num_nodes));
    rc.params.eps = cfg_num(m, "model.eps", rc.params.eps);
    rc.params.kappa = cfg_num(m, "model.kappa", rc.params.kappa);
    rc.params.lambda = cfg_num(m, "model.lambda", rc.params.lambda);
    rc.params.t_final = cfg_num(m, "time.T", rc.params.t_final);
    rc.params.dt = cfg_num(m, "time.dt", rc.params.dt);
    rc.scheme.cfl_advect = cfg_num(m, "time.cfl", rc.scheme.cfl_advect);
    rc.scheme.adaptive_dt = cfg_num(m, "time.adaptive", 0.0) != 0.0;
    rc.scheme.theta = cfg_num(m, "scheme.theta", rc.scheme.theta);
    rc.scheme.max_picard = static_cast<int>(cfg_num(m, "scheme.max_picard", rc.scheme.max_picard));
    rc.scheme.tol_picard = cfg_num(m, "scheme.tol_picard", rc.scheme.tol_picard);
    rc.scheme.tol_mass = cfg_num(m, "scheme.tol_mass", rc.scheme.tol_mass);
    rc.scheme.tol_max = cfg_num(m, "scheme.tol_max", rc.scheme.tol_max);
    rc.tol_compat = cfg_num(m, "scheme.tol_compat", rc.tol_compat);
    rc.preset = cfg_str(m, "init.preset", rc.preset);
    rc.preset_opts.amp_base = cfg_num(m, "init.A", rc.preset_opts.amp_base);
    rc.preset_opts.amp_cos = cfg_num(m, "init.B", rc.preset_opts.amp_cos);
    rc.output_dir = cfg_str(m, "output.dir", rc.output_dir);
    rc.stride = static_cast<int>(cfg_num(m, "output.stride", rc.stride));
    return rc;
}

}  // namespace chemobl
