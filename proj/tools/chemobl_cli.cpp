// Command-line laboratory for the radial chemotaxis-oxygen system: single
// trajectories, eps/limit comparisons, eps sweeps with rate fits, initial-data
// compatibility reports, and the packaged verification experiments.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "chemobl/analysis.hpp"
#include "chemobl/config.hpp"
#include "chemobl/eps_solver.hpp"
#include "chemobl/experiments.hpp"
#include "chemobl/io.hpp"
#include "chemobl/limit_solver.hpp"

namespace fs = std::filesystem;
using namespace chemobl;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_override;
    std::string preset_override;
    double eps_override = -1.0;
    double dt_override = -1.0;
    double t_override = -1.0;
    int nodes_override = -1;
    int stride_override = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
    auto* c = cmd->add_option("--config", opts.config_path, "sectioned key=value config file");
    if (config_required) c->required();
    cmd->add_option("--out", opts.out_override, "output directory (overrides [output] dir)");
    cmd->add_option("--preset", opts.preset_override, "initial-data preset (overrides [init] preset)");
    cmd->add_option("--eps", opts.eps_override, "oxygen diffusion rate (overrides [model] eps)");
    cmd->add_option("--dt", opts.dt_override, "time step (overrides [time] dt)");
    cmd->add_option("--T", opts.t_override, "horizon (overrides [time] T)");
    cmd->add_option("--N", opts.nodes_override, "node count (overrides [domain] N)");
    cmd->add_option("--stride", opts.stride_override, "snapshot stride (overrides [output] stride)");
}

RunConfig load_run_config(const CommonOpts& opts) {
    RunConfig rc = opts.config_path.empty() ? RunConfig{} : run_config_from(parse_config_file(opts.config_path));
    if (!opts.out_override.empty()) rc.output_dir = opts.out_override;
    if (!opts.preset_override.empty()) rc.preset = opts.preset_override;
    if (opts.eps_override >= 0.0) rc.params.eps = opts.eps_override;
    if (opts.dt_override > 0.0) rc.params.dt = opts.dt_override;
    if (opts.t_override > 0.0) rc.params.t_final = opts.t_override;
    if (opts.nodes_override > 0) rc.num_nodes = opts.nodes_override;
    if (opts.stride_override > 0) rc.stride = opts.stride_override;
    return rc;
}

fs::path prepare_out_dir(const RunConfig& rc) {
    const fs::path dir = resolve_output_dir(rc.output_dir);
    fs::create_directories(dir);
    return dir;
}

int cmd_run(const CommonOpts& opts, bool limit) {
    const RunConfig rc = load_run_config(opts);
    const RadialGrid grid = rc.make_grid();
    const InitialData init = rc.make_init(grid);
    const fs::path dir = prepare_out_dir(rc);

    TrajectoryRecord rec = limit ? run_limit(init, rc.params, rc.scheme, grid, rc.stride)
                                 : run_eps(init, rc.params, rc.scheme, grid, rc.stride);
    write_snapshots_csv((dir / "snapshots.csv").string(), rec, grid);
    write_diagnostics_csv((dir / "diagnostics.csv").string(), rec);
    write_wall_csv((dir / "wall.csv").string(), rec);
    std::printf("%s: %d steps to t=%s, %zu snapshots -> %s\n", limit ? "limit" : "run", rec.total_steps,
                fmt17(rec.final_state.t).c_str(), rec.snapshots.size(), dir.string().c_str());
    return 0;
}

int cmd_compare(const CommonOpts& opts, double delta_exponent) {
    RunConfig rc = load_run_config(opts);
    const RadialGrid grid = rc.make_grid();
    const InitialData init = rc.make_init(grid);
    const fs::path dir = prepare_out_dir(rc);

    RunConfig lc = rc;
    lc.params.eps = 0.0;
    const TrajectoryRecord lim = run_limit(init, lc.params, lc.scheme, grid, lc.stride);
    const TrajectoryRecord ep = run_eps(init, rc.params, rc.scheme, grid, rc.stride);
    if (ep.snapshots.size() != lim.snapshots.size())
        throw std::runtime_error("compare: snapshot counts differ between solvers");

    const double delta = std::pow(rc.params.eps, delta_exponent);
    std::ofstream out(dir / "compare.csv");
    out << "t,sup_w,sup_c,l2_w,l2_c,h1_w,h1_c,h2_w,h2_c,grad_full_w,grad_full_c,grad_int_w,grad_int_c\n";
    std::vector<double> dw(grid.size()), dc(grid.size());
    for (size_t s = 0; s < ep.snapshots.size(); ++s) {
        const auto& se = ep.snapshots[s];
        const auto& sl = lim.snapshots[s];
        for (size_t i = 0; i < grid.size(); ++i) {
            dw[i] = se.w[i] - sl.w[i];
            dc[i] = se.c[i] - sl.c[i];
        }
        out << fmt17(se.t) << ',' << fmt17(discrete_norm(dw, grid, NormKind::SupC)) << ','
            << fmt17(discrete_norm(dc, grid, NormKind::SupC)) << ',' << fmt17(discrete_norm(dw, grid, NormKind::L2))
            << ',' << fmt17(discrete_norm(dc, grid, NormKind::L2)) << ','
            << fmt17(discrete_norm(dw, grid, NormKind::H1)) << ',' << fmt17(discrete_norm(dc, grid, NormKind::H1))
            << ',' << fmt17(discrete_norm(dw, grid, NormKind::H2)) << ','
            << fmt17(discrete_norm(dc, grid, NormKind::H2)) << ',' << fmt17(full_gradient_error(se.w, sl.w, grid))
            << ',' << fmt17(full_gradient_error(se.c, sl.c, grid)) << ','
            << fmt17(interior_gradient_error(se.w, sl.w, grid, delta)) << ','
            << fmt17(interior_gradient_error(se.c, sl.c, grid, delta)) << '\n';
    }
    std::printf("compare: eps=%s vs limit, %zu snapshot times -> %s\n", fmt17(rc.params.eps).c_str(),
                ep.snapshots.size(), (dir / "compare.csv").string().c_str());
    return 0;
}

int cmd_sweep(const CommonOpts& opts, std::string eps_csv) {
    RunConfig rc = load_run_config(opts);
    std::vector<double> eps_list;
    if (!eps_csv.empty()) {
        std::istringstream ls(eps_csv);
        std::string item;
        while (std::getline(ls, item, ','))
            if (!item.empty()) eps_list.push_back(std::stod(item));
    } else if (!opts.config_path.empty()) {
        eps_list = cfg_list(parse_config_file(opts.config_path), "experiment.eps_list");
    }
    if (eps_list.size() < 2) throw std::invalid_argument("sweep: need at least 2 eps values (--eps-list)");

    const RadialGrid grid = rc.make_grid();
    const InitialData init = rc.make_init(grid);
    const fs::path dir = prepare_out_dir(rc);

    RunConfig lc = rc;
    lc.params.eps = 0.0;
    const TrajectoryRecord lim = run_limit(init, lc.params, lc.scheme, grid, lc.stride);

    std::vector<EpsErrorRow> table;
    for (double eps : eps_list) {
        RunConfig ec = rc;
        ec.params.eps = eps;
        const TrajectoryRecord ep = run_eps(init, ec.params, ec.scheme, grid, ec.stride);
        EpsErrorRow row;
        row.eps = eps;
        row.errors = detail::pair_error_metrics(ep, lim, grid, std::pow(eps, 0.4));
        table.push_back(std::move(row));
    }

    std::ofstream out(dir / "sweep_errors.csv");
    out << "eps";
    for (const auto& [k, v] : table.front().errors) out << ',' << k;
    out << '\n';
    for (const auto& row : table) {
        out << fmt17(row.eps);
        for (const auto& [k, v] : row.errors) out << ',' << fmt17(v);
        out << '\n';
    }

    nlohmann::json j;
    j["eps_list"] = eps_list;
    for (const char* key : {"sup_w", "sup_c", "h1_w", "h1_c", "h2_w", "h2_c"}) {
        std::vector<std::pair<double, double>> samples;
        for (const auto& row : table) samples.emplace_back(row.eps, row.errors.at(key));
        const RateFit fit = fit_rate(samples);
        j["fits"][key] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"max_residual", fit.max_residual}};
        std::printf("sweep: %-6s slope=%.4f max_residual=%.4f\n", key, fit.slope, fit.max_residual);
    }
    std::ofstream js(dir / "ratefit.json");
    js << j.dump(2) << '\n';
    return 0;
}

int cmd_check_compat(const CommonOpts& opts) {
    const RunConfig rc = load_run_config(opts);
    const RadialGrid grid = rc.make_grid();
    const InitialData init = rc.make_init(grid);
    const CompatibilityReport rep = check_compatibility(init, rc.params, grid, rc.tol_compat);
    std::printf("compatibility of preset '%s' (N=%d, kappa=%s, lambda=%s, tol=%s):\n", rc.preset.c_str(),
                rc.num_nodes, fmt17(rc.params.kappa).c_str(), fmt17(rc.params.lambda).c_str(),
                fmt17(rep.tol).c_str());
    for (const CompatEntry* e : {&rep.w_flux_a, &rep.w_flux_b, &rep.robin_a, &rep.robin_b}) {
        if (!e->applicable)
            std::printf("  [ -- ] %-35s residual=%s (eps=0: not applicable)\n", e->label.c_str(),
                        fmt17(e->residual).c_str());
        else
            std::printf("  [%s] %-35s residual=%s\n", e->pass ? "PASS" : "FAIL", e->label.c_str(),
                        fmt17(e->residual).c_str());
    }
    return rep.all_pass() ? 0 : 1;
}

int cmd_experiment(const std::string& name, const CommonOpts& opts) {
    const std::string cfg_path = find_experiment_config(name, opts.config_path);
    ConfigMap m = parse_config_file(cfg_path);
    ExperimentSpec spec = experiment_spec_from(m);
    if (spec.name.empty()) spec.name = name;
    if (spec.name != name)
        throw std::invalid_argument("config file is for experiment '" + spec.name + "', not '" + name + "'");
    if (!opts.out_override.empty()) spec.base.output_dir = opts.out_override;

    const ExperimentResult res = run_experiment(spec);
    for (const auto& v : res.verdicts)
        std::printf("[%s] %s: %s (value=%.6g, threshold=%.6g)%s%s\n", v.pass ? "PASS" : "FAIL", res.name.c_str(),
                    v.name.c_str(), v.value, v.threshold, v.note.empty() ? "" : " -- ", v.note.c_str());
    for (double eps : res.dropped_eps)
        std::printf("note: eps=%s dropped (below the discretization floor)\n", fmt17(eps).c_str());
    std::printf("%s: %s\n", res.name.c_str(), res.pass() ? "ALL CRITERIA PASS" : "CRITERIA FAILED");
    return res.pass() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial chemotaxis-oxygen boundary-layer laboratory"};
    app.require_subcommand(1);

    CommonOpts run_opts, limit_opts, cmp_opts, sweep_opts, compat_opts, exp_opts;
    double cmp_delta_exp = 0.4;
    std::string sweep_eps_csv, exp_name;

    auto* c_run = app.add_subcommand("run", "integrate the diffusive (eps>0) system, write CSV snapshots");
    add_common(c_run, run_opts);
    auto* c_limit = app.add_subcommand("limit", "integrate the eps=0 limit system, write CSV snapshots");
    add_common(c_limit, limit_opts);
    auto* c_cmp = app.add_subcommand("compare", "run both solvers on the shared grid, emit error norms vs t");
    add_common(c_cmp, cmp_opts);
    c_cmp->add_option("--delta-exp", cmp_delta_exp, "interior margin delta = eps^exponent (default 0.4)");
    auto* c_sweep = app.add_subcommand("sweep", "error-vs-eps table and log-log rate fit");
    add_common(c_sweep, sweep_opts);
    c_sweep->add_option("--eps-list", sweep_eps_csv, "comma-separated eps values (else [experiment] eps_list)");
    auto* c_compat = app.add_subcommand("check-compat", "print the initial-data compatibility residual report");
    add_common(c_compat, compat_opts);
    auto* c_exp = app.add_subcommand("experiment", "run a named experiment end-to-end and print verdicts");
    c_exp->add_option("name", exp_name, "rate-kpos | rate-kzero | bl-thickness | no-layer | monitor")->required();
    add_common(c_exp, exp_opts, /*config_required=*/false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (c_run->parsed()) return cmd_run(run_opts, false);
        if (c_limit->parsed()) return cmd_run(limit_opts, true);
        if (c_cmp->parsed()) return cmd_compare(cmp_opts, cmp_delta_exp);
        if (c_sweep->parsed()) return cmd_sweep(sweep_opts, sweep_eps_csv);
        if (c_compat->parsed()) return cmd_check_compat(compat_opts);
        if (c_exp->parsed()) return cmd_experiment(exp_name, exp_opts);
    } catch (const solver_error& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
