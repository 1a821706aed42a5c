#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "chemobl/analysis.hpp"
#include "chemobl/config.hpp"
#include "chemobl/eps_solver.hpp"
#include "chemobl/io.hpp"
#include "chemobl/limit_solver.hpp"

namespace chemobl {

struct ExperimentSpec {
    std::string name;  // rate-kpos | rate-kzero | bl-thickness | no-layer | monitor
    std::vector<double> eps_list;
    RunConfig base;
    std::map<std::string, double> thresholds;

    double threshold(const std::string& key, double fallback) const {
        const auto it = thresholds.find(key);
        return it == thresholds.end() ? fallback : it->second;
    }

    void validate() const {
        static const char* names[] = {"rate-kpos", "rate-kzero", "bl-thickness", "no-layer", "monitor"};
        bool known = false;
        for (const char* n : names) known = known || name == n;
        if (!known) throw std::invalid_argument("unknown experiment name: " + name);
        if (eps_list.size() < 2) throw std::invalid_argument("experiment needs at least 2 eps values");
        for (size_t i = 0; i < eps_list.size(); ++i) {
            if (!(eps_list[i] > 0.0 && eps_list[i] < 1.0))
                throw std::invalid_argument("eps values must lie in (0,1)");
            if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
                throw std::invalid_argument("eps_list must be strictly decreasing");
        }
        if (name != "rate-kzero") {
            // layer experiments must resolve the thinnest layer: dr <= sqrt(min eps)/4
            const double dr = (base.b - base.a) / static_cast<double>(base.num_nodes - 1);
            if (dr > std::sqrt(eps_list.back()) / 4.0 * (1.0 + 1e-12))
                throw std::invalid_argument("grid too coarse for the smallest eps layer (need dr <= sqrt(eps)/4)");
        }
    }
};

struct Verdict {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string note;
};

struct EpsErrorRow {
    double eps = 0.0;
    std::map<std::string, double> errors;
};

struct ExperimentResult {
    std::string name;
    std::vector<double> eps_list;
    std::vector<double> dropped_eps;
    std::vector<EpsErrorRow> table;
    std::map<std::string, RateFit> fits;
    std::map<std::string, MonitorTable> monitors;  // keyed "kappa=<v>/eps=<v>"
    std::vector<Verdict> verdicts;

    bool pass() const {
        for (const auto& v : verdicts)
            if (!v.pass) return false;
        return true;
    }
};

namespace detail {

/// sup-over-snapshots error metrics between an eps run and the limit run on
/// the shared grid and time points.
inline std::map<std::string, double> pair_error_metrics(const TrajectoryRecord& rec_eps,
                                                        const TrajectoryRecord& rec_lim, const RadialGrid& grid,
                                                        double delta) {
    if (rec_eps.snapshots.size() != rec_lim.snapshots.size())
        throw std::invalid_argument("pair_error_metrics: snapshot counts differ");
    std::map<std::string, double> m;
    const char* keys[] = {"sup_w",      "sup_c",      "h1_w",      "h1_c",      "h2_w",     "h2_c",
                          "grad_full_w", "grad_full_c", "grad_int_w", "grad_int_c"};
    for (const char* k : keys) m[k] = 0.0;

    std::vector<double> dw(grid.size()), dc(grid.size());
    for (size_t s = 0; s < rec_eps.snapshots.size(); ++s) {
        const auto& se = rec_eps.snapshots[s];
        const auto& sl = rec_lim.snapshots[s];
        if (std::abs(se.t - sl.t) > 1e-10 * (1.0 + se.t))
            throw std::invalid_argument("pair_error_metrics: snapshot times differ");
        for (size_t i = 0; i < grid.size(); ++i) {
            dw[i] = se.w[i] - sl.w[i];
            dc[i] = se.c[i] - sl.c[i];
        }
        auto acc = [&](const char* key, double v) { m[key] = std::max(m[key], v); };
        acc("sup_w", discrete_norm(dw, grid, NormKind::SupC));
        acc("sup_c", discrete_norm(dc, grid, NormKind::SupC));
        acc("h1_w", discrete_norm(dw, grid, NormKind::H1));
        acc("h1_c", discrete_norm(dc, grid, NormKind::H1));
        acc("h2_w", discrete_norm(dw, grid, NormKind::H2));
        acc("h2_c", discrete_norm(dc, grid, NormKind::H2));
        acc("grad_full_w", full_gradient_error(se.w, sl.w, grid));
        acc("grad_full_c", full_gradient_error(se.c, sl.c, grid));
        acc("grad_int_w", interior_gradient_error(se.w, sl.w, grid, delta));
        acc("grad_int_c", interior_gradient_error(se.c, sl.c, grid, delta));
    }
    // final-time full-interval gradient mismatches (layer persistence check)
    m["grad_full_w_final"] =
        full_gradient_error(rec_eps.snapshots.back().w, rec_lim.snapshots.back().w, grid);
    m["grad_full_c_final"] =
        full_gradient_error(rec_eps.snapshots.back().c, rec_lim.snapshots.back().c, grid);
    return m;
}

inline std::vector<double> column(const std::vector<EpsErrorRow>& table, const std::string& key) {
    std::vector<double> v;
    v.reserve(table.size());
    for (const auto& row : table) v.push_back(row.errors.at(key));
    return v;
}

inline bool strictly_decreasing(const std::vector<double>& v, double rel_slack = 0.0) {
    for (size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1] * (1.0 + rel_slack))) return false;
    return true;
}

inline std::vector<std::pair<double, double>> zip_samples(const std::vector<double>& eps,
                                                          const std::vector<double>& err) {
    std::vector<std::pair<double, double>> s;
    for (size_t i = 0; i < eps.size(); ++i) s.emplace_back(eps[i], err[i]);
    return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// experiment protocols

class ExperimentRunner {
  public:
    explicit ExperimentRunner(ExperimentSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

    ExperimentResult run() {
        result_ = ExperimentResult{};
        result_.name = spec_.name;
        result_.eps_list = spec_.eps_list;
        if (spec_.name == "rate-kpos")
            run_rate_kpos();
        else if (spec_.name == "rate-kzero")
            run_rate_kzero();
        else if (spec_.name == "bl-thickness")
            run_bl_thickness();
        else if (spec_.name == "no-layer")
            run_no_layer();
        else
            run_monitor();
        persist();
        return result_;
    }

  private:
    ExperimentSpec spec_;
    ExperimentResult result_;

    RunConfig cfg_for(double eps) const {
        RunConfig rc = spec_.base;
        rc.params.eps = eps;
        return rc;
    }

    void add_verdict(const std::string& name, bool pass, double value, double threshold,
                     const std::string& note = "") {
        result_.verdicts.push_back({name, pass, value, threshold, note});
    }

    /// Runs the eps/limit pair for every entry of eps_list and fills the error
    /// table. The limit run is shared across eps values.
    void fill_pair_table(double delta_exponent) {
        const RadialGrid grid = spec_.base.make_grid();
        RunConfig limit_cfg = cfg_for(0.0);
        const InitialData init = limit_cfg.make_init(grid);
        TrajectoryRecord rec_lim = run_limit(init, limit_cfg.params, limit_cfg.scheme, grid, limit_cfg.stride,
                                             &final_limit_state_);
        limit_record_ = std::move(rec_lim);

        for (double eps : spec_.eps_list) {
            RunConfig rc = cfg_for(eps);
            const TrajectoryRecord rec = run_eps(init, rc.params, rc.scheme, grid, rc.stride);
            const double delta = std::pow(eps, delta_exponent);
            EpsErrorRow row;
            row.eps = eps;
            row.errors = detail::pair_error_metrics(rec, limit_record_, grid, delta);
            row.errors["delta"] = delta;
            result_.table.push_back(std::move(row));
        }
    }

    void run_rate_kpos() {
        fill_pair_table(spec_.threshold("delta_exponent", 0.4));
        const double slope_min = spec_.threshold("slope_min", 0.22);
        for (const char* key : {"sup_w", "sup_c"}) {
            const auto errs = detail::column(result_.table, key);
            add_verdict(std::string("monotone_decrease_") + key, detail::strictly_decreasing(errs),
                        errs.back(), errs.front(), "errors along decreasing eps");
            const auto fit = fit_rate(detail::zip_samples(result_.eps_list, errs));
            result_.fits[key] = fit;
            add_verdict(std::string("slope_") + key, fit.slope >= slope_min, fit.slope, slope_min);
        }
    }

    void run_rate_kzero() {
        fill_pair_table(spec_.threshold("delta_exponent", 0.4));
        const double slope_min = spec_.threshold("slope_min", 0.8);
        const double resid_max = spec_.threshold("residual_max", 0.3);
        const double floor_factor = spec_.threshold("floor_factor", 5.0);
        const std::vector<std::string> keys = {"h1_w", "h1_c", "h2_w", "h2_c"};

        // discretization-floor rule: the smallest eps must sit at least
        // floor_factor above the self-convergence estimate, else it is dropped.
        // The coarse metrics are already in the table; only the refined pair
        // (2N-1 nodes, dt/4) is run here.
        auto floor_estimate = [&](double eps, const std::map<std::string, double>& coarse) {
            RunConfig rf = cfg_for(eps);
            rf.num_nodes = 2 * rf.num_nodes - 1;
            rf.params.dt /= 4.0;
            rf.stride *= 4;
            const RadialGrid gridf = rf.make_grid();
            const InitialData initf = rf.make_init(gridf);
            TrajectoryRecord limf = run_limit(initf, rf.params, rf.scheme, gridf, rf.stride);
            TrajectoryRecord epf = run_eps(initf, rf.params, rf.scheme, gridf, rf.stride);
            auto fine = detail::pair_error_metrics(epf, limf, gridf, 0.25);

            std::map<std::string, double> floor;
            for (const auto& k : keys) floor[k] = std::abs(coarse.at(k) - fine.at(k));
            return floor;
        };

        bool floor_cleared = false;
        while (result_.eps_list.size() > 2) {
            const double eps_min = result_.eps_list.back();
            const auto& coarse = result_.table.back().errors;
            const auto floor = floor_estimate(eps_min, coarse);
            bool ok = true;
            for (const auto& k : keys) ok = ok && coarse.at(k) >= floor_factor * floor.at(k);
            if (ok) {
                double worst = 1e300;
                for (const auto& k : keys)
                    worst = std::min(worst, floor.at(k) > 0.0 ? coarse.at(k) / floor.at(k) : 1e300);
                add_verdict("floor_margin", true, worst, floor_factor,
                            "smallest-eps error vs self-convergence floor");
                floor_cleared = true;
                break;
            }
            result_.dropped_eps.push_back(eps_min);
            result_.eps_list.pop_back();
            result_.table.pop_back();
        }
        if (!floor_cleared && !result_.dropped_eps.empty())
            add_verdict("floor_margin", false, 0.0, floor_factor,
                        "errors sit at the discretization floor even after dropping eps values");

        for (const auto& key : keys) {
            const auto errs = detail::column(result_.table, key);
            const auto fit = fit_rate(detail::zip_samples(result_.eps_list, errs));
            result_.fits[key] = fit;
            add_verdict("slope_" + key, fit.slope >= slope_min, fit.slope, slope_min,
                        result_.dropped_eps.empty() ? "" : "after dropping eps below the discretization floor");
            add_verdict("residual_" + key, fit.max_residual <= resid_max, fit.max_residual, resid_max);
        }
    }

    void run_bl_thickness() {
        const double dexp = spec_.threshold("delta_exponent", 0.4);
        fill_pair_table(dexp);
        const double ratio_band = spec_.threshold("ratio_band", 20.0);

        const auto interior_w = detail::column(result_.table, "grad_int_w");
        add_verdict("interior_grad_w_decreasing", detail::strictly_decreasing(interior_w), interior_w.back(),
                    interior_w.front());

        // bound ratio against delta^{-1/2} eps^{1/4}
        double rmin = 1e300, rmax = 0.0;
        for (size_t i = 0; i < result_.eps_list.size(); ++i) {
            const double eps = result_.eps_list[i];
            const double bound = std::pow(std::pow(eps, dexp), -0.5) * std::pow(eps, 0.25);
            const double ratio = interior_w[i] / bound;
            rmin = std::min(rmin, ratio);
            rmax = std::max(rmax, ratio);
        }
        add_verdict("interior_ratio_band", rmax / rmin <= ratio_band, rmax / rmin, ratio_band,
                    "max/min of grad_int_w / (delta^{-1/2} eps^{1/4})");

        const auto occ = bl_occurrence(limit_record_);
        add_verdict("bl_occurrence", occ.occurs, occ.occurs ? 1.0 : 0.0, 1.0,
                    occ.occurs ? "witness t=" + fmt17(occ.witness_time) : "no positive wall value");

        // layer persistence: the final-time full-interval c-gradient mismatch
        // stays above the wall-formula lower bound and does not fade with eps
        const double c_wall_T = limit_boundary_c(final_limit_state_, Endpoint::Inner);
        const double lower = 0.5 * spec_.base.params.kappa * std::abs(spec_.base.params.lambda - c_wall_T);
        const auto full_c_final = detail::column(result_.table, "grad_full_c_final");
        double worst = 1e300;
        for (double v : full_c_final) worst = std::min(worst, v);
        add_verdict("full_grad_c_lower_bound", worst >= lower, worst, lower,
                    "0.5 kappa |lambda - c0_wall(T)| from the closed-form wall value");
        add_verdict("full_grad_c_no_decay", worst >= 0.5 * full_c_final.front(), worst,
                    0.5 * full_c_final.front(), "min over eps vs half the largest-eps value");
    }

    void run_no_layer() {
        fill_pair_table(spec_.threshold("delta_exponent", 0.4));
        const double factor = spec_.threshold("decrease_factor", 3.0);
        const double zero_tol = spec_.threshold("zero_tol", 1e-12);

        const auto occ = bl_occurrence(limit_record_);
        add_verdict("bl_occurrence_false", !occ.occurs, occ.occurs ? 1.0 : 0.0, 0.0);

        for (const char* key : {"grad_full_w", "grad_full_c"}) {
            const auto errs = detail::column(result_.table, key);
            double vmax = 0.0;
            for (double v : errs) vmax = std::max(vmax, v);
            if (vmax <= zero_tol) {
                add_verdict(std::string("vanishing_") + key, true, vmax, zero_tol,
                            "identically zero field; decrease check waived");
                continue;
            }
            const bool dec = detail::strictly_decreasing(errs);
            const bool shrunk = errs.back() <= errs.front() / factor;
            add_verdict(std::string("vanishing_") + key, dec && shrunk,
                        errs.front() / std::max(errs.back(), 1e-300), factor,
                        "strict decrease + total decrease factor");
        }
    }

    void run_monitor() {
        const double ratio_max = spec_.threshold("ratio_max", 10.0);
        const double zero_tol = spec_.threshold("zero_tol", 1e-12);
        const RadialGrid grid = spec_.base.make_grid();

        struct SubCase {
            double kappa;
            std::string preset;
        };
        const SubCase cases[] = {{spec_.base.params.kappa > 0.0 ? spec_.base.params.kappa : 1.0, spec_.base.preset},
                                 {0.0, "neumann_pair"}};
        for (const auto& sub : cases) {
            std::map<std::string, std::vector<double>> series;
            for (double eps : spec_.eps_list) {
                RunConfig rc = cfg_for(eps);
                rc.params.kappa = sub.kappa;
                rc.preset = sub.preset;
                rc.stride = 1;  // monitors need every-step time derivatives
                const InitialData init = rc.make_init(grid);
                const TrajectoryRecord rec = run_eps(init, rc.params, rc.scheme, grid, rc.stride);
                const MonitorTable table = uniform_monitor(rec, rc.params, grid);
                const std::string label = "kappa=" + fmt17(sub.kappa) + "/eps=" + fmt17(eps);
                result_.monitors[label] = table;
                for (const auto& e : table) series[e.name].push_back(e.value);
            }
            // boundedness check: nothing may grow past ratio_max times its
            // value at the largest eps; quantities that decay with eps are
            // bounded a fortiori
            for (const auto& [qname, vals] : series) {
                double vmax = 0.0;
                for (double v : vals) vmax = std::max(vmax, v);
                const std::string vname = "uniform_kappa" + fmt17(sub.kappa) + "_" + qname;
                if (vmax <= zero_tol) {
                    add_verdict(vname, true, 0.0, ratio_max, "monitor identically zero");
                } else {
                    const double growth = vmax / std::max(vals.front(), 1e-300);
                    add_verdict(vname, growth <= ratio_max, growth, ratio_max,
                                "max across eps_list vs largest-eps baseline");
                }
            }
        }
    }

    // ------------------------------------------------------------------
    void persist() const {
        namespace fs = std::filesystem;
        const fs::path dir = resolve_output_dir(spec_.base.output_dir) / spec_.name;
        fs::create_directories(dir);

        if (!result_.table.empty()) {
            std::ofstream out(dir / "errors.csv");
            out << "eps";
            for (const auto& [k, v] : result_.table.front().errors) out << ',' << k;
            out << '\n';
            for (const auto& row : result_.table) {
                out << fmt17(row.eps);
                for (const auto& [k, v] : row.errors) out << ',' << fmt17(v);
                out << '\n';
            }
        }

        nlohmann::json j;
        j["experiment"] = result_.name;
        j["eps_list"] = result_.eps_list;
        j["dropped_eps"] = result_.dropped_eps;
        for (const auto& row : result_.table) {
            nlohmann::json jr = row.errors;
            jr["eps"] = row.eps;
            j["errors"].push_back(jr);
        }
        for (const auto& [key, fit] : result_.fits) {
            j["fits"][key] = {{"slope", fit.slope},
                              {"intercept", fit.intercept},
                              {"max_residual", fit.max_residual}};
        }
        for (const auto& [label, table] : result_.monitors) {
            nlohmann::json jm;
            for (const auto& e : table) jm[e.name] = e.value;
            j["monitors"][label] = jm;
        }
        for (const auto& v : result_.verdicts)
            j["verdicts"].push_back({{"name", v.name},
                                     {"pass", v.pass},
                                     {"value", v.value},
                                     {"threshold", v.threshold},
                                     {"note", v.note}});
        j["pass"] = result_.pass();
        std::ofstream js(dir / "summary.json");
        js << j.dump(2) << '\n';
    }

    TrajectoryRecord limit_record_;
    LimitState final_limit_state_;
};

inline ExperimentResult run_experiment(const ExperimentSpec& spec) { return ExperimentRunner(spec).run(); }

/// Assembles an ExperimentSpec from a parsed config (run sections plus
/// [experiment] and [verdict]).
inline ExperimentSpec experiment_spec_from(const ConfigMap& m) {
    ExperimentSpec spec;
    spec.base = run_config_from(m);
    spec.name = cfg_str(m, "experiment.name", "");
    spec.eps_list = cfg_list(m, "experiment.eps_list");
    for (const auto& [k, v] : m)
        if (k.rfind("verdict.", 0) == 0) spec.thresholds[k.substr(8)] = std::stod(v);
    return spec;
}

/// Locates the versioned defaults file for a named experiment:
/// explicit path > $CHEMOBL_CONFIG_ROOT/<name>.cfg > ./configs/experiments/<name>.cfg.
inline std::string find_experiment_config(const std::string& name, const std::string& explicit_path = "") {
    namespace fs = std::filesystem;
    if (!explicit_path.empty()) {
        if (fs::exists(explicit_path)) return explicit_path;
        throw std::invalid_argument("experiment config not found: " + explicit_path);
    }
    std::vector<fs::path> candidates;
    if (const char* root = std::getenv("CHEMOBL_CONFIG_ROOT"))
        candidates.push_back(fs::path(root) / (name + ".cfg"));
    candidates.push_back(fs::path("configs") / "experiments" / (name + ".cfg"));
    for (const auto& p : candidates)
        if (fs::exists(p)) return p.string();
    std::string tried;
    for (const auto& p : candidates) tried += " " + p.string();
    throw std::invalid_argument("no config found for experiment '" + name + "' (tried:" + tried + ")");
}

}  // namespace chemobl
