#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "chemobl/grid.hpp"
#include "chemobl/trajectory.hpp"

namespace chemobl {

/// 17 significant digits: doubles round-trip exactly through the CSV files.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_snapshots_csv(const std::string& path, const TrajectoryRecord& record, const RadialGrid& grid) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,r,w,c\n";
    for (const auto& s : record.snapshots)
        for (int i = 0; i < grid.num_nodes; ++i)
            out << fmt17(s.t) << ',' << fmt17(grid.node(i)) << ',' << fmt17(s.w[static_cast<size_t>(i)]) << ','
                << fmt17(s.c[static_cast<size_t>(i)]) << '\n';
}

inline void write_diagnostics_csv(const std::string& path, const TrajectoryRecord& record) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,mass,c_min,c_max,entropy,l2_w,h1_w,h2_c_weighted,entropy_lyap,l2_c,h1_c,h2_w,h2_c,"
           "sup_w,sup_c,dt_used,w_min_pre_clamp,clamp_count,picard_iters\n";
    for (const auto& d : record.diagnostics)
        out << fmt17(d.t) << ',' << fmt17(d.mass) << ',' << fmt17(d.c_min) << ',' << fmt17(d.c_max) << ','
            << fmt17(d.entropy) << ',' << fmt17(d.l2_w) << ',' << fmt17(d.h1_w) << ',' << fmt17(d.h2_c_weighted)
            << ',' << fmt17(d.entropy_lyap) << ',' << fmt17(d.l2_c) << ',' << fmt17(d.h1_c) << ',' << fmt17(d.h2_w)
            << ',' << fmt17(d.h2_c) << ',' << fmt17(d.sup_w) << ',' << fmt17(d.sup_c) << ',' << fmt17(d.dt_used)
            << ',' << fmt17(d.w_min_pre_clamp) << ',' << d.clamp_count << ',' << d.picard_iters << '\n';
}

inline void write_wall_csv(const std::string& path, const TrajectoryRecord& record) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,w_a,w_b,c_a,c_b,int_w_a,int_w_b,int_wc_a,int_wc_b,c_ana_a,c_ana_b,cr_ana_a,cr_ana_b\n";
    for (const auto& s : record.wall_series)
        out << fmt17(s.t) << ',' << fmt17(s.w_a) << ',' << fmt17(s.w_b) << ',' << fmt17(s.c_a) << ','
            << fmt17(s.c_b) << ',' << fmt17(s.int_w_a) << ',' << fmt17(s.int_w_b) << ',' << fmt17(s.int_wc_a)
            << ',' << fmt17(s.int_wc_b) << ',' << fmt17(s.c_ana_a) << ',' << fmt17(s.c_ana_b) << ','
            << fmt17(s.cr_ana_a) << ',' << fmt17(s.cr_ana_b) << '\n';
}

/// Reads a snapshot CSV back into (radii, snapshots). Rows with equal t form
/// one snapshot; node order is as written.
inline std::pair<std::vector<double>, std::vector<Snapshot>> read_snapshots_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> radii;
    std::vector<Snapshot> snaps;
    bool first_block = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        double t, r, w, c;
        char comma;
        if (!(ls >> t >> comma >> r >> comma >> w >> comma >> c)) throw std::runtime_error("bad CSV row: " + line);
        if (snaps.empty() || snaps.back().t != t) {
            if (!snaps.empty()) first_block = false;
            snaps.push_back({t, {}, {}});
        }
        if (first_block) radii.push_back(r);
        snaps.back().w.push_back(w);
        snaps.back().c.push_back(c);
    }
    return {radii, snaps};
}

// ---------------------------------------------------------------------------
// flat sectioned key-value config files:  [section] key=value key=value ...

using ConfigMap = std::map<std::string, std::string>;

inline ConfigMap parse_config_text(const std::string& text) {
    ConfigMap out;
    std::string section;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            if (tok.size() >= 2 && tok.front() == '[' && tok.back() == ']') {
                section = tok.substr(1, tok.size() - 2);
                continue;
            }
            const auto eq = tok.find('=');
            if (eq == std::string::npos || eq == 0)
                throw std::invalid_argument("config: expected key=value, got '" + tok + "'");
            out[section.empty() ? tok.substr(0, eq) : section + "." + tok.substr(0, eq)] = tok.substr(eq + 1);
        }
    }
    return out;
}

inline ConfigMap parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file not readable: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

inline double cfg_num(const ConfigMap& m, const std::string& key, double fallback) {
    const auto it = m.find(key);
    return it == m.end() ? fallback : std::stod(it->second);
}

inline double cfg_num_required(const ConfigMap& m, const std::string& key) {
    const auto it = m.find(key);
    if (it == m.end()) throw std::invalid_argument("config: missing required key '" + key + "'");
    return std::stod(it->second);
}

inline std::string cfg_str(const ConfigMap& m, const std::string& key, const std::string& fallback) {
    const auto it = m.find(key);
    return it == m.end() ? fallback : it->second;
}

inline std::vector<double> cfg_list(const ConfigMap& m, const std::string& key) {
    const auto it = m.find(key);
    std::vector<double> vals;
    if (it == m.end()) return vals;
    std::string item;
    std::istringstream ls(it->second);
    while (std::getline(ls, item, ','))
        if (!item.empty()) vals.push_back(std::stod(item));
    return vals;
}

/// Relative output paths resolve under $CHEMOBL_OUTPUT_ROOT when it is set.
inline std::filesystem::path resolve_output_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    if (p.is_absolute()) return p;
    if (const char* root = std::getenv("CHEMOBL_OUTPUT_ROOT")) return std::filesystem::path(root) / p;
    return p;
}

}  // namespace chemobl
