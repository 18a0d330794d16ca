// Run configuration, trajectory CSV, report, and SVG plot writers.
//
// CSV values are printed with 17 significant digits so a write/read round
// trip reproduces the binary64 values exactly.
#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nbody/action.hpp"
#include "nbody/core.hpp"
#include "nbody/optimizer.hpp"
#include "nbody/symmetry.hpp"

namespace nbody {

struct RunConfig {
    ProblemSpec problem;
    SymmetrySpec symmetry;
    OptimizerConfig optimizer;
    int runs = 1;
    std::string output_dir = ".";
    bool emit_svg = false;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline const nlohmann::json& require_key(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("config: missing key '" + key + "'");
    return j.at(key);
}

}  // namespace detail

/// Parse a run configuration. Unknown keys are an error.
inline RunConfig parse_config(const nlohmann::json& j) {
    static const std::set<std::string> known = {
        "n_bodies", "dim",       "masses",   "alpha",      "period",     "k",
        "delta",    "blocks",    "max_iters", "grad_tol",  "step_init",  "armijo_c",
        "backtrack", "step_floor", "seed",    "init_radius", "runs",     "output_dir",
        "emit_svg"};
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw ConfigError("config: unknown key '" + it.key() + "'");

    RunConfig cfg;
    try {
        cfg.problem.n_bodies = detail::require_key(j, "n_bodies").get<int>();
        cfg.problem.dim = detail::require_key(j, "dim").get<int>();
        cfg.problem.masses = detail::require_key(j, "masses").get<std::vector<double>>();
        if (j.contains("alpha")) cfg.problem.alpha = j.at("alpha").get<double>();
        cfg.problem.period = detail::require_key(j, "period").get<double>();
        cfg.problem.k = detail::require_key(j, "k").get<int>();
        if (j.contains("delta")) cfg.problem.delta = j.at("delta").get<double>();

        for (const auto& b : detail::require_key(j, "blocks")) {
            if (!b.is_object() || !b.contains("width") || !b.contains("divisor"))
                throw ConfigError("config: each block needs 'width' and 'divisor'");
            for (auto it = b.begin(); it != b.end(); ++it)
                if (it.key() != "width" && it.key() != "divisor")
                    throw ConfigError("config: unknown block key '" + it.key() + "'");
            cfg.symmetry.blocks.push_back(
                SymmetryBlock{b.at("width").get<int>(), b.at("divisor").get<int>()});
        }

        if (j.contains("max_iters")) cfg.optimizer.max_iters = j.at("max_iters").get<int>();
        if (j.contains("grad_tol")) cfg.optimizer.grad_tol = j.at("grad_tol").get<double>();
        if (j.contains("step_init")) cfg.optimizer.step_init = j.at("step_init").get<double>();
        if (j.contains("armijo_c")) cfg.optimizer.armijo_c = j.at("armijo_c").get<double>();
        if (j.contains("backtrack")) cfg.optimizer.backtrack = j.at("backtrack").get<double>();
        if (j.contains("step_floor")) cfg.optimizer.step_floor = j.at("step_floor").get<double>();
        if (j.contains("seed")) cfg.optimizer.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("init_radius")) cfg.optimizer.init_radius = j.at("init_radius").get<double>();

        if (j.contains("runs")) cfg.runs = j.at("runs").get<int>();
        if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("emit_svg")) cfg.emit_svg = j.at("emit_svg").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (cfg.runs < 1) throw ConfigError("config: runs must be at least 1");
    try {
        cfg.problem.validate();
        cfg.optimizer.validate();
        cfg.symmetry.validate(cfg.problem);
    } catch (const SpecError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: parse error in ") + path + ": " + e.what());
    }
    return parse_config(j);
}

// 17 significant digits: round-trip exact for binary64.
inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    const ProblemSpec& p = traj.spec;
    const double h = p.step();
    out << "s,t,body";
    for (int c = 0; c < p.dim; ++c) out << ",c" << c;
    out << "\n";
    for (int s = 0; s < p.k; ++s)
        for (int i = 0; i < p.n_bodies; ++i) {
            out << s << ',' << format_g17(s * h) << ',' << i;
            for (int c = 0; c < p.dim; ++c) out << ',' << format_g17(traj.at(s, i, c));
            out << "\n";
        }
}

inline void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_trajectory_csv(traj, out);
}

/// Read a trajectory CSV; shape (k, N, d) must match the problem spec.
inline Trajectory read_trajectory_csv(std::istream& in, const ProblemSpec& problem) {
    problem.validate();
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file");
    std::string want_header = "s,t,body";
    for (int c = 0; c < problem.dim; ++c) want_header += ",c" + std::to_string(c);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != want_header)
        throw std::runtime_error("csv: header mismatch, expected '" + want_header + "'");

    std::vector<double> values(static_cast<std::size_t>(problem.k) * problem.n_bodies * problem.dim);
    std::vector<bool> seen(static_cast<std::size_t>(problem.k) * problem.n_bodies, false);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (static_cast<int>(fields.size()) != 3 + problem.dim)
            throw std::runtime_error("csv: wrong column count");
        const int s = std::atoi(fields[0].c_str());
        const int body = std::atoi(fields[2].c_str());
        if (s < 0 || s >= problem.k || body < 0 || body >= problem.n_bodies)
            throw std::runtime_error("csv: row index out of range");
        for (int c = 0; c < problem.dim; ++c)
            values[(static_cast<std::size_t>(s) * problem.n_bodies + body) * problem.dim + c] =
                std::strtod(fields[3 + c].c_str(), nullptr);
        seen[static_cast<std::size_t>(s) * problem.n_bodies + body] = true;
    }
    for (bool b : seen)
        if (!b) throw std::runtime_error("csv: missing rows for the configured shape");
    return Trajectory(problem, std::move(values));
}

inline Trajectory read_trajectory_csv(const std::string& path, const ProblemSpec& problem) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return read_trajectory_csv(in, problem);
}

/// Machine-parseable key=value report.
inline void write_report(const OrbitReport& rep, std::ostream& out) {
    out << "j=" << format_g17(rep.j) << "\n";
    out << "grad_norm=" << format_g17(rep.grad_norm) << "\n";
    out << "iters=" << rep.iters << "\n";
    out << "converged=" << (rep.converged ? "true" : "false") << "\n";
    out << "stop_reason=" << rep.stop_reason << "\n";
    out << "residual_norm=" << format_g17(rep.residual_norm) << "\n";
    out << "min_sep_r=" << format_g17(rep.min_sep.r) << "\n";
    out << "min_sep_s=" << rep.min_sep.s << "\n";
    out << "min_sep_i=" << rep.min_sep.i << "\n";
    out << "min_sep_l=" << rep.min_sep.l << "\n";
    out << "energy_mean=" << format_g17(rep.energy_mean) << "\n";
    out << "energy_max_dev=" << format_g17(rep.energy_max_dev) << "\n";
    out << "n_bodies=" << rep.problem.n_bodies << "\n";
    out << "dim=" << rep.problem.dim << "\n";
    std::string ms;
    for (std::size_t i = 0; i < rep.problem.masses.size(); ++i)
        ms += (i ? "," : "") + format_g17(rep.problem.masses[i]);
    out << "masses=" << ms << "\n";
    out << "alpha=" << format_g17(rep.problem.alpha) << "\n";
    out << "period=" << format_g17(rep.problem.period) << "\n";
    out << "k=" << rep.problem.k << "\n";
    out << "delta=" << format_g17(rep.problem.delta) << "\n";
    std::string bs;
    for (std::size_t i = 0; i < rep.symmetry.blocks.size(); ++i)
        bs += (i ? ";" : "") + std::to_string(rep.symmetry.blocks[i].width) + ":" +
              std::to_string(rep.symmetry.blocks[i].divisor);
    out << "blocks=" << bs << "\n";
    out << "max_iters=" << rep.config.max_iters << "\n";
    out << "grad_tol=" << format_g17(rep.config.grad_tol) << "\n";
    out << "step_init=" << format_g17(rep.config.step_init) << "\n";
    out << "armijo_c=" << format_g17(rep.config.armijo_c) << "\n";
    out << "backtrack=" << format_g17(rep.config.backtrack) << "\n";
    out << "step_floor=" << format_g17(rep.config.step_floor) << "\n";
    out << "seed=" << rep.config.seed << "\n";
    out << "init_radius=" << format_g17(rep.config.init_radius) << "\n";
}

namespace detail {

struct Bounds {
    double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
    void expand(double x, double y) {
        lo_x = std::min(lo_x, x);
        hi_x = std::max(hi_x, x);
        lo_y = std::min(lo_y, y);
        hi_y = std::max(hi_y, y);
    }
};

inline const char* body_color(int i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return colors[i % 8];
}

// One closed polyline per body, projected onto coordinates (cx, cy).
inline void svg_panel(std::ostream& out, const Trajectory& traj, int cx, int cy, double ox,
                      double oy, double size, const std::string& label) {
    const ProblemSpec& p = traj.spec;
    Bounds b;
    b.lo_x = b.lo_y = 1e300;
    b.hi_x = b.hi_y = -1e300;
    for (int s = 0; s < p.k; ++s)
        for (int i = 0; i < p.n_bodies; ++i) b.expand(traj.at(s, i, cx), traj.at(s, i, cy));
    const double span = std::max({b.hi_x - b.lo_x, b.hi_y - b.lo_y, 1e-12});
    const double margin = 0.08 * span;
    const double scale = size / (span + 2.0 * margin);  // equal aspect
    const double mx = 0.5 * (b.lo_x + b.hi_x), my = 0.5 * (b.lo_y + b.hi_y);

    out << "<text x=\"" << ox + 4 << "\" y=\"" << oy + 14 << "\" font-size=\"12\">" << label
        << "</text>\n";
    for (int i = 0; i < p.n_bodies; ++i) {
        out << "<polygon fill=\"none\" stroke=\"" << body_color(i)
            << "\" stroke-width=\"1.2\" points=\"";
        for (int s = 0; s < p.k; ++s) {
            const double x = ox + size / 2.0 + (traj.at(s, i, cx) - mx) * scale;
            const double y = oy + size / 2.0 - (traj.at(s, i, cy) - my) * scale;
            out << x << ',' << y << ' ';
        }
        out << "\"/>\n";
    }
}

}  // namespace detail

/// Static SVG: one panel for d=2; four panels (x-y, y-z, z-x, oblique) for d=3.
inline void write_svg(const Trajectory& traj, const std::string& path, const std::string& caption) {
    const ProblemSpec& p = traj.spec;
    if (p.dim != 2 && p.dim != 3)
        throw std::runtime_error("plot: only d=2 and d=3 are supported");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);

    const double panel = 300.0;
    const double w = (p.dim == 2) ? panel : 2 * panel;
    const double hgt = ((p.dim == 2) ? panel : 2 * panel) + 24.0;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << hgt
        << "\" viewBox=\"0 0 " << w << ' ' << hgt << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (p.dim == 2) {
        detail::svg_panel(out, traj, 0, 1, 0, 0, panel, "x-y");
    } else {
        detail::svg_panel(out, traj, 0, 1, 0, 0, panel, "x-y");
        detail::svg_panel(out, traj, 1, 2, panel, 0, panel, "y-z");
        detail::svg_panel(out, traj, 2, 0, 0, panel, panel, "z-x");
        // Oblique view: project (x, y, z) onto the plane of an isometric-like axis.
        Trajectory proj = traj;
        for (int s = 0; s < p.k; ++s)
            for (int i = 0; i < p.n_bodies; ++i) {
                const double x = traj.at(s, i, 0), y = traj.at(s, i, 1), z = traj.at(s, i, 2);
                proj.at(s, i, 0) = x - 0.5 * y;
                proj.at(s, i, 1) = z - 0.25 * y;
            }
        detail::svg_panel(out, proj, 0, 1, panel, panel, panel, "space");
    }
    out << "<text x=\"8\" y=\"" << hgt - 8 << "\" font-size=\"14\">" << caption << "</text>\n";
    out << "</svg>\n";
}

/// Caption in the style "m=[1,1,1], J=0.493".
inline std::string orbit_caption(const std::vector<double>& masses, double j) {
    std::ostringstream ss;
    ss << "m=[";
    for (std::size_t i = 0; i < masses.size(); ++i) {
        if (i) ss << ',';
        const double m = masses[i];
        if (m == static_cast<long long>(m))
            ss << static_cast<long long>(m);
        else
            ss << m;
    }
    char jbuf[32];
    std::snprintf(jbuf, sizeof(jbuf), "%.3f", j);
    ss << "], J=" << jbuf;
    return ss.str();
}

}  // namespace nbody
