#pragma once

// Experiment configuration: flat `key = value` files with `#` comments and dotted keys.
// Every key has a per-experiment default; unknown keys are rejected at parse time.

#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bsasym/errors.hpp"
#include "bsasym/grid.hpp"
#include "bsasym/solvers.hpp"
#include "bsasym/sources.hpp"

namespace bsasym {

enum class Experiment { ex1, ex2, ex3, volcano, twin, tk, radial, invariants };

inline std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::ex1: return "ex1";
        case Experiment::ex2: return "ex2";
        case Experiment::ex3: return "ex3";
        case Experiment::volcano: return "volcano";
        case Experiment::twin: return "twin";
        case Experiment::tk: return "tk";
        case Experiment::radial: return "radial";
        case Experiment::invariants: return "invariants";
    }
    return "?";
}

inline Experiment parse_experiment(std::string_view s) {
    for (auto e : {Experiment::ex1, Experiment::ex2, Experiment::ex3, Experiment::volcano, Experiment::twin,
                   Experiment::tk, Experiment::radial, Experiment::invariants})
        if (to_string(e) == s) return e;
    throw ConfigError("unknown experiment '" + std::string(s) + "'");
}

/// Raw `key = value` pairs in file order; later duplicates override earlier ones.
inline std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& origin = "config") {
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return std::string(s);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        out[key] = value;
    }
    return out;
}

struct SweepSpec {
    std::string param;  ///< "r" or "offset"
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    /// start, start+step, ..., up to stop inclusive (values rounded to 12 decimals).
    std::vector<double> values() const {
        if (!(step > 0.0)) throw ConfigError("sweep.step must be > 0");
        if (stop < start) throw ConfigError("sweep.stop must be >= sweep.start");
        std::vector<double> out;
        const long n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long k = 0; k <= n; ++k) out.push_back(std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12);
        return out;
    }
};

struct ExperimentConfig {
    Experiment experiment = Experiment::ex1;

    double R = 2.56;
    int N = 128;

    Scheme scheme = Scheme::fmcf;
    double dt_factor = 0.2;  ///< dt = dt_factor * dx^2
    StencilParams stencil{};
    double lambda = 0.5;
    double Lambda = 5.05;
    double delta = 1.0;

    std::string source_kind = "radial_cone";
    double source_r = 1.6;
    double source_R0 = 1.2;
    double source_offset = 0.0;
    std::string table_path;

    double T = 40.0;
    double sample_interval = 0.5;

    std::optional<SweepSpec> sweep;
    double fit_r_min = 1.6;
    double fit_r_max = 2.0;

    std::vector<double> snapshot_times;  ///< volcano/twin heightmap times

    double tk_t = 1.0;
    double tk_tau0 = 0.1;
    int tk_levels = 3;

    int radial_n = 2;
    double radial_dr = 0.01;
    double radial_r_max = 8.0;
    double radial_dt_factor = 0.9;  ///< fraction of the stable radial step
    double vf_dr = 0.005;
    double vf_dt = 0.005;
    int vf_controls = 33;
    double radial_compare_r_max = 2.5;

    GridSpec grid() const { return GridSpec(R, N); }
    double dt() const { return dt_factor * grid().dx() * grid().dx(); }

    SolverConfig solver() const {
        SolverConfig c;
        c.scheme = scheme;
        c.dt = dt();
        c.stencil = stencil;
        c.lambda = lambda;
        c.Lambda = Lambda;
        c.delta = delta;
        return c;
    }

    /// The configured source with `param` (r or offset) replaced by `value` when given.
    SourceTerm source(std::optional<double> r_override = {}, std::optional<double> offset_override = {}) const {
        const double r = r_override.value_or(source_r);
        const double off = offset_override.value_or(source_offset);
        SourceTerm s;
        if (source_kind == "radial_cone") s = RadialCone{r};
        else if (source_kind == "l1_cone") s = L1Cone{r};
        else if (source_kind == "twin_cones") s = TwinCones{source_R0, off};
        else if (source_kind == "ball_indicator") s = BallIndicator{source_R0};
        else if (source_kind == "twin_ball_indicator") s = TwinBallIndicator{source_R0, off};
        else if (source_kind == "radial_table") s = load_radial_table(table_path);
        else throw ConfigError("unknown source.kind '" + source_kind + "'");
        bsasym::validate(s);
        return s;
    }

    /// Re-checks every constraint; called after parsing and overrides.
    void validate() const {
        (void)grid();
        solver().validate();
        if (!(dt_factor > 0.0)) throw ConfigError("solver.dt_factor must be > 0");
        if (!(T >= 0.0)) throw ConfigError("run.T must be >= 0");
        if (!(sample_interval > 0.0)) throw ConfigError("run.sample_interval must be > 0");
        if (sweep) {
            if (sweep->param != "r" && sweep->param != "offset")
                throw ConfigError("sweep.param must be 'r' or 'offset'");
            (void)sweep->values();
        }
        if (source_kind != "radial_table") (void)source();
        else if (table_path.empty()) throw ConfigError("source.table_path is required for radial_table");
        for (double t : snapshot_times)
            if (!(t >= 0.0)) throw ConfigError("volcano.times must be >= 0");
        if ((experiment == Experiment::volcano || experiment == Experiment::twin) && Lambda < 1.0 / source_R0)
            throw ConfigError("solver.Lambda must be >= 1/source.R0 for the volcano targets");
        if (!(tk_tau0 > 0.0) || tk_levels < 1 || !(tk_t > 0.0)) throw ConfigError("tk settings out of range");
        if (radial_n < 2) throw ConfigError("radial.n must be >= 2");
        if (!(radial_dr > 0.0) || !(radial_r_max > radial_dr)) throw ConfigError("radial grid out of range");
        if (!(radial_dt_factor > 0.0 && radial_dt_factor <= 1.0)) throw ConfigError("radial.dt_factor must be in (0,1]");
        if (!(vf_dr > 0.0) || !(vf_dt > 0.0) || vf_dt > vf_dr) throw ConfigError("value function needs 0 < dt <= dr");
        if (vf_controls < 2) throw ConfigError("value_function.controls must be >= 2");
    }

    /// Single-line `key=value` dump of every resolved setting, for CSV audit headers.
    std::string echo() const {
        std::ostringstream os;
        os << "experiment=" << to_string(experiment) << " grid.R=" << format_short(R) << " grid.N=" << N
           << " solver.scheme=" << to_string(scheme) << " solver.dt_factor=" << format_short(dt_factor)
           << " solver.eps=" << format_short(stencil.eps) << " solver.rho=" << format_short(stencil.rho)
           << " solver.limiter=" << to_string(stencil.limiter) << " solver.lambda=" << format_short(lambda)
           << " solver.Lambda=" << format_short(Lambda) << " solver.delta=" << format_short(delta)
           << " source.kind=" << source_kind << " source.r=" << format_short(source_r)
           << " source.R0=" << format_short(source_R0) << " source.offset=" << format_short(source_offset);
        if (!table_path.empty()) os << " source.table_path=" << table_path;
        os << " run.T=" << format_short(T) << " run.sample_interval=" << format_short(sample_interval);
        if (sweep)
            os << " sweep.param=" << sweep->param << " sweep.start=" << format_short(sweep->start)
               << " sweep.stop=" << format_short(sweep->stop) << " sweep.step=" << format_short(sweep->step);
        switch (experiment) {
            case Experiment::ex2:
                os << " fit.r_min=" << format_short(fit_r_min) << " fit.r_max=" << format_short(fit_r_max);
                break;
            case Experiment::volcano:
            case Experiment::twin: {
                os << " volcano.times=";
                for (std::size_t k = 0; k < snapshot_times.size(); ++k)
                    os << (k ? "," : "") << format_short(snapshot_times[k]);
                break;
            }
            case Experiment::tk:
                os << " tk.t=" << format_short(tk_t) << " tk.tau0=" << format_short(tk_tau0)
                   << " tk.levels=" << tk_levels;
                break;
            case Experiment::radial:
                os << " radial.n=" << radial_n << " radial.dr=" << format_short(radial_dr)
                   << " radial.r_max=" << format_short(radial_r_max)
                   << " radial.dt_factor=" << format_short(radial_dt_factor)
                   << " radial.compare_r_max=" << format_short(radial_compare_r_max)
                   << " value_function.dr=" << format_short(vf_dr) << " value_function.dt=" << format_short(vf_dt)
                   << " value_function.controls=" << vf_controls;
                break;
            default: break;
        }
        return os.str();
    }
};

/// Paper parameter sets for each experiment.
inline ExperimentConfig default_config(Experiment e) {
    ExperimentConfig c;
    c.experiment = e;
    switch (e) {
        case Experiment::ex1:
            c.source_kind = "radial_cone";
            c.sweep = SweepSpec{"r", 0.8, 1.6, 0.2};
            break;
        case Experiment::ex2:
            c.source_kind = "l1_cone";
            c.source_r = 2.0;
            c.sweep = SweepSpec{"r", 0.8, 2.0, 0.1};
            break;
        case Experiment::ex3:
            c.source_kind = "twin_cones";
            c.source_R0 = 1.2;
            c.sweep = SweepSpec{"offset", 0.0, 2.0, 0.1};
            break;
        case Experiment::volcano:
        case Experiment::twin:
            c.scheme = Scheme::imcf_truncated;
            c.dt_factor = 0.025;
            c.source_kind = e == Experiment::volcano ? "ball_indicator" : "twin_ball_indicator";
            c.source_R0 = 0.2;
            c.source_offset = e == Experiment::volcano ? 0.0 : 0.8;
            c.lambda = 0.5;
            c.Lambda = 5.05;
            c.snapshot_times = {1.25, 2.5};
            c.T = 2.5;
            c.sample_interval = 0.25;
            break;
        case Experiment::tk:
            c.source_kind = "radial_cone";
            c.source_r = 1.2;
            c.T = 1.0;
            break;
        case Experiment::radial:
            c.source_kind = "radial_cone";
            c.source_r = 1.6;
            c.T = 5.0;
            break;
        case Experiment::invariants:
            c.source_kind = "radial_cone";
            c.source_r = 1.6;
            c.T = 10.0;
            break;
    }
    return c;
}

namespace detail {

inline double as_double(const std::string& key, const std::string& v) {
    try {
        return parse_double(v);
    } catch (const ConfigError&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

inline int as_int(const std::string& key, const std::string& v) {
    const double d = as_double(key, v);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return static_cast<int>(d);
}

inline std::vector<double> as_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::string_view rest(v);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        out.push_back(as_double(key, std::string(rest.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

}  // namespace detail

/// Applies parsed pairs on top of the experiment defaults. `experiment`, when present in the
/// file, must agree with the requested experiment.
inline ExperimentConfig apply_overrides(ExperimentConfig c, const std::map<std::string, std::string>& kv) {
    using detail::as_double;
    using detail::as_int;
    SweepSpec sw = c.sweep.value_or(SweepSpec{});
    bool sweep_touched = false;
    bool dt_factor_set = false;
    for (const auto& [k, v] : kv) {
        if (k == "experiment") {
            if (parse_experiment(v) != c.experiment)
                throw ConfigError("config is for experiment '" + v + "', not '" + std::string(to_string(c.experiment)) + "'");
        } else if (k == "grid.R") c.R = as_double(k, v);
        else if (k == "grid.N") c.N = as_int(k, v);
        else if (k == "solver.scheme") c.scheme = parse_scheme(v);
        else if (k == "solver.dt_factor") { c.dt_factor = as_double(k, v); dt_factor_set = true; }
        else if (k == "solver.eps") c.stencil.eps = as_double(k, v);
        else if (k == "solver.rho") c.stencil.rho = as_double(k, v);
        else if (k == "solver.limiter") c.stencil.limiter = parse_limiter(v);
        else if (k == "solver.lambda") c.lambda = as_double(k, v);
        else if (k == "solver.Lambda") c.Lambda = as_double(k, v);
        else if (k == "solver.delta") c.delta = as_double(k, v);
        else if (k == "source.kind") c.source_kind = v;
        else if (k == "source.r") c.source_r = as_double(k, v);
        else if (k == "source.R0") c.source_R0 = as_double(k, v);
        else if (k == "source.offset") c.source_offset = as_double(k, v);
        else if (k == "source.table_path") c.table_path = v;
        else if (k == "run.T") c.T = as_double(k, v);
        else if (k == "run.sample_interval") c.sample_interval = as_double(k, v);
        else if (k == "sweep.param") { sw.param = v; sweep_touched = true; }
        else if (k == "sweep.start") { sw.start = as_double(k, v); sweep_touched = true; }
        else if (k == "sweep.stop") { sw.stop = as_double(k, v); sweep_touched = true; }
        else if (k == "sweep.step") { sw.step = as_double(k, v); sweep_touched = true; }
        else if (k == "fit.r_min") c.fit_r_min = as_double(k, v);
        else if (k == "fit.r_max") c.fit_r_max = as_double(k, v);
        else if (k == "volcano.times") c.snapshot_times = detail::as_list(k, v);
        else if (k == "tk.t") c.tk_t = as_double(k, v);
        else if (k == "tk.tau0") c.tk_tau0 = as_double(k, v);
        else if (k == "tk.levels") c.tk_levels = as_int(k, v);
        else if (k == "radial.n") c.radial_n = as_int(k, v);
        else if (k == "radial.dr") c.radial_dr = as_double(k, v);
        else if (k == "radial.r_max") c.radial_r_max = as_double(k, v);
        else if (k == "radial.dt_factor") c.radial_dt_factor = as_double(k, v);
        else if (k == "radial.compare_r_max") c.radial_compare_r_max = as_double(k, v);
        else if (k == "value_function.dr") c.vf_dr = as_double(k, v);
        else if (k == "value_function.dt") c.vf_dt = as_double(k, v);
        else if (k == "value_function.controls") c.vf_controls = as_int(k, v);
        else throw ConfigError("unknown config key '" + k + "'");
    }
    if (sweep_touched) c.sweep = sw;
    // Switching to the truncated flow without an explicit ratio picks its stable default.
    if (!dt_factor_set && c.scheme == Scheme::imcf_truncated) c.dt_factor = 0.025;
    return c;
}

/// Reduced-size settings: N = 64, and T = 10 for the long-time speed experiments. Applied before
/// file overrides, so a config file can still pin either value.
inline void apply_desk(ExperimentConfig& c) {
    c.N = 64;
    switch (c.experiment) {
        case Experiment::ex1:
        case Experiment::ex2:
        case Experiment::ex3:
        case Experiment::invariants: c.T = 10.0; break;
        default: break;
    }
}

inline ExperimentConfig load_config(Experiment e, const std::optional<std::string>& path, bool desk) {
    std::map<std::string, std::string> kv;
    if (path) {
        std::ifstream in(*path);
        if (!in) throw ConfigError("cannot open config '" + *path + "'");
        kv = parse_key_values(in, *path);
    }
    ExperimentConfig c = default_config(e);
    if (desk) apply_desk(c);
    c = apply_overrides(std::move(c), kv);
    c.validate();
    return c;
}

}  // namespace bsasym
