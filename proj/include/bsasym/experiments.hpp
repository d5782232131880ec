#pragma once

// Experiment drivers behind the command-line tool. Each driver returns its numbers
// in a struct; the write_* functions turn them into CSV files.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bsasym/analysis.hpp"
#include "bsasym/config.hpp"
#include "bsasym/grid.hpp"
#include "bsasym/oracles.hpp"
#include "bsasym/radial.hpp"
#include "bsasym/solvers.hpp"
#include "bsasym/sources.hpp"

namespace bsasym {

// ---------------------------------------------------------------------------
// Monitored run from u = 0
// ---------------------------------------------------------------------------

struct MonitoredRun {
    Field final_state;
    double T;
    SpeedSeries series;
    std::vector<InvariantCheck> checks;
    double wall_seconds;

    bool invariants_passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const InvariantCheck& c) { return c.passed; });
    }
    double final_speed() const { return T > 0.0 ? speed_estimate(final_state, T) : 0.0; }
};

/// Runs `solver` from zero to T, sampling every `interval` (and at T) with the invariant monitor attached.
/// `extra` receives every snapshot after the monitor.
inline MonitoredRun monitored_run(const GridSpec& grid, const SourceTerm& src, const SolverConfig& solver, double T,
                                  double interval, const Observer& extra = {},
                                  const std::vector<double>& extra_times = {}) {
    const Field f = sample_to_field(src, grid);
    std::vector<double> times = uniform_samples(T, interval, true);
    if (times.empty() || times.back() < T) times.push_back(T);
    times.insert(times.end(), extra_times.begin(), extra_times.end());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, b); }),
                times.end());
    InvariantMonitor monitor(MonitorTolerances::for_source(src, grid), solver.stencil.limiter);
    auto res = run(Field(grid), f, solver, T, times, [&](const Snapshot& s) {
        monitor.observe(s);
        if (extra) extra(s);
    });
    return {std::move(res.final_state), T, monitor.series(), monitor.report(), res.wall_seconds};
}

inline MonitoredRun monitored_run(const ExperimentConfig& cfg, const SourceTerm& src) {
    return monitored_run(cfg.grid(), src, cfg.solver(), cfg.T, cfg.sample_interval);
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

class OutputDir {
public:
    OutputDir(std::filesystem::path dir, std::string echo) : dir_(std::move(dir)), echo_(std::move(echo)) {
        std::filesystem::create_directories(dir_);
    }

    /// Opens `name` and writes the config echo comment line.
    std::ofstream csv(const std::string& name) {
        std::ofstream os = open(name);
        os << "# " << echo_ << '\n';
        return os;
    }

    /// Opens `name` without a comment line (heightmaps keep their fixed header).
    std::ofstream open(const std::string& name) {
        const auto path = dir_ / name;
        std::ofstream os(path);
        if (!os) throw ConfigError("cannot write '" + path.string() + "'");
        written_.push_back(path.string());
        return os;
    }

    const std::vector<std::string>& written() const noexcept { return written_; }
    const std::string& echo() const noexcept { return echo_; }

private:
    std::filesystem::path dir_;
    std::string echo_;
    std::vector<std::string> written_;
};

/// Compact label for file names: 1.6 -> "1.6", 0 -> "0".
inline std::string param_label(double v) { return format_short(v); }

inline void write_checks(std::ostream& os, const std::string& run, const std::vector<InvariantCheck>& checks) {
    for (const auto& c : checks) {
        os << run << ',' << c.name << ',' << (c.enabled ? (c.passed ? "pass" : "FAIL") : "disabled") << ','
           << format_g17(c.worst_margin) << ',' << c.detail << '\n';
    }
}

// ---------------------------------------------------------------------------
// Speed sweeps (Examples 1-3)
// ---------------------------------------------------------------------------

struct SweepPoint {
    double param;
    MonitoredRun run;
    double c_delta;
    double e_delta;  ///< L2 error against the exact speed (NaN when none is known)
    SpeedClaim claim;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::optional<LineFit> fit;

    bool invariants_passed() const {
        return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.run.invariants_passed(); });
    }
};

inline SpeedClaim claim_for(const ExperimentConfig& cfg, double param) {
    if (cfg.source_kind == "radial_cone") return SpeedClaim::exact(speed_radial_cone(param));
    if (cfg.source_kind == "l1_cone") return speed_claim_l1(param);
    if (cfg.source_kind == "twin_cones") return speed_claim_twin(cfg.source_R0, param);
    return SpeedClaim::unknown();
}

inline SweepResult speed_sweep(const ExperimentConfig& cfg) {
    if (!cfg.sweep) throw ConfigError("this experiment needs sweep.param/start/stop/step");
    SweepResult out;
    const bool by_offset = cfg.sweep->param == "offset";
    for (double p : cfg.sweep->values()) {
        const SourceTerm src = by_offset ? cfg.source({}, p) : cfg.source(p, {});
        const SpeedClaim claim = claim_for(cfg, p);
        MonitoredRun r = monitored_run(cfg, src);
        const double c = r.final_speed();
        const double e = claim.kind == SpeedClaim::Kind::exact && cfg.T > 0.0 ? l2_error(r.final_state, cfg.T, claim.value)
                                                                               : std::numeric_limits<double>::quiet_NaN();
        out.points.push_back({p, std::move(r), c, e, claim});
    }
    if (cfg.experiment == Experiment::ex2) {
        std::vector<XY> pts;
        for (const auto& p : out.points)
            if (p.param >= cfg.fit_r_min - 1e-12 && p.param <= cfg.fit_r_max + 1e-12) pts.push_back({p.param, p.c_delta});
        if (pts.size() >= 2) out.fit = fit_line(pts);
    }
    return out;
}

/// Claim tolerance used in the sweep curve files.
inline constexpr double kClaimTolerance = 0.05;

inline void write_sweep(OutputDir& out, const ExperimentConfig& cfg, const SweepResult& res) {
    const std::string name(to_string(cfg.experiment));
    const std::string& pname = cfg.sweep->param;
    for (const auto& p : res.points) {
        auto os = out.csv(name + "_" + pname + param_label(p.param) + "_series.csv");
        write_csv(os, p.run.series);
    }
    {
        auto os = out.csv(name + "_curve.csv");
        os << pname << ",c_delta,e_delta,claim,claim_satisfied\n";
        for (const auto& p : res.points)
            os << format_g17(p.param) << ',' << format_g17(p.c_delta) << ',' << format_g17(p.e_delta) << ','
               << to_string(p.claim) << ',' << (p.claim.satisfied_by(p.c_delta, kClaimTolerance) ? 1 : 0) << '\n';
    }
    {
        auto os = out.csv(name + "_invariants.csv");
        os << "run,check,status,worst_margin,detail\n";
        for (const auto& p : res.points) write_checks(os, pname + "=" + param_label(p.param), p.run.checks);
    }
    if (res.fit) {
        auto os = out.csv(name + "_fit.csv");
        write_csv(os, *res.fit);
    }
}

// ---------------------------------------------------------------------------
// Volcano (single and twin craters)
// ---------------------------------------------------------------------------

struct VolcanoSnapshot {
    double t;
    Field u;
    double sup_diff;  ///< max over |x| <= 1/lambda of |u - target|
    double l2_diff;   ///< L2 seminorm of (u - target) over the same disc
};

struct VolcanoResult {
    std::vector<VolcanoSnapshot> snapshots;
    MonitoredRun run;
};

inline Field volcano_target(const ExperimentConfig& cfg, double t) {
    const GridSpec g = cfg.grid();
    if (cfg.experiment == Experiment::twin)
        return Field::sample(g, [&](Point x) { return twin_target(x, t, cfg.source_R0, Point{cfg.source_offset, 0.0}); });
    return Field::sample(g, [&](Point x) { return fuji_field(x, t, cfg.source_R0); });
}

inline VolcanoResult volcano_experiment(const ExperimentConfig& cfg) {
    if (cfg.scheme != Scheme::imcf_truncated) throw ConfigError("volcano experiments use solver.scheme = imcf_truncated");
    const GridSpec g = cfg.grid();
    const SourceTerm src = cfg.source();
    const double radius = 1.0 / cfg.lambda;
    std::vector<VolcanoSnapshot> snaps;
    std::vector<double> times;
    for (double t : cfg.snapshot_times)
        if (t <= cfg.T * (1.0 + 1e-12)) times.push_back(t);
    auto observer = [&](const Snapshot& s) {
        for (double t : times) {
            if (std::abs(t - s.t) > 1e-12 * std::max(1.0, t)) continue;
            const Field target = volcano_target(cfg, t);
            double worst = 0.0, sq = 0.0;
            const int N = g.index_radius();
            for (int j = -N; j <= N; ++j)
                for (int i = -N; i <= N; ++i) {
                    if (norm(node_coord(g, i, j)) > radius) continue;
                    const double d = s.u.at(i, j) - target.at(i, j);
                    worst = std::max(worst, std::abs(d));
                    sq += d * d;
                }
            snaps.push_back({t, s.u, worst, std::sqrt(sq) * g.dx()});
        }
    };
    MonitoredRun r = monitored_run(g, src, cfg.solver(), cfg.T, cfg.sample_interval, observer, times);
    return {std::move(snaps), std::move(r)};
}

inline void write_volcano(OutputDir& out, const ExperimentConfig& cfg, const VolcanoResult& res) {
    const std::string name(to_string(cfg.experiment));
    for (const auto& s : res.snapshots) {
        auto os = out.open(name + "_u_t" + param_label(s.t) + ".txt");
        write_heightmap(os, s.u, s.t);
    }
    {
        auto os = out.csv(name + "_errors.csv");
        os << "t,sup_diff,l2_diff\n";
        for (const auto& s : res.snapshots)
            os << format_g17(s.t) << ',' << format_g17(s.sup_diff) << ',' << format_g17(s.l2_diff) << '\n';
    }
    {
        auto os = out.csv(name + "_series.csv");
        write_csv(os, res.run.series);
    }
    {
        auto os = out.csv(name + "_invariants.csv");
        os << "run,check,status,worst_margin,detail\n";
        write_checks(os, name, res.run.checks);
    }
}

// ---------------------------------------------------------------------------
// Trotter-Kato convergence
// ---------------------------------------------------------------------------

struct TkPoint {
    double tau;
    long i_steps;
    double sup_error;
};

inline std::vector<TkPoint> tk_experiment(const ExperimentConfig& cfg) {
    if (cfg.scheme != Scheme::fmcf) throw ConfigError("tk uses solver.scheme = fmcf");
    const GridSpec g = cfg.grid();
    const SolverConfig solver = cfg.solver();
    const Field f = sample_to_field(cfg.source(), g);
    const Field zero(g);
    const double t = cfg.tk_t;
    const std::vector<double> at_t{t};
    const Field direct = run(zero, f, solver, t, at_t).final_state;
    std::vector<TkPoint> out;
    double tau = cfg.tk_tau0;
    for (int level = 0; level < cfg.tk_levels; ++level, tau *= 0.5) {
        const long i = std::lround(t / tau);
        if (std::abs(static_cast<double>(i) * tau - t) > 1e-9 * t)
            throw ConfigError("tk.t must be a multiple of every tau in the halving sequence");
        const Field u = trotter_kato(zero, f, tau, i, solver);
        out.push_back({tau, i, sup_abs(u - direct)});
    }
    return out;
}

inline void write_tk(OutputDir& out, const std::vector<TkPoint>& pts) {
    auto os = out.csv("tk_convergence.csv");
    os << "tau,i,sup_error\n";
    for (const auto& p : pts) os << format_g17(p.tau) << ',' << p.i_steps << ',' << format_g17(p.sup_error) << '\n';
}

// ---------------------------------------------------------------------------
// Radial three-way comparison
// ---------------------------------------------------------------------------

struct RadialCompareRow {
    double r;
    double u2d;       ///< mean over the four axis rays
    double phi_pde;   ///< radial finite-difference solver
    double phi_vf;    ///< value function
};

struct RadialCompareResult {
    std::vector<RadialCompareRow> rows;
    double sup_2d_pde = 0.0;
    double sup_2d_vf = 0.0;
    double sup_pde_vf = 0.0;
    double m_over_T_2d = 0.0;
    double m_over_T_pde = 0.0;
    double m_over_T_vf = 0.0;
    MonitoredRun run;
};

inline RadialCompareResult radial_experiment(const ExperimentConfig& cfg) {
    const SourceTerm src = cfg.source();
    if (!is_radial(src)) throw ConfigError("radial comparison needs a radial source");
    if (cfg.scheme != Scheme::fmcf) throw ConfigError("radial comparison uses solver.scheme = fmcf");
    if (cfg.radial_n != 2) throw ConfigError("the planar solver is two-dimensional: radial.n must be 2");
    const GridSpec g = cfg.grid();
    const auto f_tilde = [&](double r) { return radial_eval(src, r); };
    MonitoredRun r2 = monitored_run(cfg, src);
    const RadialProfile pde = run_radial(f_tilde, cfg.radial_n, cfg.radial_r_max, cfg.radial_dr,
                                         cfg.radial_dt_factor * radial_max_dt(cfg.radial_dr, cfg.radial_n), cfg.T);
    const RadialProfile vf = value_function_radial(f_tilde, cfg.radial_n, cfg.radial_r_max, cfg.vf_dr, cfg.vf_dt, cfg.T,
                                                   ValueFunctionOptions{cfg.vf_controls});
    RadialCompareResult out{{}, 0, 0, 0, 0, 0, 0, std::move(r2)};
    const Field& u = out.run.final_state;
    const int kmax = std::min(g.index_radius(), static_cast<int>(std::floor(cfg.radial_compare_r_max / g.dx() + 1e-9)));
    for (int k = 0; k <= kmax; ++k) {
        const double r = k * g.dx();
        const double a = 0.25 * (u.at(k, 0) + u.at(-k, 0) + u.at(0, k) + u.at(0, -k));
        RadialCompareRow row{r, a, pde.at(r), vf.at(r)};
        out.sup_2d_pde = std::max(out.sup_2d_pde, std::abs(row.u2d - row.phi_pde));
        out.sup_2d_vf = std::max(out.sup_2d_vf, std::abs(row.u2d - row.phi_vf));
        out.sup_pde_vf = std::max(out.sup_pde_vf, std::abs(row.phi_pde - row.phi_vf));
        out.rows.push_back(row);
    }
    if (cfg.T > 0.0) {
        out.m_over_T_2d = sup(u) / cfg.T;
        out.m_over_T_pde = *std::max_element(pde.values.begin(), pde.values.end()) / cfg.T;
        out.m_over_T_vf = *std::max_element(vf.values.begin(), vf.values.end()) / cfg.T;
    }
    return out;
}

inline void write_radial(OutputDir& out, const RadialCompareResult& res) {
    {
        auto os = out.csv("radial_profiles.csv");
        os << "r,u2d,phi_pde,phi_vf\n";
        for (const auto& r : res.rows)
            os << format_g17(r.r) << ',' << format_g17(r.u2d) << ',' << format_g17(r.phi_pde) << ','
               << format_g17(r.phi_vf) << '\n';
    }
    {
        auto os = out.csv("radial_summary.csv");
        os << "quantity,value\n";
        os << "sup_2d_pde," << format_g17(res.sup_2d_pde) << '\n';
        os << "sup_2d_vf," << format_g17(res.sup_2d_vf) << '\n';
        os << "sup_pde_vf," << format_g17(res.sup_pde_vf) << '\n';
        os << "m_over_T_2d," << format_g17(res.m_over_T_2d) << '\n';
        os << "m_over_T_pde," << format_g17(res.m_over_T_pde) << '\n';
        os << "m_over_T_vf," << format_g17(res.m_over_T_vf) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Invariant suite
// ---------------------------------------------------------------------------

struct Scenario {
    std::string name;
    SourceTerm source;
    Scheme scheme;
};

/// The canonical scenarios checked by `invariants`.
inline std::vector<Scenario> canonical_scenarios() {
    return {
        {"fmcf_radial_cone_1.6", RadialCone{1.6}, Scheme::fmcf},
        {"fmcf_radial_cone_0.8", RadialCone{0.8}, Scheme::fmcf},
        {"fmcf_l1_cone_2.0", L1Cone{2.0}, Scheme::fmcf},
        {"fmcf_twin_cones_1.2_0.3", TwinCones{1.2, 0.3}, Scheme::fmcf},
        {"eikonal_radial_cone_1.2", RadialCone{1.2}, Scheme::eikonal},
    };
}

struct ComparisonCheck {
    std::string lower;
    std::string upper;
    double margin;  ///< min over nodes of u_upper - u_lower
    bool passed;
};

struct InvariantSuiteResult {
    std::vector<std::pair<std::string, MonitoredRun>> runs;
    std::vector<ComparisonCheck> comparisons;

    bool passed() const {
        for (const auto& [name, r] : runs)
            if (!r.invariants_passed()) return false;
        for (const auto& c : comparisons)
            if (!c.passed) return false;
        return true;
    }
};

inline InvariantSuiteResult invariants_experiment(const ExperimentConfig& cfg) {
    InvariantSuiteResult out;
    const GridSpec g = cfg.grid();
    for (const auto& sc : canonical_scenarios()) {
        SolverConfig solver = cfg.solver();
        solver.scheme = sc.scheme;
        out.runs.emplace_back(sc.name, monitored_run(g, sc.source, solver, cfg.T, cfg.sample_interval));
    }
    // Nested cones: (1.2 - |x|)_+ <= (1.6 - |x|)_+.
    SolverConfig solver = cfg.solver();
    solver.scheme = Scheme::fmcf;
    const Field lower = monitored_run(g, RadialCone{1.2}, solver, cfg.T, cfg.sample_interval).final_state;
    const Field& upper = out.runs.front().second.final_state;
    const double m = comparison_margin(lower, upper);
    out.comparisons.push_back({"fmcf_radial_cone_1.2", "fmcf_radial_cone_1.6", m, m >= -10.0 * g.dx()});
    return out;
}

inline void write_invariants(OutputDir& out, const InvariantSuiteResult& res) {
    auto os = out.csv("invariants.csv");
    os << "run,check,status,worst_margin,detail\n";
    for (const auto& [name, r] : res.runs) write_checks(os, name, r.checks);
    for (const auto& c : res.comparisons)
        os << c.lower << "<=" << c.upper << ",source_monotonicity," << (c.passed ? "pass" : "FAIL") << ','
           << format_g17(c.margin) << ",\n";
}

}  // namespace bsasym
