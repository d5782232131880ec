// Command-line front end: bsasym <experiment> [--config <path>] [--desk] [--out <dir>]

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "bsasym/experiments.hpp"

namespace {

enum ExitCode : int { kOk = 0, kInvariantFailure = 1, kBlowUp = 2, kConfigError = 3 };

void print_checks(const std::string& run, const std::vector<bsasym::InvariantCheck>& checks) {
    for (const auto& c : checks) {
        const char* status = !c.enabled ? "disabled" : c.passed ? "pass" : "FAIL";
        std::printf("  %-28s %-18s %-8s margin=%s %s\n", run.c_str(), c.name.c_str(), status,
                    bsasym::format_short(c.worst_margin).c_str(), c.detail.c_str());
    }
}

int run_experiment(const bsasym::ExperimentConfig& cfg, const std::string& out_dir) {
    using namespace bsasym;
    OutputDir out(out_dir, cfg.echo());
    bool ok = true;
    switch (cfg.experiment) {
        case Experiment::ex1:
        case Experiment::ex2:
        case Experiment::ex3: {
            const SweepResult res = speed_sweep(cfg);
            write_sweep(out, cfg, res);
            for (const auto& p : res.points) {
                std::printf("%s=%s c_delta=%.6f claim=%s\n", cfg.sweep->param.c_str(), param_label(p.param).c_str(),
                            p.c_delta, to_string(p.claim).c_str());
                if (!p.run.invariants_passed()) print_checks(cfg.sweep->param + "=" + param_label(p.param), p.run.checks);
            }
            if (res.fit) std::printf("fit: slope=%.9f intercept=%.9f\n", res.fit->slope, res.fit->intercept);
            ok = res.invariants_passed();
            break;
        }
        case Experiment::volcano:
        case Experiment::twin: {
            const VolcanoResult res = volcano_experiment(cfg);
            write_volcano(out, cfg, res);
            for (const auto& s : res.snapshots)
                std::printf("t=%s sup_diff=%.6f l2_diff=%.6f\n", format_short(s.t).c_str(), s.sup_diff, s.l2_diff);
            print_checks(std::string(to_string(cfg.experiment)), res.run.checks);
            ok = res.run.invariants_passed();
            break;
        }
        case Experiment::tk: {
            const auto pts = tk_experiment(cfg);
            write_tk(out, pts);
            for (const auto& p : pts) std::printf("tau=%s i=%ld sup_error=%.6g\n", format_short(p.tau).c_str(), p.i_steps, p.sup_error);
            break;
        }
        case Experiment::radial: {
            const RadialCompareResult res = radial_experiment(cfg);
            write_radial(out, res);
            std::printf("sup|2d-pde|=%.6f sup|2d-vf|=%.6f sup|pde-vf|=%.6f\n", res.sup_2d_pde, res.sup_2d_vf, res.sup_pde_vf);
            std::printf("m/T: 2d=%.6f pde=%.6f vf=%.6f\n", res.m_over_T_2d, res.m_over_T_pde, res.m_over_T_vf);
            break;
        }
        case Experiment::invariants: {
            const InvariantSuiteResult res = invariants_experiment(cfg);
            write_invariants(out, res);
            for (const auto& [name, r] : res.runs) print_checks(name, r.checks);
            for (const auto& c : res.comparisons)
                std::printf("  %s <= %s source_monotonicity %s margin=%s\n", c.lower.c_str(), c.upper.c_str(),
                            c.passed ? "pass" : "FAIL", format_short(c.margin).c_str());
            ok = res.passed();
            break;
        }
    }
    for (const auto& f : out.written()) std::printf("wrote %s\n", f.c_str());
    return ok ? kOk : kInvariantFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asymptotic speed experiments for birth-and-spread level-set flows"};
    std::string experiment;
    std::optional<std::string> config_path;
    bool desk = false;
    std::string out_dir = "out";
    app.add_option("experiment", experiment, "ex1|ex2|ex3|volcano|twin|tk|radial|invariants")->required();
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_flag("--desk", desk, "reduced scale: N=64, and T=10 for the speed sweeps");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        const auto cfg = bsasym::load_config(bsasym::parse_experiment(experiment), config_path, desk);
        std::printf("# %s\n", cfg.echo().c_str());
        return run_experiment(cfg, out_dir);
    } catch (const bsasym::BlowUpError& e) {
        std::fprintf(stderr, "%s (reduce solver.dt_factor)\n", e.what());
        return kBlowUp;
    } catch (const bsasym::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInvariantFailure;
    }
}
