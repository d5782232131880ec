#pragma once

// Explicit time steppers for the three level-set equations, the fixed-dt runner
// with sampling observers, and the Trotter-Kato nucleation/propagation splitting.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bsasym/errors.hpp"
#include "bsasym/grid.hpp"
#include "bsasym/stencils.hpp"

namespace bsasym {

enum class Scheme {
    fmcf,            ///< u_t = |D^u| k~ + |D~u| + f
    imcf_truncated,  ///< u_t = |D-u| / chi(-k~) + f
    eikonal,         ///< u_t = delta |D~u| + f
};

inline std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::fmcf: return "fmcf";
        case Scheme::imcf_truncated: return "imcf_truncated";
        case Scheme::eikonal: return "eikonal";
    }
    return "?";
}

inline Scheme parse_scheme(std::string_view s) {
    if (s == "fmcf") return Scheme::fmcf;
    if (s == "imcf_truncated" || s == "imcf") return Scheme::imcf_truncated;
    if (s == "eikonal") return Scheme::eikonal;
    throw ConfigError("unknown scheme '" + std::string(s) + "' (expected fmcf|imcf_truncated|eikonal)");
}

struct SolverConfig {
    Scheme scheme = Scheme::fmcf;
    double dt = 8e-5;
    StencilParams stencil{};
    double lambda = 0.5;   ///< lower curvature cutoff (imcf_truncated)
    double Lambda = 5.05;  ///< upper curvature cutoff (imcf_truncated)
    double delta = 1.0;    ///< normal speed (eikonal)

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("solver dt must be > 0");
        stencil.validate();
        if (scheme == Scheme::imcf_truncated && !(lambda > 0.0 && lambda < Lambda))
            throw ConfigError("solver.lambda/Lambda must satisfy 0 < lambda < Lambda");
        if (scheme == Scheme::eikonal && !(delta > 0.0)) throw ConfigError("solver.delta must be > 0");
    }
};

/// min{max{r, lambda}, Lambda}
inline double chi(double r, double lambda, double Lambda) {
    if (!(lambda < Lambda)) throw ConfigError("chi: requires lambda < Lambda");
    return std::min(std::max(r, lambda), Lambda);
}

/// Number of whole steps of size dt that fit in [0, t]; tolerant to representation error in t/dt.
inline long steps_until(double t, double dt) noexcept {
    return static_cast<long>(std::floor(t / dt + 1e-9));
}

struct StepStats {
    double max_increment = 0.0;  ///< max_k |out_k - u_k|
    bool finite = true;
};

/// Reusable workspace for one grid/config; advance() is a pure function of its inputs.
class Stepper {
public:
    Stepper(const GridSpec& spec, SolverConfig cfg)
        : spec_(spec), cfg_(cfg), padded_(spec), curvature_(spec), kappa_(spec.size()) {
        cfg_.validate();
    }

    const SolverConfig& config() const noexcept { return cfg_; }

    /// out = u + dt * (rate(u) + f).
    StepStats advance(const Field& u, const Field& f, Field& out, double dt) {
        u.require_same(f);
        u.require_same(out);
        padded_.assign(u);
        const auto& st = cfg_.stencil;
        const double dx = spec_.dx();
        const int N = spec_.index_radius();
        if (cfg_.scheme != Scheme::eikonal) curvature_(padded_, st.eps, kappa_);

        StepStats stats;
        double max_inc = 0.0;
        bool finite = true;
        std::size_t k = 0;
        const PaddedField& p = padded_;
        const std::ptrdiff_t stride = p.stride();
        switch (cfg_.scheme) {
            case Scheme::fmcf:
                for (int j = -N; j <= N; ++j)
                    for (int i = -N; i <= N; ++i, ++k) {
                        const NodeView at{p.row(j) + i, stride};
                        const double rate = grad_hat_at(at, 0, 0, dx, st.rho) * kappa_[k] +
                                            grad_tilde_at(at, 0, 0, dx, st.limiter) + f[k];
                        const double v = u[k] + dt * rate;
                        out[k] = v;
                        max_inc = std::max(max_inc, std::abs(v - u[k]));
                        finite &= std::isfinite(v);
                    }
                break;
            case Scheme::imcf_truncated: {
                const double lo = cfg_.lambda;
                const double hi = cfg_.Lambda;
                for (int j = -N; j <= N; ++j)
                    for (int i = -N; i <= N; ++i, ++k) {
                        const double c = std::min(std::max(-kappa_[k], lo), hi);
                        const double rate = grad_bar_at(NodeView{p.row(j) + i, stride}, 0, 0, dx) / c + f[k];
                        const double v = u[k] + dt * rate;
                        out[k] = v;
                        max_inc = std::max(max_inc, std::abs(v - u[k]));
                        finite &= std::isfinite(v);
                    }
                break;
            }
            case Scheme::eikonal:
                for (int j = -N; j <= N; ++j)
                    for (int i = -N; i <= N; ++i, ++k) {
                        const NodeView at{p.row(j) + i, stride};
                        const double rate = cfg_.delta * grad_tilde_at(at, 0, 0, dx, st.limiter) + f[k];
                        const double v = u[k] + dt * rate;
                        out[k] = v;
                        max_inc = std::max(max_inc, std::abs(v - u[k]));
                        finite &= std::isfinite(v);
                    }
                break;
        }
        stats.max_increment = max_inc;
        stats.finite = finite;
        return stats;
    }

    StepStats advance(const Field& u, const Field& f, Field& out) { return advance(u, f, out, cfg_.dt); }

private:
    GridSpec spec_;
    SolverConfig cfg_;
    PaddedField padded_;
    CurvatureSweep curvature_;
    std::vector<double> kappa_;
};

namespace detail {

inline Field single_step(const Field& u, const Field& f, SolverConfig cfg, Scheme scheme) {
    cfg.scheme = scheme;
    Stepper stepper(u.spec(), cfg);
    Field out(u.spec());
    if (!stepper.advance(u, f, out).finite) throw BlowUpError(std::string(to_string(scheme)), 1, sup_abs(out));
    return out;
}

}  // namespace detail

inline Field step_fmcf(const Field& u, const Field& f, const SolverConfig& cfg) {
    return detail::single_step(u, f, cfg, Scheme::fmcf);
}
inline Field step_imcf_truncated(const Field& u, const Field& f, const SolverConfig& cfg) {
    return detail::single_step(u, f, cfg, Scheme::imcf_truncated);
}
inline Field step_eikonal(const Field& u, const Field& f, const SolverConfig& cfg) {
    return detail::single_step(u, f, cfg, Scheme::eikonal);
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

/// State handed to observers at each sample time.
struct Snapshot {
    double t;       ///< requested sample time
    long step;      ///< floor(t/dt); u is the state after this many steps
    const Field& u;
    /// max |u^k - u^{k-1}| / dt over the steps since the previous sample that lie past the
    /// warm-up window; NaN when no such step exists.
    double max_rate;
};

using Observer = std::function<void(const Snapshot&)>;

struct RunOptions {
    /// Fraction of the total step count excluded from max_rate.
    double rate_warmup_fraction = 0.01;
};

struct RunResult {
    Field final_state;
    long steps;
    double wall_seconds;
};

inline RunResult run(const Field& u0, const Field& f, const SolverConfig& cfg, double T,
                     std::span<const double> sample_times, const Observer& observer = {}, RunOptions opts = {}) {
    cfg.validate();
    u0.require_same(f);
    if (!(T >= 0.0)) throw ContractViolation("run: T must be >= 0");
    for (std::size_t s = 0; s < sample_times.size(); ++s) {
        if (sample_times[s] < 0.0 || sample_times[s] > T * (1.0 + 1e-12))
            throw ContractViolation("run: sample times must lie in [0, T]");
        if (s > 0 && sample_times[s] < sample_times[s - 1]) throw ContractViolation("run: sample times must be sorted");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const long K = steps_until(T, cfg.dt);
    const long warmup = static_cast<long>(std::ceil(opts.rate_warmup_fraction * static_cast<double>(K)));
    const double nan = std::numeric_limits<double>::quiet_NaN();

    Stepper stepper(u0.spec(), cfg);
    Field cur = u0;
    Field next(u0.spec());
    std::size_t s = 0;
    long k = 0;
    double window_rate = nan;
    auto emit = [&] {
        while (s < sample_times.size() && steps_until(sample_times[s], cfg.dt) <= k) {
            if (observer) observer(Snapshot{sample_times[s], k, cur, window_rate});
            window_rate = nan;
            ++s;
        }
    };
    emit();
    for (k = 1; k <= K; ++k) {
        const StepStats st = stepper.advance(cur, f, next);
        if (!st.finite) throw BlowUpError(std::string(to_string(cfg.scheme)), k, sup_abs(next));
        if (k > warmup) {
            const double rate = st.max_increment / cfg.dt;
            window_rate = std::isnan(window_rate) ? rate : std::max(window_rate, rate);
        }
        std::swap(cur, next);
        emit();
    }
    k = K;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(cur), K, wall};
}

/// Uniform sample times interval, 2*interval, ... up to T (inclusive within rounding), plus 0 if requested.
inline std::vector<double> uniform_samples(double T, double interval, bool include_zero = false) {
    if (!(interval > 0.0)) throw ConfigError("sample interval must be > 0");
    std::vector<double> out;
    if (include_zero) out.push_back(0.0);
    const long n = static_cast<long>(std::floor(T / interval + 1e-9));
    for (long m = 1; m <= n; ++m) out.push_back(std::min(T, static_cast<double>(m) * interval));
    return out;
}

// ---------------------------------------------------------------------------
// Trotter-Kato splitting
// ---------------------------------------------------------------------------

/// Propagation S2(tau): ceil(tau/dt) source-free fmcf substeps, the last one shortened so the
/// substeps sum to tau. `substep_counter` accumulates the substep index for blow-up reports.
inline Field propagate(const Field& u, double tau, Stepper& stepper, const Field& zero, long& substep_counter) {
    const double dt = stepper.config().dt;
    const long m = std::max<long>(1, static_cast<long>(std::ceil(tau / dt - 1e-9)));
    Field cur = u;
    Field next(u.spec());
    for (long q = 0; q < m; ++q) {
        const double h = q + 1 < m ? dt : tau - static_cast<double>(m - 1) * dt;
        ++substep_counter;
        if (!stepper.advance(cur, zero, next, h).finite)
            throw BlowUpError("fmcf", substep_counter, sup_abs(next));
        std::swap(cur, next);
    }
    return cur;
}

/// U^tau(., i tau) = S1(tau) (S2(tau) S1(tau))^i [u0], with S1(t)[v] = v + t f.
inline Field trotter_kato(const Field& u0, const Field& f, double tau, long i_steps, const SolverConfig& cfg) {
    cfg.validate();
    u0.require_same(f);
    if (cfg.scheme != Scheme::fmcf) throw ConfigError("trotter_kato: propagation uses the fmcf scheme");
    if (!(tau >= cfg.dt)) throw ContractViolation("trotter_kato: tau must be >= dt");
    if (i_steps < 0) throw ContractViolation("trotter_kato: i must be >= 0");
    Stepper stepper(u0.spec(), cfg);
    const Field zero(u0.spec());
    const Field nucleation = f * tau;
    long counter = 0;
    Field v = u0;
    for (long it = 0; it < i_steps; ++it) {
        v += nucleation;
        v = propagate(v, tau, stepper, zero, counter);
    }
    v += nucleation;
    return v;
}

}  // namespace bsasym
