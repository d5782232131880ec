#pragma once

// Independent reference values: closed-form asymptotic speeds, explicit volcano
// profiles, a semi-Lagrangian value function for the radial control problem and
// the shrinking/expanding circle ODE.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "bsasym/errors.hpp"
#include "bsasym/grid.hpp"
#include "bsasym/radial.hpp"
#include "bsasym/solvers.hpp"
#include "bsasym/sources.hpp"

namespace bsasym {

// ---------------------------------------------------------------------------
// Speed claims
// ---------------------------------------------------------------------------

struct SpeedClaim {
    enum class Kind { exact, lower_bound, positive, zero, unknown };
    Kind kind = Kind::unknown;
    double value = 0.0;  ///< meaningful for exact and lower_bound

    static SpeedClaim exact(double v) { return {Kind::exact, v}; }
    static SpeedClaim lower_bound(double v) { return {Kind::lower_bound, v}; }
    static SpeedClaim positive() { return {Kind::positive, 0.0}; }
    static SpeedClaim zero() { return {Kind::zero, 0.0}; }
    static SpeedClaim unknown() { return {Kind::unknown, 0.0}; }

    /// Whether a measured speed is consistent with the claim up to `tol`.
    /// `positive` requires c > tol; `unknown` accepts anything.
    bool satisfied_by(double c, double tol) const noexcept {
        switch (kind) {
            case Kind::exact: return std::abs(c - value) <= tol;
            case Kind::lower_bound: return c >= value - tol;
            case Kind::positive: return c > tol;
            case Kind::zero: return std::abs(c) <= tol;
            case Kind::unknown: return true;
        }
        return false;
    }

    friend bool operator==(const SpeedClaim&, const SpeedClaim&) = default;
};

inline std::string to_string(const SpeedClaim& c) {
    switch (c.kind) {
        case SpeedClaim::Kind::exact: return "exact(" + format_short(c.value) + ")";
        case SpeedClaim::Kind::lower_bound: return "lower_bound(" + format_short(c.value) + ")";
        case SpeedClaim::Kind::positive: return "positive";
        case SpeedClaim::Kind::zero: return "zero";
        case SpeedClaim::Kind::unknown: return "unknown";
    }
    return "?";
}

/// Asymptotic speed for f = (r - |x|)_+ in the plane: (r - 1)_+.
inline double speed_radial_cone(double r) {
    if (!(r >= 0.0)) throw ContractViolation("speed_radial_cone: r must be >= 0");
    return std::max(r - 1.0, 0.0);
}

/// max of f~ over [n-1, support], sampled with spacing dr/10 (endpoints included).
inline double speed_radial(const std::function<double(double)>& f_tilde, double support, int n, double dr) {
    if (n < 2) throw ContractViolation("speed_radial: n must be >= 2");
    if (!(dr > 0.0)) throw ContractViolation("speed_radial: dr must be > 0");
    const double lo = static_cast<double>(n - 1);
    if (support < lo) return std::max(0.0, f_tilde(lo));
    const double h = dr / 10.0;
    const auto count = static_cast<long>(std::ceil((support - lo) / h));
    double best = 0.0;
    for (long k = 0; k <= count; ++k) best = std::max(best, f_tilde(std::min(lo + static_cast<double>(k) * h, support)));
    return best;
}

/// Table overload: spacing is the smallest gap between tabulated radii.
inline double speed_radial(const RadialTable& table, int n) {
    validate(SourceTerm{table});
    double dr = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < table.radii.size(); ++k) dr = std::min(dr, table.radii[k] - table.radii[k - 1]);
    if (!std::isfinite(dr)) dr = 1.0;
    return speed_radial([&](double r) { return table.at(r); }, table.radii.back(), n, dr);
}

/// When the normal velocity is bounded below by a positive constant the speed is sup f.
inline double speed_positive_velocity(const SourceTerm& src) { return max_value(src); }

/// Claims for f = (r - |x1| - |x2|)_+.
inline SpeedClaim speed_claim_l1(double r) {
    constexpr double s2 = std::numbers::sqrt2;
    if (r < 1.0) return SpeedClaim::zero();
    if (r > 1.0 && r < s2) return SpeedClaim::positive();
    if (r > s2) return SpeedClaim::lower_bound(r - s2);
    return SpeedClaim::unknown();
}

/// Claims for two cones of height R0 centred at +-(r, 0).
inline SpeedClaim speed_claim_twin(double R0, double r) {
    if (R0 > 0.5 && R0 < 1.0) {
        if ((r >= 0.0 && r < 1.0 - R0) || r > R0) return SpeedClaim::zero();
        return SpeedClaim::unknown();
    }
    if (R0 > 1.0) {
        if (r == 0.0) return SpeedClaim::exact(2.0 * (R0 - 1.0));
        if (r > R0) return SpeedClaim::exact(R0 - 1.0);
    }
    return SpeedClaim::unknown();
}

// ---------------------------------------------------------------------------
// Explicit volcano solutions
// ---------------------------------------------------------------------------

/// Time after which the outer cut-off branch is active: the foot r = R0 e^t reaches 1/lambda.
inline double volcano_switch_time(double R0, double lambda) { return std::log(1.0 / (lambda * R0)); }

/// Maximal solution for the ball-indicator source under the truncated inverse mean curvature flow.
/// Past the switch time the foot travels with speed lambda, continuing the log profile at 1/lambda.
inline double volcano_profile(double r, double t, double R0, double lambda, double Lambda) {
    if (!(R0 > 0.0) || !(lambda > 0.0) || !(lambda < Lambda) || Lambda < 1.0 / R0 * (1.0 - 1e-12))
        throw ConfigError("volcano_profile: requires 0 < lambda < Lambda and Lambda >= 1/R0");
    if (r <= R0) return t;
    const double T = volcano_switch_time(R0, lambda);
    if (t < T || r <= 1.0 / lambda) return std::max(t + std::log(R0 / r), 0.0);
    return std::max(t - T - lambda * (r - 1.0 / lambda), 0.0);
}

/// min{t, max{0, t - log|x| + log R0}}
inline double fuji_field(Point x, double t, double R0) {
    return std::min(t, std::max(0.0, t - std::log(norm(x)) + std::log(R0)));
}

/// min{t, max{0, psi_+a, psi_-a}} with psi_c = t - log|x - c| + log R0.
inline double twin_target(Point x, double t, double R0, Point a) {
    const double p1 = t - std::log(std::hypot(x.x1 - a.x1, x.x2 - a.x2)) + std::log(R0);
    const double p2 = t - std::log(std::hypot(x.x1 + a.x1, x.x2 + a.x2)) + std::log(R0);
    return std::min(t, std::max({0.0, p1, p2}));
}

// ---------------------------------------------------------------------------
// Value function of the radial control problem
// ---------------------------------------------------------------------------

namespace detail {

/// Position at time -dt of the path through r at time 0 with gamma' = w - a/gamma (RK4, substeps
/// limited to a 2% change of gamma).
inline double radial_foot(double r, double w, double a, double dt) {
    auto rhs = [&](double g) { return -(w - a / g); };  // backward in time
    double g = r, left = dt;
    while (left > 0.0) {
        const double speed = std::abs(w) + a / g;
        const double h = std::min(left, 0.02 * g / std::max(speed, 1e-300));
        const double k1 = rhs(g);
        const double k2 = rhs(g + 0.5 * h * k1);
        const double k3 = rhs(g + 0.5 * h * k2);
        const double k4 = rhs(g + h * k3);
        g += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        left -= h;
    }
    return g;
}

}  // namespace detail

struct ValueFunctionOptions {
    int controls = 33;
};

/// Semi-Lagrangian dynamic programming for
///     phi(r, t) = sup int f~(gamma) ds  over  |gamma' + (n-1)/gamma| <= 1, gamma > 0, gamma(t) = r.
/// Feet are clipped to [dr, r_max]; the r = 0 node copies r = dr.
inline RadialProfile value_function_radial(const std::function<double(double)>& f_tilde, int n, double r_max,
                                           double dr, double dt, double T, ValueFunctionOptions opts = {}) {
    if (!(dt > 0.0) || dt > dr * (1.0 + 1e-12)) throw ConfigError("value_function_radial: need 0 < dt <= dr");
    if (opts.controls < 2) throw ConfigError("value_function_radial: need at least two controls");
    RadialProfile phi = RadialProfile::zeros(dr, r_max, n);
    const std::size_t M = phi.size() - 1;
    const auto f = sample_radial(f_tilde, phi);
    const double nm1 = static_cast<double>(n - 1);
    const double rmax = phi.r_max();
    const auto C = static_cast<std::size_t>(opts.controls);

    // Paths obey gamma' = w - (n-1)/gamma with |w| <= 1. The foot of each characteristic is
    // found by integrating backward over one step; the drift is too strong near the origin
    // to freeze at the arrival radius.
    std::vector<double> feet((M + 1) * C, 0.0);
    for (std::size_t m = 1; m <= M; ++m) {
        for (std::size_t c = 0; c < C; ++c) {
            const double w = -1.0 + 2.0 * static_cast<double>(c) / static_cast<double>(C - 1);
            feet[m * C + c] = std::clamp(detail::radial_foot(phi.radius(m), w, nm1, dt), dr, rmax);
        }
    }

    const long K = steps_until(T, dt);
    std::vector<double> next(phi.size());
    for (long k = 0; k < K; ++k) {
        for (std::size_t m = 1; m <= M; ++m) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < C; ++c) best = std::max(best, phi.at(feet[m * C + c]));
            next[m] = dt * f[m] + best;
        }
        next[0] = next[1];
        phi.values.swap(next);
    }
    return phi;
}

// ---------------------------------------------------------------------------
// Circle under V = kappa + 1: rho' = 1 - 1/rho
// ---------------------------------------------------------------------------

class CollapseError : public AnalysisError {
public:
    explicit CollapseError(double time)
        : AnalysisError("circle collapses at t = " + format_short(time)), time_(time) {}
    double collapse_time() const noexcept { return time_; }

private:
    double time_;
};

namespace detail {

inline double circle_rhs(double rho) noexcept { return 1.0 - 1.0 / rho; }

/// Integrates to `t_end` (may be +inf); throws CollapseError when the radius vanishes first.
/// Near collapse the step shrinks like rho^2 so the stiff tail is resolved.
inline double integrate_circle(double rho0, double t_end, double h) {
    if (!(rho0 > 0.0)) throw ContractViolation("circle_radius: rho0 must be > 0");
    if (!(h > 0.0)) throw ContractViolation("circle_radius: step must be > 0");
    constexpr double kCollapseRadius = 1e-5;
    double t = 0.0;
    double rho = rho0;
    while (t < t_end) {
        if (rho < kCollapseRadius) throw CollapseError(t + 0.5 * rho * rho);
        const double step = std::min({h, 0.01 * rho * rho, t_end - t});
        const double k1 = circle_rhs(rho);
        const double k2 = circle_rhs(rho + 0.5 * step * k1);
        const double k3 = circle_rhs(rho + 0.5 * step * k2);
        const double k4 = circle_rhs(rho + step * k3);
        const double next = rho + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!(next > 0.0)) throw CollapseError(t + 0.5 * rho * rho);
        rho = next;
        t += step;
    }
    return rho;
}

}  // namespace detail

inline double circle_radius(double rho0, double t, double h = 1e-4) {
    if (!(t >= 0.0)) throw ContractViolation("circle_radius: t must be >= 0");
    return detail::integrate_circle(rho0, t, h);
}

/// Extinction time for rho0 < 1; +inf otherwise.
inline double circle_collapse_time(double rho0, double h = 1e-4) {
    if (rho0 >= 1.0) return std::numeric_limits<double>::infinity();
    try {
        detail::integrate_circle(rho0, std::numeric_limits<double>::infinity(), h);
    } catch (const CollapseError& e) {
        return e.collapse_time();
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace bsasym
