#pragma once

// Radially reduced forced mean curvature flow:
//     phi_t = (n-1)/r phi_r + |phi_r| + f~(r),   phi_r(0, t) = 0.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "bsasym/errors.hpp"
#include "bsasym/solvers.hpp"

namespace bsasym {

struct RadialProfile {
    double dr = 0.01;
    int dimension = 2;
    std::vector<double> values;  ///< phi at r_m = m dr

    static RadialProfile zeros(double dr, double r_max, int n) {
        if (!(dr > 0.0)) throw ConfigError("radial dr must be > 0");
        if (n < 2) throw ConfigError("radial dimension must be >= 2");
        const auto M = static_cast<std::size_t>(std::llround(r_max / dr));
        if (M < 2) throw ConfigError("radial grid needs at least three nodes");
        return {dr, n, std::vector<double>(M + 1, 0.0)};
    }

    std::size_t size() const noexcept { return values.size(); }
    double radius(std::size_t m) const noexcept { return static_cast<double>(m) * dr; }
    double r_max() const noexcept { return radius(values.size() - 1); }

    /// Linear interpolation, clamped to [0, r_max].
    double at(double r) const noexcept {
        const double s = std::clamp(r / dr, 0.0, static_cast<double>(values.size() - 1));
        const auto m = std::min(static_cast<std::size_t>(s), values.size() - 2);
        const double w = s - static_cast<double>(m);
        return values[m] + w * (values[m + 1] - values[m]);
    }
};

/// Largest dt for which every nodal update is a monotone combination: the r = 0 update
/// carries 2(n-1)/dr^2 + 1/dr.
inline double radial_max_dt(double dr, int n) noexcept { return dr * dr / (2.0 * (n - 1) + dr); }

/// f~ sampled at the profile's radii.
inline std::vector<double> sample_radial(const std::function<double(double)>& f_tilde, const RadialProfile& like) {
    std::vector<double> out(like.size());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = f_tilde(like.radius(m));
    return out;
}

/// One explicit step. Interior: forward difference for (n-1)/r phi_r, upwind max{(d+)_+, (-d-)_+}
/// for |phi_r|. r = 0: symmetric limit 2(n-1)(phi_1-phi_0)/dr^2 and (phi_1-phi_0)_+/dr.
/// Last node: backward differences only.
inline RadialProfile step_radial(const RadialProfile& phi, std::span<const double> f_tilde, double dt) {
    const std::size_t M = phi.size() - 1;
    if (f_tilde.size() != phi.size()) throw ContractViolation("step_radial: source/profile size mismatch");
    if (!(dt > 0.0) || dt > radial_max_dt(phi.dr, phi.dimension) * (1.0 + 1e-12))
        throw ConfigError("step_radial: dt exceeds the stable limit dr^2/(2(n-1)+dr)");
    const double dr = phi.dr;
    const double nm1 = static_cast<double>(phi.dimension - 1);
    const auto& v = phi.values;
    RadialProfile out = phi;
    auto& w = out.values;

    const double d0 = (v[1] - v[0]) / dr;
    w[0] = v[0] + dt * (2.0 * nm1 * d0 / dr + std::max(d0, 0.0) + f_tilde[0]);
    for (std::size_t m = 1; m < M; ++m) {
        const double a = nm1 / phi.radius(m);
        const double fwd = (v[m + 1] - v[m]) / dr;
        const double bwd = (v[m] - v[m - 1]) / dr;
        w[m] = v[m] + dt * (a * fwd + std::max({fwd, -bwd, 0.0}) + f_tilde[m]);
    }
    {
        const double a = nm1 / phi.radius(M);
        const double bwd = (v[M] - v[M - 1]) / dr;
        w[M] = v[M] + dt * (a * bwd + std::abs(bwd) + f_tilde[M]);
    }
    for (std::size_t m = 0; m <= M; ++m) {
        if (!std::isfinite(w[m])) {
            double s = 0.0;
            for (double x : w) s = std::max(s, std::abs(x));
            throw BlowUpError("radial", 1, s);
        }
    }
    return out;
}

/// Runs step_radial from phi = 0 to time T with fixed dt.
inline RadialProfile run_radial(const std::function<double(double)>& f_tilde, int n, double r_max, double dr,
                                double dt, double T) {
    RadialProfile phi = RadialProfile::zeros(dr, r_max, n);
    const auto f = sample_radial(f_tilde, phi);
    const long K = steps_until(T, dt);
    for (long k = 1; k <= K; ++k) {
        try {
            phi = step_radial(phi, f, dt);
        } catch (const BlowUpError& e) {
            throw BlowUpError("radial", k, e.sup_norm());
        }
    }
    return phi;
}

}  // namespace bsasym
