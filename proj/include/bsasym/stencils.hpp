#pragma once

// Discrete spatial operators on the uniform grid: one-sided and transverse-averaged
// differences, the eps-regularized curvature, three gradient magnitudes and the
// second-difference limiter used by the second-order upwind gradient.
//
// Every operator has a per-node template taking an accessor `u(i, j)` (so tests can
// evaluate single nodes through neumann_get) and a whole-field sweep over a padded copy.
// Per-node and sweep results are bitwise identical.

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "bsasym/errors.hpp"
#include "bsasym/grid.hpp"

namespace bsasym {

enum class Axis { x1, x2 };
enum class Side { plus, minus };

enum class Limiter {
    printed,  ///< mu(p,q) = p if |p| < q, q otherwise
    minmod,   ///< 0 on sign change, else the smaller magnitude
};

inline Limiter parse_limiter(std::string_view s) {
    if (s == "printed") return Limiter::printed;
    if (s == "minmod") return Limiter::minmod;
    throw ConfigError("unknown limiter '" + std::string(s) + "' (expected printed|minmod)");
}

inline std::string_view to_string(Limiter l) { return l == Limiter::printed ? "printed" : "minmod"; }

struct StencilParams {
    double eps = 0.001;  ///< curvature regularization
    double rho = 0.01;   ///< slope threshold for the central difference in |D^u|
    Limiter limiter = Limiter::printed;

    void validate() const {
        if (!(eps > 0.0)) throw ConfigError("solver.eps must be > 0");
        if (!(rho > 0.0)) throw ConfigError("solver.rho must be > 0");
    }
};

inline double limiter_mu(double p, double q) noexcept { return std::abs(p) < q ? p : q; }

inline double limiter_minmod(double p, double q) noexcept {
    if (p * q <= 0.0) return 0.0;
    return std::abs(p) < std::abs(q) ? p : q;
}

inline double apply_limiter(Limiter l, double p, double q) noexcept {
    return l == Limiter::printed ? limiter_mu(p, q) : limiter_minmod(p, q);
}

namespace detail {

inline double pos(double a) noexcept { return a > 0.0 ? a : 0.0; }

/// u at (along, across) offsets from (i, j) for the given axis.
template <class U>
inline double shifted(const U& u, Axis a, int i, int j, int along, int across) noexcept {
    return a == Axis::x1 ? u(i + along, j + across) : u(i + across, j + along);
}

inline Axis other(Axis a) noexcept { return a == Axis::x1 ? Axis::x2 : Axis::x1; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Differences (per node)
// ---------------------------------------------------------------------------

template <class U>
inline double diff_fwd(const U& u, Axis a, int i, int j, double dx) noexcept {
    return (detail::shifted(u, a, i, j, 1, 0) - u(i, j)) / dx;
}

template <class U>
inline double diff_bwd(const U& u, Axis a, int i, int j, double dx) noexcept {
    return (u(i, j) - detail::shifted(u, a, i, j, -1, 0)) / dx;
}

/// Central difference along `a`, averaged over the transverse shifts {0, +-1}.
template <class U>
inline double diff_transverse_avg(const U& u, Axis a, Side s, int i, int j, double dx) noexcept {
    const int t = s == Side::plus ? 1 : -1;
    const double hi = (detail::shifted(u, a, i, j, 1, t) + detail::shifted(u, a, i, j, 1, 0)) * 0.5;
    const double lo = (detail::shifted(u, a, i, j, -1, t) + detail::shifted(u, a, i, j, -1, 0)) * 0.5;
    return (hi - lo) / (2.0 * dx);
}

// Field-level entry points (neumann_get for neighbours).
inline double diff_fwd(const Field& f, Axis a, int i, int j) {
    return diff_fwd(ClampedAccess{f}, a, i, j, f.spec().dx());
}
inline double diff_bwd(const Field& f, Axis a, int i, int j) {
    return diff_bwd(ClampedAccess{f}, a, i, j, f.spec().dx());
}
inline double diff_transverse_avg(const Field& f, Axis a, Side s, int i, int j) {
    return diff_transverse_avg(ClampedAccess{f}, a, s, i, j, f.spec().dx());
}

// ---------------------------------------------------------------------------
// Regularized curvature
// ---------------------------------------------------------------------------

/// P^{+-}_{i,j} (axis x1) or Q^{+-}_{i,j} (axis x2).
template <class U>
inline double curvature_flux(const U& u, Axis a, Side s, int i, int j, double dx, double eps) noexcept {
    const double d = s == Side::plus ? diff_fwd(u, a, i, j, dx) : diff_bwd(u, a, i, j, dx);
    const double t = diff_transverse_avg(u, detail::other(a), s, i, j, dx);
    // Term order inside the root follows x1 before x2.
    const double r2 = a == Axis::x1 ? eps * eps + d * d + t * t : eps * eps + t * t + d * d;
    return d / std::sqrt(r2);
}

template <class U>
inline double curvature_at(const U& u, int i, int j, double dx, double eps) noexcept {
    const double pp = curvature_flux(u, Axis::x1, Side::plus, i, j, dx, eps);
    const double pm = curvature_flux(u, Axis::x1, Side::minus, i, j, dx, eps);
    const double qp = curvature_flux(u, Axis::x2, Side::plus, i, j, dx, eps);
    const double qm = curvature_flux(u, Axis::x2, Side::minus, i, j, dx, eps);
    return (pp - pm) / dx + (qp - qm) / dx;
}

// ---------------------------------------------------------------------------
// Gradient magnitudes (per node)
// ---------------------------------------------------------------------------

/// Central slope when it is at least rho, otherwise the larger one-sided slope.
template <class U>
inline double grad_hat_axis(const U& u, Axis a, int i, int j, double dx, double rho) noexcept {
    const double c = std::abs((detail::shifted(u, a, i, j, 1, 0) - detail::shifted(u, a, i, j, -1, 0)) / (2.0 * dx));
    if (c >= rho) return c;
    return std::max(std::abs(diff_fwd(u, a, i, j, dx)), std::abs(diff_bwd(u, a, i, j, dx)));
}

template <class U>
inline double grad_hat_at(const U& u, int i, int j, double dx, double rho) noexcept {
    const double h1 = grad_hat_axis(u, Axis::x1, i, j, dx, rho);
    const double h2 = grad_hat_axis(u, Axis::x2, i, j, dx, rho);
    return std::sqrt(h1 * h1 + h2 * h2);
}

/// Limited one-sided slopes d~+ and d~-.
struct LimitedSlopes {
    double plus;
    double minus;
};

template <class U>
inline LimitedSlopes limited_slopes(const U& u, Axis a, int i, int j, double dx, Limiter lim) noexcept {
    const double um2 = detail::shifted(u, a, i, j, -2, 0);
    const double um1 = detail::shifted(u, a, i, j, -1, 0);
    const double u0 = u(i, j);
    const double up1 = detail::shifted(u, a, i, j, 1, 0);
    const double up2 = detail::shifted(u, a, i, j, 2, 0);
    const double dx2 = dx * dx;
    const double centered = (up1 - 2.0 * u0 + um1) / dx2;
    const double shifted_p = (up2 - 2.0 * up1 + u0) / dx2;
    const double shifted_m = (um2 - 2.0 * um1 + u0) / dx2;
    const double dp = (up1 - u0) / dx;
    const double dm = (u0 - um1) / dx;
    return {dp - 0.5 * dx * apply_limiter(lim, shifted_p, centered),
            dm + 0.5 * dx * apply_limiter(lim, shifted_m, centered)};
}

/// Second-order upwind magnitude along one axis: max{(d~+)_+, (-d~-)_+}.
template <class U>
inline double grad_tilde_axis(const U& u, Axis a, int i, int j, double dx, Limiter lim) noexcept {
    const auto s = limited_slopes(u, a, i, j, dx, lim);
    return std::max(detail::pos(s.plus), detail::pos(-s.minus));
}

template <class U>
inline double grad_tilde_at(const U& u, int i, int j, double dx, Limiter lim) noexcept {
    const double g1 = grad_tilde_axis(u, Axis::x1, i, j, dx, lim);
    const double g2 = grad_tilde_axis(u, Axis::x2, i, j, dx, lim);
    return std::sqrt(g1 * g1 + g2 * g2);
}

/// First-order upwind magnitude along one axis: max{(d+)_+, -(d-)_-}.
template <class U>
inline double grad_bar_axis(const U& u, Axis a, int i, int j, double dx) noexcept {
    const double dp = diff_fwd(u, a, i, j, dx);
    const double dm = diff_bwd(u, a, i, j, dx);
    return std::max(detail::pos(dp), -std::min(dm, 0.0));
}

template <class U>
inline double grad_bar_at(const U& u, int i, int j, double dx) noexcept {
    const double g1 = grad_bar_axis(u, Axis::x1, i, j, dx);
    const double g2 = grad_bar_axis(u, Axis::x2, i, j, dx);
    return std::sqrt(g1 * g1 + g2 * g2);
}

// ---------------------------------------------------------------------------
// Whole-field sweeps
// ---------------------------------------------------------------------------

/// Evaluates `fn(padded, i, j)` at every node into `out` (flat, row-major).
template <class NodeFn>
inline void sweep_nodes(const PaddedField& p, std::span<double> out, NodeFn&& fn) {
    const int N = p.index_radius();
    std::size_t k = 0;
    for (int j = -N; j <= N; ++j)
        for (int i = -N; i <= N; ++i) out[k++] = fn(p, i, j);
}

/// Curvature sweep reusing face fluxes: P^+_{i,j} == P^-_{i+1,j} and Q^+_{i,j} == Q^-_{i,j+1}.
class CurvatureSweep {
public:
    explicit CurvatureSweep(const GridSpec& spec)
        : N_(spec.index_radius()), dx_(spec.dx()),
          px_(static_cast<std::size_t>(spec.nodes_per_axis() + 1)),
          q_lo_(static_cast<std::size_t>(spec.nodes_per_axis())),
          q_hi_(static_cast<std::size_t>(spec.nodes_per_axis())) {}

    void operator()(const PaddedField& p, double eps, std::span<double> out) {
        const int N = N_;
        const double dx = dx_;
        const int n = 2 * N + 1;
        // Q faces below row -N.
        const std::ptrdiff_t stride = p.stride();
        auto at = [&](int i, int j) { return NodeView{p.row(j) + i, stride}; };
        for (int i = -N; i <= N; ++i)
            q_lo_[i + N] = curvature_flux(at(i, -N - 1), Axis::x2, Side::plus, 0, 0, dx, eps);
        for (int j = -N; j <= N; ++j) {
            // px_[k] holds the x1 face between columns k-N-1 and k-N.
            for (int i = -N - 1; i <= N; ++i)
                px_[i + N + 1] = curvature_flux(at(i, j), Axis::x1, Side::plus, 0, 0, dx, eps);
            for (int i = -N; i <= N; ++i) q_hi_[i + N] = curvature_flux(at(i, j), Axis::x2, Side::plus, 0, 0, dx, eps);
            double* o = &out[static_cast<std::size_t>(j + N) * static_cast<std::size_t>(n)];
            for (int k = 0; k < n; ++k) o[k] = (px_[k + 1] - px_[k]) / dx + (q_hi_[k] - q_lo_[k]) / dx;
            q_lo_.swap(q_hi_);
        }
    }

private:
    int N_;
    double dx_;
    std::vector<double> px_;
    std::vector<double> q_lo_;
    std::vector<double> q_hi_;
};

inline Field curvature_reg(const Field& u, const StencilParams& params) {
    params.validate();
    PaddedField p(u.spec());
    p.assign(u);
    Field out(u.spec());
    CurvatureSweep sweep(u.spec());
    sweep(p, params.eps, out.values());
    return out;
}

inline Field grad_hat(const Field& u, const StencilParams& params) {
    params.validate();
    PaddedField p(u.spec());
    p.assign(u);
    Field out(u.spec());
    const double dx = u.spec().dx();
    sweep_nodes(p, out.values(), [&](const PaddedField& a, int i, int j) { return grad_hat_at(a, i, j, dx, params.rho); });
    return out;
}

inline Field grad_tilde(const Field& u, Limiter lim = Limiter::printed) {
    PaddedField p(u.spec());
    p.assign(u);
    Field out(u.spec());
    const double dx = u.spec().dx();
    sweep_nodes(p, out.values(), [&](const PaddedField& a, int i, int j) { return grad_tilde_at(a, i, j, dx, lim); });
    return out;
}

inline Field grad_bar(const Field& u) {
    PaddedField p(u.spec());
    p.assign(u);
    Field out(u.spec());
    const double dx = u.spec().dx();
    sweep_nodes(p, out.values(), [&](const PaddedField& a, int i, int j) { return grad_bar_at(a, i, j, dx); });
    return out;
}

}  // namespace bsasym
