#pragma once

// Speed estimates, error metrics, least-squares fits, level-set radii and the
// invariant monitors that check every sampled state of a run.

#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "bsasym/errors.hpp"
#include "bsasym/grid.hpp"
#include "bsasym/solvers.hpp"
#include "bsasym/sources.hpp"
#include "bsasym/stencils.hpp"

namespace bsasym {

/// mean(u) / t
inline double speed_estimate(const Field& u, double t) {
    if (!(t > 0.0)) throw ContractViolation("speed_estimate: t must be > 0");
    return mean(u) / t;
}

/// ||u/t - c||_{L2} / (2R)^2
inline double l2_error(const Field& u, double t, double c_target) {
    if (!(t > 0.0)) throw ContractViolation("l2_error: t must be > 0");
    Field d = u * (1.0 / t);
    d += -c_target;
    const double side = 2.0 * u.spec().half_width();
    return l2_seminorm(d) / (side * side);
}

// ---------------------------------------------------------------------------
// Speed series
// ---------------------------------------------------------------------------

struct SpeedSample {
    double t;
    double c_delta;
    double m_sup;
    double grad_max;
};

struct SpeedSeries {
    std::vector<SpeedSample> samples;

    void push(const SpeedSample& s) {
        if (!samples.empty() && !(s.t > samples.back().t))
            throw ContractViolation("SpeedSeries: times must be strictly increasing");
        samples.push_back(s);
    }
    bool empty() const noexcept { return samples.empty(); }
    const SpeedSample& back() const { return samples.back(); }
};

/// Header `t,c_delta,m_sup,grad_max`; `comment`, when non-empty, is written first as `# <comment>`.
inline void write_csv(std::ostream& os, const SpeedSeries& s, const std::string& comment = {}) {
    if (!comment.empty()) os << "# " << comment << '\n';
    os << "t,c_delta,m_sup,grad_max\n";
    for (const auto& p : s.samples)
        os << format_g17(p.t) << ',' << format_g17(p.c_delta) << ',' << format_g17(p.m_sup) << ','
           << format_g17(p.grad_max) << '\n';
}

struct SubadditivityViolation {
    double t;
    double s;
    double m_t;
    double m_s;
    double m_ts;
};

/// Pairs (t, s) of sample times, t <= s, with t+s also sampled and m(t+s) > m(t) + m(s) + tol,
/// where tol = tol_abs + tol_rel * m(t+s).
inline std::vector<SubadditivityViolation> subadditivity_report(const SpeedSeries& series, double tol_abs,
                                                                double tol_rel = 0.0) {
    const auto& v = series.samples;
    std::vector<SubadditivityViolation> out;
    auto find = [&](double t) -> const SpeedSample* {
        for (const auto& p : v)
            if (std::abs(p.t - t) <= 1e-9 * std::max(1.0, std::abs(t))) return &p;
        return nullptr;
    };
    for (std::size_t a = 0; a < v.size(); ++a) {
        for (std::size_t b = a; b < v.size(); ++b) {
            const SpeedSample* sum = find(v[a].t + v[b].t);
            if (sum == nullptr) continue;
            const double tol = tol_abs + tol_rel * sum->m_sup;
            if (sum->m_sup > v[a].m_sup + v[b].m_sup + tol)
                out.push_back({v[a].t, v[b].t, v[a].m_sup, v[b].m_sup, sum->m_sup});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------------

struct LineFit {
    double slope;
    double intercept;
    std::size_t n_points;
    double residual_l2;
};

struct XY {
    double x;
    double y;
};

inline LineFit fit_line(const std::vector<XY>& pts) {
    const std::size_t n = pts.size();
    if (n < 2) throw AnalysisError("fit_line: need at least two points");
    double mx = 0.0, my = 0.0;
    for (const auto& p : pts) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : pts) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
    }
    if (!(sxx > 0.0)) throw AnalysisError("fit_line: x values are all equal");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double res = 0.0;
    for (const auto& p : pts) {
        const double e = p.y - (slope * p.x + intercept);
        res += e * e;
    }
    return {slope, intercept, n, std::sqrt(res)};
}

inline void write_csv(std::ostream& os, const LineFit& fit, const std::string& comment = {}) {
    if (!comment.empty()) os << "# " << comment << '\n';
    os << "slope,intercept,n_points,residual_l2\n";
    os << format_g17(fit.slope) << ',' << format_g17(fit.intercept) << ',' << fit.n_points << ','
       << format_g17(fit.residual_l2) << '\n';
}

// ---------------------------------------------------------------------------
// Level-set radius
// ---------------------------------------------------------------------------

/// First crossing of u = level along the rays +x1, -x1, +x2, -x2 from the origin (linear interpolation).
inline std::array<double, 4> level_radius_rays(const Field& u, double level) {
    const int N = u.spec().index_radius();
    const double dx = u.spec().dx();
    constexpr std::array<std::array<int, 2>, 4> dirs{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
    std::array<double, 4> out{};
    for (std::size_t d = 0; d < dirs.size(); ++d) {
        const auto [di, dj] = dirs[d];
        bool found = false;
        for (int k = 0; k < N && !found; ++k) {
            const double a = u.at(k * di, k * dj) - level;
            const double b = u.at((k + 1) * di, (k + 1) * dj) - level;
            if (a == 0.0) {
                out[d] = k * dx;
                found = true;
            } else if ((a < 0.0) != (b < 0.0) || b == 0.0) {
                out[d] = (k + a / (a - b)) * dx;
                found = true;
            }
        }
        if (!found) throw AnalysisError("level_radius: level " + format_short(level) + " not crossed along a ray");
    }
    return out;
}

inline double level_radius(const Field& u, double level) {
    const auto r = level_radius_rays(u, level);
    return 0.25 * (r[0] + r[1] + r[2] + r[3]);
}

// ---------------------------------------------------------------------------
// Invariant monitors
// ---------------------------------------------------------------------------

/// Tolerances of the structural checks applied to runs started from u = 0.
struct MonitorTolerances {
    double M_f = 0.0;         ///< sup f
    double lipschitz = 0.0;   ///< Lipschitz bound of f, +inf disables the gradient check
    double dx = 0.0;
    double grad_slack = 0.1;  ///< additive slack of the gradient bound
    double grad_window = 2.0; ///< the gradient bound grows as L t up to this time and is frozen after
    double sub_rel = 0.05;

    static MonitorTolerances for_source(const SourceTerm& src, const GridSpec& spec) {
        MonitorTolerances t;
        t.M_f = max_value(src);
        t.lipschitz = lipschitz_bound(src);
        t.dx = spec.dx();
        return t;
    }

    double growth() const noexcept { return 10.0 * dx; }
    double rate() const noexcept { return 0.1 * (1.0 + M_f); }
    double sub_abs() const noexcept { return 10.0 * dx; }
    double gradient_bound(double t) const noexcept { return lipschitz * std::min(t, grad_window) + grad_slack; }
};

struct InvariantCheck {
    std::string name;
    bool passed = true;
    bool enabled = true;
    /// Smallest distance to the untolerated bound over all samples; negative means the exact
    /// bound was exceeded (the check may still pass within tolerance).
    double worst_margin = std::numeric_limits<double>::infinity();
    std::string detail;
};

class InvariantMonitor {
public:
    InvariantMonitor(MonitorTolerances tol, Limiter limiter = Limiter::printed) : tol_(tol), limiter_(limiter) {}

    /// Record one sampled state. `max_rate` is NaN when no post-warm-up step is available.
    void observe(double t, const Field& u, double max_rate = std::numeric_limits<double>::quiet_NaN()) {
        const double hi = sup(u);
        const double lo = inf(u);
        const double g = sup(grad_tilde(u, limiter_));
        if (t > 0.0) series_.push({t, speed_estimate(u, t), hi, g});

        note(bound_lo_, lo, 0.0, "t=" + format_short(t) + " inf u=" + format_g17(lo));
        note(bound_hi_, tol_.M_f * t - hi, tol_.growth(), "t=" + format_short(t) + " sup u=" + format_g17(hi));
        if (!std::isnan(max_rate))
            note(rate_, tol_.M_f - max_rate, tol_.rate(), "t=" + format_short(t) + " rate=" + format_g17(max_rate));
        if (std::isfinite(tol_.lipschitz)) {
            note(grad_, tol_.gradient_bound(t) - g, 0.0, "t=" + format_short(t) + " grad=" + format_g17(g));
        }
        if (have_prev_) note(monotone_, hi - prev_sup_, 0.0, "t=" + format_short(t) + " sup u decreased");
        prev_sup_ = hi;
        have_prev_ = true;
    }

    void observe(const Snapshot& s) { observe(s.t, s.u, s.max_rate); }

    const SpeedSeries& series() const noexcept { return series_; }

    std::vector<InvariantCheck> report() const {
        std::vector<InvariantCheck> out;
        out.push_back(finish("u_nonnegative", bound_lo_, true));
        out.push_back(finish("u_growth_bound", bound_hi_, true));
        out.push_back(finish("time_lipschitz", rate_, true));
        out.push_back(finish("space_lipschitz", grad_, std::isfinite(tol_.lipschitz)));
        out.push_back(finish("sup_nondecreasing", monotone_, true));

        InvariantCheck sub;
        sub.name = "subadditivity";
        const auto viol = subadditivity_report(series_, tol_.sub_abs(), tol_.sub_rel);
        sub.passed = viol.empty();
        if (!viol.empty()) {
            const auto& w = viol.front();
            sub.detail = std::to_string(viol.size()) + " violations, first m(" + format_short(w.t + w.s) +
                         ")=" + format_g17(w.m_ts) + " > m(" + format_short(w.t) + ")+m(" + format_short(w.s) + ")";
        }
        out.push_back(sub);
        return out;
    }

    bool all_passed() const {
        for (const auto& c : report())
            if (!c.passed) return false;
        return true;
    }

private:
    struct Tracker {
        double worst = std::numeric_limits<double>::infinity();
        bool failed = false;
        std::string first_failure;
    };

    static void note(Tracker& tr, double margin, double tol, const std::string& what) {
        tr.worst = std::min(tr.worst, margin);
        if (margin < -tol && !tr.failed) {
            tr.failed = true;
            tr.first_failure = what;
        }
    }

    static InvariantCheck finish(std::string name, const Tracker& tr, bool enabled) {
        InvariantCheck c;
        c.name = std::move(name);
        c.enabled = enabled;
        c.passed = !tr.failed;
        c.worst_margin = tr.worst;
        c.detail = tr.first_failure;
        if (!enabled) c.detail = "disabled (discontinuous source)";
        return c;
    }

    MonitorTolerances tol_;
    Limiter limiter_;
    SpeedSeries series_;
    Tracker bound_lo_, bound_hi_, rate_, grad_, monotone_;
    double prev_sup_ = 0.0;
    bool have_prev_ = false;
};

/// min over nodes of (upper - lower); the comparison check passes when this is >= -10 dx.
inline double comparison_margin(const Field& lower, const Field& upper) {
    lower.require_same(upper);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < lower.size(); ++k) m = std::min(m, upper[k] - lower[k]);
    return m;
}

}  // namespace bsasym
