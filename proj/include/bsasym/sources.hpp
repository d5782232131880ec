#pragma once

// Forcing terms f(x) >= 0 together with the closed-form metadata the invariant
// monitors need: sup f, a support radius and a Euclidean Lipschitz bound.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "bsasym/errors.hpp"
#include "bsasym/grid.hpp"

namespace bsasym {

/// (r - |x|)_+
struct RadialCone {
    double r;
};

/// (r - |x1| - |x2|)_+
struct L1Cone {
    double r;
};

/// (R0 - |x - (offset,0)|)_+ + (R0 - |x + (offset,0)|)_+
struct TwinCones {
    double R0;
    double offset;
};

/// Indicator of the closed ball B(0, R0). Discontinuous.
struct BallIndicator {
    double R0;
};

/// Indicator of two closed balls of radius R0 centred at +-(offset, 0).
struct TwinBallIndicator {
    double R0;
    double offset;
};

/// Piecewise-linear radial profile; 0 beyond the last radius.
struct RadialTable {
    std::vector<double> radii;
    std::vector<double> values;

    double at(double r) const noexcept {
        if (r > radii.back()) return 0.0;
        if (r <= radii.front()) return values.front();
        auto it = std::upper_bound(radii.begin(), radii.end(), r);
        const auto k = static_cast<std::size_t>(it - radii.begin());
        const double w = (r - radii[k - 1]) / (radii[k] - radii[k - 1]);
        return values[k - 1] + w * (values[k] - values[k - 1]);
    }
};

using SourceTerm = std::variant<RadialCone, L1Cone, TwinCones, BallIndicator, TwinBallIndicator, RadialTable>;

inline constexpr double kInfiniteLipschitz = std::numeric_limits<double>::infinity();

inline void validate(const SourceTerm& src) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RadialCone> || std::is_same_v<T, L1Cone>) {
                if (!(s.r >= 0.0)) throw ConfigError("source.r must be >= 0");
            } else if constexpr (std::is_same_v<T, TwinCones> || std::is_same_v<T, TwinBallIndicator>) {
                if (!(s.R0 > 0.0)) throw ConfigError("source.R0 must be > 0");
                if (!(s.offset >= 0.0)) throw ConfigError("source.offset must be >= 0");
            } else if constexpr (std::is_same_v<T, BallIndicator>) {
                if (!(s.R0 > 0.0)) throw ConfigError("source.R0 must be > 0");
            } else {
                if (s.radii.empty() || s.radii.size() != s.values.size())
                    throw ConfigError("radial table: need matching non-empty radius/value columns");
                for (std::size_t k = 0; k < s.radii.size(); ++k) {
                    if (!(s.values[k] >= 0.0)) throw ConfigError("radial table: values must be nonnegative");
                    if (!(s.radii[k] >= 0.0)) throw ConfigError("radial table: radii must be nonnegative");
                    if (k > 0 && !(s.radii[k] > s.radii[k - 1]))
                        throw ConfigError("radial table: radii must be strictly increasing");
                }
            }
        },
        src);
}

inline double eval(const SourceTerm& src, Point x) noexcept {
    return std::visit(
        [x](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RadialCone>) {
                return std::max(s.r - norm(x), 0.0);
            } else if constexpr (std::is_same_v<T, L1Cone>) {
                return std::max(s.r - (std::abs(x.x1) + std::abs(x.x2)), 0.0);
            } else if constexpr (std::is_same_v<T, TwinCones>) {
                const double a = std::max(s.R0 - std::hypot(x.x1 - s.offset, x.x2), 0.0);
                const double b = std::max(s.R0 - std::hypot(x.x1 + s.offset, x.x2), 0.0);
                return a + b;
            } else if constexpr (std::is_same_v<T, BallIndicator>) {
                return norm(x) <= s.R0 ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, TwinBallIndicator>) {
                const bool in = std::hypot(x.x1 - s.offset, x.x2) <= s.R0 || std::hypot(x.x1 + s.offset, x.x2) <= s.R0;
                return in ? 1.0 : 0.0;
            } else {
                return s.at(norm(x));
            }
        },
        src);
}

/// sup_x f(x).
inline double max_value(const SourceTerm& src) noexcept {
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RadialCone> || std::is_same_v<T, L1Cone>) {
                return s.r;
            } else if constexpr (std::is_same_v<T, TwinCones>) {
                // Both cones are positive on the segment between the centres, where the sum is 2(R0 - offset).
                return std::max(s.R0, 2.0 * (s.R0 - s.offset));
            } else if constexpr (std::is_same_v<T, BallIndicator> || std::is_same_v<T, TwinBallIndicator>) {
                return 1.0;
            } else {
                return *std::max_element(s.values.begin(), s.values.end());
            }
        },
        src);
}

/// Smallest R with f = 0 outside B(0,R).
inline double support_radius(const SourceTerm& src) noexcept {
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RadialCone> || std::is_same_v<T, L1Cone>) {
                return s.r;
            } else if constexpr (std::is_same_v<T, TwinCones> || std::is_same_v<T, TwinBallIndicator>) {
                return s.offset + s.R0;
            } else if constexpr (std::is_same_v<T, BallIndicator>) {
                return s.R0;
            } else {
                return s.radii.back();
            }
        },
        src);
}

/// Euclidean Lipschitz bound on f; +inf for discontinuous sources.
inline double lipschitz_bound(const SourceTerm& src) noexcept {
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RadialCone>) {
                return 1.0;
            } else if constexpr (std::is_same_v<T, L1Cone>) {
                return std::numbers::sqrt2;
            } else if constexpr (std::is_same_v<T, TwinCones>) {
                return s.offset < s.R0 ? 2.0 : 1.0;
            } else if constexpr (std::is_same_v<T, BallIndicator> || std::is_same_v<T, TwinBallIndicator>) {
                return kInfiniteLipschitz;
            } else {
                if (s.values.back() > 0.0) return kInfiniteLipschitz;
                double L = 0.0;
                for (std::size_t k = 1; k < s.radii.size(); ++k)
                    L = std::max(L, std::abs(s.values[k] - s.values[k - 1]) / (s.radii[k] - s.radii[k - 1]));
                return L;
            }
        },
        src);
}

/// True when f(x) depends on |x| only.
inline bool is_radial(const SourceTerm& src) noexcept {
    return std::holds_alternative<RadialCone>(src) || std::holds_alternative<BallIndicator>(src) ||
           std::holds_alternative<RadialTable>(src) ||
           (std::holds_alternative<TwinCones>(src) && std::get<TwinCones>(src).offset == 0.0);
}

/// f~(r) for radial sources (evaluated on the x1 axis).
inline double radial_eval(const SourceTerm& src, double r) noexcept { return eval(src, Point{r, 0.0}); }

inline Field sample_to_field(const SourceTerm& src, const GridSpec& spec) {
    return Field::sample(spec, [&](Point x) { return eval(src, x); });
}

/// Two-column CSV `radius,value`; an optional non-numeric header line and `#` comments are skipped.
inline RadialTable load_radial_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open radial table '" + path + "'");
    RadialTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError("radial table: expected 'radius,value' in '" + line + "'");
        try {
            const double r = parse_double(std::string_view(line).substr(0, comma));
            const double v = parse_double(std::string_view(line).substr(comma + 1));
            t.radii.push_back(r);
            t.values.push_back(v);
        } catch (const ConfigError&) {
            if (!first) throw;
        }
        first = false;
    }
    validate(SourceTerm{t});
    return t;
}

}  // namespace bsasym
