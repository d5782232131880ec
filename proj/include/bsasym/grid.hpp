#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bsasym/errors.hpp"

namespace bsasym {

// ---------------------------------------------------------------------------
// Number formatting shared by every text output.
// ---------------------------------------------------------------------------

/// 17 significant digits, round-trips every double.
inline std::string format_g17(double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

/// Shortest representation that round-trips.
inline std::string format_short(double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ConfigError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

struct Point {
    double x1 = 0.0;
    double x2 = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double norm(Point p) { return std::hypot(p.x1, p.x2); }

// ---------------------------------------------------------------------------
// GridSpec
// ---------------------------------------------------------------------------

/// Uniform square grid on [-R,R]^2 with nodes x_{i,j} = (i dx, j dx), -N <= i,j <= N.
class GridSpec {
public:
    GridSpec(double half_width, int index_radius) : R_(half_width), N_(index_radius), dx_(half_width / index_radius) {
        if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ConfigError("grid.R must be positive");
        if (index_radius < 1) throw ConfigError("grid.N must be a positive integer");
    }

    double half_width() const noexcept { return R_; }
    int index_radius() const noexcept { return N_; }
    double dx() const noexcept { return dx_; }
    /// Nodes per axis, 2N+1.
    int nodes_per_axis() const noexcept { return 2 * N_ + 1; }
    std::size_t size() const noexcept {
        auto n = static_cast<std::size_t>(nodes_per_axis());
        return n * n;
    }

    bool contains(int i, int j) const noexcept { return i >= -N_ && i <= N_ && j >= -N_ && j <= N_; }

    /// Row-major in j then i.
    std::size_t flat_index(int i, int j) const noexcept {
        return static_cast<std::size_t>(j + N_) * static_cast<std::size_t>(nodes_per_axis()) +
               static_cast<std::size_t>(i + N_);
    }

    int clamp_index(int i) const noexcept { return std::clamp(i, -N_, N_); }

    friend bool operator==(const GridSpec& a, const GridSpec& b) noexcept { return a.R_ == b.R_ && a.N_ == b.N_; }

private:
    double R_;
    int N_;
    double dx_;
};

inline Point node_coord(const GridSpec& spec, int i, int j) {
    if (!spec.contains(i, j)) {
        throw ContractViolation("node_coord: index (" + std::to_string(i) + "," + std::to_string(j) +
                                ") outside [-N,N]");
    }
    return {i * spec.dx(), j * spec.dx()};
}

// ---------------------------------------------------------------------------
// Field
// ---------------------------------------------------------------------------

/// Scalar node values on a GridSpec. Value semantics; arithmetic requires identical specs.
class Field {
public:
    explicit Field(GridSpec spec, double fill = 0.0) : spec_(spec), values_(spec.size(), fill) {}

    Field(GridSpec spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
        if (values_.size() != spec_.size()) throw ContractViolation("Field: value count does not match grid");
    }

    template <class Fn>
    static Field sample(const GridSpec& spec, Fn&& fn) {
        Field out(spec);
        const int N = spec.index_radius();
        for (int j = -N; j <= N; ++j)
            for (int i = -N; i <= N; ++i) out.at(i, j) = fn(Point{i * spec.dx(), j * spec.dx()});
        return out;
    }

    const GridSpec& spec() const noexcept { return spec_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& at(int i, int j) noexcept { return values_[spec_.flat_index(i, j)]; }
    double at(int i, int j) const noexcept { return values_[spec_.flat_index(i, j)]; }

    double& operator[](std::size_t k) noexcept { return values_[k]; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool all_finite() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    Field& operator+=(const Field& o) {
        require_same(o);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
        return *this;
    }
    Field& operator-=(const Field& o) {
        require_same(o);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
        return *this;
    }
    Field& operator*=(double s) noexcept {
        for (double& v : values_) v *= s;
        return *this;
    }
    Field& operator+=(double s) noexcept {
        for (double& v : values_) v += s;
        return *this;
    }

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(Field a, double s) { return a *= s; }
    friend Field operator*(double s, Field a) { return a *= s; }

    friend bool operator==(const Field& a, const Field& b) { return a.spec_ == b.spec_ && a.values_ == b.values_; }

    void require_same(const Field& o) const {
        if (!(spec_ == o.spec_)) throw ContractViolation("fields live on different grids");
    }

private:
    GridSpec spec_;
    std::vector<double> values_;
};

/// Value at (clamp(i), clamp(j)): zero-Neumann ghost values by constant extrapolation.
inline double neumann_get(const Field& f, int i, int j) noexcept {
    const auto& s = f.spec();
    return f.at(s.clamp_index(i), s.clamp_index(j));
}

/// Field values with two layers of clamped ghost nodes, for branch-free stencil sweeps.
class PaddedField {
public:
    static constexpr int kGhost = 2;

    explicit PaddedField(const GridSpec& spec)
        : N_(spec.index_radius()), stride_(spec.nodes_per_axis() + 2 * kGhost),
          data_(static_cast<std::size_t>(stride_) * static_cast<std::size_t>(stride_), 0.0) {}

    void assign(const Field& f) {
        const int N = N_;
        const int lo = -N - kGhost;
        const int hi = N + kGhost;
        for (int j = lo; j <= hi; ++j) {
            const int jc = std::clamp(j, -N, N);
            double* row = &data_[offset(0, j)];
            const double* src = &f.values()[f.spec().flat_index(-N, jc)];
            for (int i = -N; i <= N; ++i) row[i] = src[i + N];
            for (int g = 1; g <= kGhost; ++g) {
                row[-N - g] = src[0];
                row[N + g] = src[2 * N];
            }
        }
    }

    int index_radius() const noexcept { return N_; }
    double operator()(int i, int j) const noexcept { return data_[offset(i, j)]; }
    /// Pointer to node (0, j); valid for column offsets in [-N-2, N+2].
    const double* row(int j) const noexcept { return &data_[offset(0, j)]; }
    int stride() const noexcept { return stride_; }

private:
    std::size_t offset(int i, int j) const noexcept {
        return static_cast<std::size_t>(j + N_ + kGhost) * static_cast<std::size_t>(stride_) +
               static_cast<std::size_t>(i + N_ + kGhost);
    }

    int N_;
    int stride_;
    std::vector<double> data_;
};

/// Accessor relative to one node of a PaddedField: v(di, dj) is the value at offset (di, dj).
struct NodeView {
    const double* centre;
    std::ptrdiff_t stride;
    double operator()(int di, int dj) const noexcept { return centre[di + dj * stride]; }
};

/// Accessor with the neumann_get contract over an unpadded Field.
struct ClampedAccess {
    const Field& field;
    double operator()(int i, int j) const noexcept { return neumann_get(field, i, j); }
};

// ---------------------------------------------------------------------------
// Reductions
// ---------------------------------------------------------------------------

inline double mean(const Field& f) noexcept {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s / static_cast<double>(f.size());
}

/// sqrt(sum v^2 dx^2).
inline double l2_seminorm(const Field& f) noexcept {
    double s = 0.0;
    for (double v : f.values()) s += v * v;
    return std::sqrt(s) * f.spec().dx();
}

inline double sup(const Field& f) noexcept { return *std::max_element(f.values().begin(), f.values().end()); }
inline double inf(const Field& f) noexcept { return *std::min_element(f.values().begin(), f.values().end()); }

inline double sup_abs(const Field& f) noexcept {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

// ---------------------------------------------------------------------------
// Heightmap dump: "# R=<R> N=<N> t=<t>" then 2N+1 rows (j=-N..N) of 2N+1 values (i=-N..N).
// ---------------------------------------------------------------------------

inline void write_heightmap(std::ostream& os, const Field& f, double t) {
    const auto& s = f.spec();
    const int N = s.index_radius();
    os << "# R=" << format_short(s.half_width()) << " N=" << N << " t=" << format_short(t) << '\n';
    for (int j = -N; j <= N; ++j) {
        for (int i = -N; i <= N; ++i) {
            if (i > -N) os << ',';
            os << format_g17(f.at(i, j));
        }
        os << '\n';
    }
}

struct Heightmap {
    Field field;
    double t;
};

inline Heightmap read_heightmap(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("# R=", 0) != 0) throw ConfigError("heightmap: bad header");
    double R = 0.0, t = 0.0;
    int N = 0;
    {
        std::istringstream hs(header.substr(2));
        std::string tok;
        while (hs >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) throw ConfigError("heightmap: bad header token " + tok);
            auto key = tok.substr(0, eq);
            auto val = std::string_view(tok).substr(eq + 1);
            if (key == "R") R = parse_double(val);
            else if (key == "N") N = static_cast<int>(parse_double(val));
            else if (key == "t") t = parse_double(val);
            else throw ConfigError("heightmap: unknown header key " + key);
        }
    }
    GridSpec spec(R, N);
    Field f(spec);
    std::string line;
    for (int j = -N; j <= N; ++j) {
        if (!std::getline(is, line)) throw ConfigError("heightmap: truncated");
        std::string_view rest(line);
        for (int i = -N; i <= N; ++i) {
            auto comma = rest.find(',');
            auto cell = rest.substr(0, comma);
            f.at(i, j) = parse_double(cell);
            if (comma == std::string_view::npos) {
                if (i != N) throw ConfigError("heightmap: short row");
                rest = {};
            } else {
                if (i == N) throw ConfigError("heightmap: long row");
                rest.remove_prefix(comma + 1);
            }
        }
    }
    return {std::move(f), t};
}

}  // namespace bsasym
