#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "svadi/errors.hpp"

namespace svadi {

/// Truncated computational rectangle [L1, K1] x [L2, K2] in (x, y).
struct Bounds {
    double L1 = -5.0;
    double K1 = 5.0;
    double L2 = 0.1;
    double K2 = 5.0;

    void validate() const {
        if (!(std::isfinite(L1) && std::isfinite(K1) && std::isfinite(L2) && std::isfinite(K2)))
            throw ConfigError("domain", "bounds must be finite");
        if (!(L1 < K1)) throw ConfigError("domain.L1", "need L1 < K1");
        if (!(L2 > 0)) throw ConfigError("domain.L2", "need L2 > 0");
        if (!(L2 < K2)) throw ConfigError("domain.K2", "need L2 < K2");
    }
};

/// Uniform tensor mesh. Indices are 0-based: x_i = L1 + i dx for i < M,
/// y_j = L2 + j dy for j < N. Nodes with i in {0, M-1} are x-walls, nodes
/// with j in {0, N-1} (and 0 < i < M-1) are y-walls, the rest are inner.
struct Grid {
    double L1, K1, L2, K2;
    std::size_t M, N;
    double dx, dy;

    double x(std::size_t i) const { return L1 + static_cast<double>(i) * dx; }
    double y(std::size_t j) const { return L2 + static_cast<double>(j) * dy; }

    std::size_t inner_x() const { return M - 2; }
    std::size_t inner_y() const { return N - 2; }
    std::size_t inner_count() const { return inner_x() * inner_y(); }

    /// Index of the x-node nearest to the given coordinate.
    std::size_t nearest_x(double xv) const {
        double k = std::round((xv - L1) / dx);
        return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(M - 1)));
    }
    std::size_t nearest_y(double yv) const {
        double k = std::round((yv - L2) / dy);
        return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(N - 1)));
    }
};

inline constexpr std::size_t min_nodes_per_direction = 7;
inline constexpr double strike_tolerance = 1e-12;

namespace detail {

// Smallest interval count with spacing <= h. The slack absorbs the rounding in
// quotients such as 4.9 / 0.1.
inline std::size_t interval_count(double length, double h) {
    return static_cast<std::size_t>(std::ceil(length / h - 1e-9));
}

inline bool strike_on_mesh(double L1, double dx, std::size_t M) {
    double k = std::round(-L1 / dx);
    if (k < 0 || k > static_cast<double>(M - 1)) return false;
    return std::abs(L1 + k * dx) < strike_tolerance;
}

inline Grid make_grid(const Bounds& b, std::size_t mx, std::size_t ny) {
    if (mx + 1 < min_nodes_per_direction || ny + 1 < min_nodes_per_direction)
        throw ConfigError("h", "domain too small: need at least 7 nodes per direction");
    Grid g{b.L1, b.K1, b.L2, b.K2, mx + 1, ny + 1, (b.K1 - b.L1) / static_cast<double>(mx),
           (b.K2 - b.L2) / static_cast<double>(ny)};
    return g;
}

}  // namespace detail

/// Mesh with the smallest node counts achieving spacing <= h in both
/// directions. If a node lands on the strike (x = 0) the x-mesh is shifted by
/// half a cell, moving both x-bounds.
inline Grid build_grid(const Bounds& bounds, double h) {
    bounds.validate();
    if (!(h > 0) || !std::isfinite(h)) throw ConfigError("h", "must be > 0");
    Grid g = detail::make_grid(bounds, detail::interval_count(bounds.K1 - bounds.L1, h),
                               detail::interval_count(bounds.K2 - bounds.L2, h));
    if (detail::strike_on_mesh(g.L1, g.dx, g.M)) {
        g.L1 += 0.5 * g.dx;
        g.K1 += 0.5 * g.dx;
    }
    return g;
}

/// Nested meshes for refinement studies: one grid per spacing in `h_levels`,
/// which must be h_max / 2^k. The upper bounds are extended so the domain
/// length is a whole multiple of h_max, giving dx = dy = h on every level,
/// and a single strike shift (half a cell of the finest level) is applied to
/// all levels so every coarse node coincides bitwise with a fine node.
inline std::vector<Grid> build_nested_grids(const Bounds& bounds, std::span<const double> h_levels) {
    bounds.validate();
    if (h_levels.empty()) return {};
    const double h_max = *std::max_element(h_levels.begin(), h_levels.end());
    const double h_min = *std::min_element(h_levels.begin(), h_levels.end());
    if (!(h_min > 0)) throw ConfigError("h", "must be > 0");
    std::vector<std::size_t> factor;
    for (double h : h_levels) {
        double ratio = h_max / h;
        double k = std::round(std::log2(ratio));
        if (std::abs(ratio - std::exp2(k)) > 1e-9 * ratio)
            throw ConfigError("h", "spacings must be h_max / 2^k for nested meshes");
        factor.push_back(static_cast<std::size_t>(std::exp2(k)));
    }
    const std::size_t mx = detail::interval_count(bounds.K1 - bounds.L1, h_max);
    const std::size_t ny = detail::interval_count(bounds.K2 - bounds.L2, h_max);
    Bounds b = bounds;
    b.K1 = b.L1 + static_cast<double>(mx) * h_max;
    b.K2 = b.L2 + static_cast<double>(ny) * h_max;

    const std::size_t finest = *std::max_element(factor.begin(), factor.end());
    const double dx_finest = (b.K1 - b.L1) / static_cast<double>(mx * finest);
    if (detail::strike_on_mesh(b.L1, dx_finest, mx * finest + 1)) {
        b.L1 += 0.5 * dx_finest;
        b.K1 += 0.5 * dx_finest;
    }
    std::vector<Grid> out;
    for (std::size_t f : factor) out.push_back(detail::make_grid(b, mx * f, ny * f));
    return out;
}

/// Uniform partition of [0, T] into P levels with fixed parabolic mesh ratio.
struct TimeGrid {
    double T;
    std::size_t P;
    double dtau;
    double gamma;  // dtau / h^2 after adjustment

    double tau(std::size_t k) const { return static_cast<double>(k) * dtau; }
    std::size_t steps() const { return P - 1; }
};

inline TimeGrid build_time_grid(double T, double gamma, double h) {
    if (!(T > 0)) throw ConfigError("maturity", "must be > 0");
    if (!(gamma > 0)) throw ConfigError("gamma", "must be > 0");
    if (!(h > 0)) throw ConfigError("h", "must be > 0");
    const double raw = gamma * h * h;
    const std::size_t steps = std::max<std::size_t>(1, detail::interval_count(T, raw));
    const double dtau = T / static_cast<double>(steps);
    return {T, steps + 1, dtau, dtau / (h * h)};
}

/// Time grid with an explicit step count (used for temporal refinement).
inline TimeGrid time_grid_with_steps(double T, std::size_t steps, double h) {
    if (steps == 0) return {T, 1, 0.0, 0.0};
    const double dtau = T / static_cast<double>(steps);
    return {T, steps + 1, dtau, dtau / (h * h)};
}

/// Transformed option values on every node of a grid, x-lines contiguous.
class Field {
public:
    Field() = default;
    Field(std::size_t M, std::size_t N, double value = 0.0) : M_(M), N_(N), data_(M * N, value) {}
    explicit Field(const Grid& g, double value = 0.0) : Field(g.M, g.N, value) {}

    double& operator()(std::size_t i, std::size_t j) { return data_[j * M_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[j * M_ + i]; }

    std::size_t M() const { return M_; }
    std::size_t N() const { return N_; }
    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }
    std::span<double> x_line(std::size_t j) { return {data_.data() + j * M_, M_}; }
    std::span<const double> x_line(std::size_t j) const { return {data_.data() + j * M_, M_}; }

    friend bool operator==(const Field&, const Field&) = default;

private:
    std::size_t M_ = 0, N_ = 0;
    std::vector<double> data_;
};

/// Flat numbering of inner unknowns. x_major numbers along x-lines
/// (i fastest), y_major along y-lines (j fastest); both views address the
/// same Field storage. Index 0 is node (1,1), the last is (M-2, N-2).
class InnerIndexMap {
public:
    explicit InnerIndexMap(const Grid& g) : nx_(g.M - 2), ny_(g.N - 2) {}

    std::size_t size() const { return nx_ * ny_; }

    std::size_t x_major(std::size_t i, std::size_t j) const { return (j - 1) * nx_ + (i - 1); }
    std::size_t y_major(std::size_t i, std::size_t j) const { return (i - 1) * ny_ + (j - 1); }

    struct Node {
        std::size_t i, j;
        friend bool operator==(const Node&, const Node&) = default;
    };
    Node from_x_major(std::size_t k) const { return {k % nx_ + 1, k / nx_ + 1}; }
    Node from_y_major(std::size_t k) const { return {k / ny_ + 1, k % ny_ + 1}; }

private:
    std::size_t nx_, ny_;
};

}  // namespace svadi
