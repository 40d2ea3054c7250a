#pragma once

// Fourth-order compact (HOC) line operators for the implicit ADI stages.
//
// For a one-directional operator  a(s) u_ss + b(s) u_s = g  the third and
// fourth derivatives are expressed through the equation itself,
//
//   u_sss  = (g_s - b' u_s - (a' + b) u_ss) / a
//   u_ssss = (g_ss - b'' u_s - (a'' + 2 b') u_ss - (2 a' + b) u_sss) / a,
//
// discretised with second-order central differences and substituted into
// u_s = d0 u - h^2/6 u_sss, u_ss = d2 u - h^2/12 u_ssss. Collecting u-terms
// on the left and g-terms on the right gives a tridiagonal pair A u = B g.
// Along x the coefficients are constant on a line (a' = b' = 0); along y
// they vary with the node.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "svadi/errors.hpp"
#include "svadi/grid.hpp"
#include "svadi/linalg.hpp"
#include "svadi/model.hpp"
#include "svadi/parallel.hpp"

namespace svadi {

struct TriCoeffs {
    double sub = 0, diag = 0, sup = 0;
    double sum() const { return sub + diag + sup; }
    friend bool operator==(const TriCoeffs&, const TriCoeffs&) = default;
};

struct LinePair {
    TriCoeffs a;  // acts on u
    TriCoeffs b;  // acts on g
};

/// Compact stencil for a(s) u_ss + b(s) u_s = g at one node with spacing h,
/// given a, b and their first two derivatives there.
inline LinePair hoc_line_coefficients(double a, double a1, double a2, double b, double b1, double b2, double h) {
    if (a == 0.0) {
        if (b == 0.0 && a1 == 0.0 && a2 == 0.0 && b1 == 0.0 && b2 == 0.0)
            return {{0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
        throw DomainError("compact scheme needs a nonzero diffusion coefficient");
    }
    const double p1 = -b1 / a;
    const double p2 = -(a1 + b) / a;
    const double q1 = (-b2 - (2 * a1 + b) * p1) / a;
    const double q2 = (-(a2 + 2 * b1) - (2 * a1 + b) * p2) / a;
    const double h2 = h * h;
    const double c2 = a - h2 * (a * q2 / 12.0 + b * p2 / 6.0);  // multiplies d2 u
    const double c1 = b - h2 * (a * q1 / 12.0 + b * p1 / 6.0);  // multiplies d0 u
    const double g1 = h2 * (b - 2 * a1) / (12.0 * a);           // multiplies d0 g
    LinePair out;
    out.a = {c2 / h2 - c1 / (2 * h), -2 * c2 / h2, c2 / h2 + c1 / (2 * h)};
    out.b = {1.0 / 12.0 - g1 / (2 * h), 5.0 / 6.0, 1.0 / 12.0 + g1 / (2 * h)};
    return out;
}

enum class LineOrientation { x_line, y_line };

/// Coefficients of A and B for one line of inner unknowns. An x-line runs
/// over i = 1..M-2 at fixed j; a y-line over j = 1..N-2 at fixed i. Entry k
/// of `a`/`b` is the row of inner unknown k along the line.
struct LineOperator {
    LineOrientation orientation = LineOrientation::x_line;
    std::size_t index = 0;
    std::vector<TriCoeffs> a, b;

    std::size_t size() const { return a.size(); }

    /// B - phi dtau A restricted to the inner unknowns of the line.
    Tridiagonal implicit_matrix(double phi_dtau) const {
        Tridiagonal t(size());
        for (std::size_t k = 0; k < size(); ++k) {
            t.sub[k] = b[k].sub - phi_dtau * a[k].sub;
            t.diag[k] = b[k].diag - phi_dtau * a[k].diag;
            t.sup[k] = b[k].sup - phi_dtau * a[k].sup;
        }
        t.sub[0] = 0.0;
        t.sup[size() - 1] = 0.0;
        return t;
    }
};

inline void require_line_grid(const Grid& g) {
    if (g.M < min_nodes_per_direction || g.N < min_nodes_per_direction)
        throw DimensionError("grid needs at least 7 nodes per direction");
}

/// Compact x-line at y-index j (1 <= j <= N-2).
inline LineOperator assemble_x_line(const Grid& g, const TransformedCoefficients& c, std::size_t j) {
    require_line_grid(g);
    const auto s = c.sample(g.y(j));
    LineOperator op{LineOrientation::x_line, j, {}, {}};
    const LinePair pair = hoc_line_coefficients(s.c_xx, 0.0, 0.0, s.c_x, 0.0, 0.0, g.dx);
    op.a.assign(g.M - 2, pair.a);
    op.b.assign(g.M - 2, pair.b);
    return op;
}

/// Compact y-line at x-index i. The coefficients do not depend on x, so all
/// y-lines of a grid are identical.
inline LineOperator assemble_y_line(const Grid& g, const TransformedCoefficients& c, std::size_t i) {
    require_line_grid(g);
    LineOperator op{LineOrientation::y_line, i, {}, {}};
    op.a.reserve(g.N - 2);
    op.b.reserve(g.N - 2);
    for (std::size_t j = 1; j + 1 < g.N; ++j) {
        const auto s = c.sample(g.y(j));
        const LinePair pair =
            hoc_line_coefficients(s.c_yy, s.c_yy_d1, s.c_yy_d2, s.c_y, s.c_y_d1, s.c_y_d2, g.dy);
        op.a.push_back(pair.a);
        op.b.push_back(pair.b);
    }
    return op;
}

/// Known x-wall contributions d in A u = B g + d, one entry per inner x-line
/// for the row next to each wall: d = B_wall g_wall - A_wall u_wall.
struct BoundaryVector {
    std::vector<double> low;   // row i = 1 of x-line j, stored at j - 1
    std::vector<double> high;  // row i = M-2

    /// Flattened onto inner unknowns in x-major order; zero except next to the walls.
    std::vector<double> dense(const Grid& g) const {
        std::vector<double> d(g.inner_count(), 0.0);
        InnerIndexMap map(g);
        for (std::size_t j = 1; j + 1 < g.N; ++j) {
            d[map.x_major(1, j)] += low[j - 1];
            d[map.x_major(g.M - 2, j)] += high[j - 1];
        }
        return d;
    }
};

/// `x_lines[j-1]` is the x-line at j; wall arrays are indexed the same way.
inline BoundaryVector assemble_boundary_vector(const std::vector<LineOperator>& x_lines,
                                               std::span<const double> u_low, std::span<const double> u_high,
                                               std::span<const double> g_low, std::span<const double> g_high) {
    const std::size_t lines = x_lines.size();
    if (u_low.size() != lines || u_high.size() != lines || g_low.size() != lines || g_high.size() != lines)
        throw DimensionError("boundary vector: wall arrays must have one entry per x-line");
    BoundaryVector d{std::vector<double>(lines), std::vector<double>(lines)};
    for (std::size_t k = 0; k < lines; ++k) {
        const auto& op = x_lines[k];
        const std::size_t last = op.size() - 1;
        d.low[k] = op.b[0].sub * g_low[k] - op.a[0].sub * u_low[k];
        d.high[k] = op.b[last].sup * g_high[k] - op.a[last].sup * u_high[k];
    }
    return d;
}

/// Dirichlet walls at time tau with vanishing wall g.
inline BoundaryVector assemble_boundary_vector(const Grid& g, const TransformedCoefficients& c, double tau,
                                               const ModelParams& p) {
    std::vector<LineOperator> lines;
    for (std::size_t j = 1; j + 1 < g.N; ++j) lines.push_back(assemble_x_line(g, c, j));
    const std::size_t n = lines.size();
    std::vector<double> ul(n, dirichlet_x(Side::low, tau, p, g.L1)), uh(n, dirichlet_x(Side::high, tau, p, g.L1));
    std::vector<double> zero(n, 0.0);
    return assemble_boundary_vector(lines, ul, uh, zero, zero);
}

/// Weights of the wall value as a combination of the five nearest interior
/// values: u_wall = 5 u_1 - 10 u_2 + 10 u_3 - 5 u_4 + u_5.
inline constexpr std::array<double, 5> extrapolation_weights{5.0, -10.0, 10.0, -5.0, 1.0};

/// Inner-only y-line matrix alpha B + beta A with the extrapolated y-wall
/// values folded into its first and last rows.
inline BorderedTridiagonal bordered_y_matrix(const LineOperator& y, double b_weight, double a_weight) {
    const std::size_t n = y.size();
    BorderedTridiagonal m;
    m.base = Tridiagonal(n);
    for (std::size_t k = 0; k < n; ++k) {
        m.base.sub[k] = b_weight * y.b[k].sub + a_weight * y.a[k].sub;
        m.base.diag[k] = b_weight * y.b[k].diag + a_weight * y.a[k].diag;
        m.base.sup[k] = b_weight * y.b[k].sup + a_weight * y.a[k].sup;
    }
    const double w0 = m.base.sub[0], w1 = m.base.sup[n - 1];
    m.base.sub[0] = 0.0;
    m.base.sup[n - 1] = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
        m.head[k] = w0 * extrapolation_weights[k];
        m.tail[k] = w1 * extrapolation_weights[k];
    }
    return m;
}

enum class SpatialOrder { fourth, second };

/// Assembled line operators and their implicit factorizations
/// (B - phi dtau A), ready for the time loop.
struct OperatorSet {
    SpatialOrder order = SpatialOrder::fourth;
    double phi = 0.5;
    double dtau = 0.0;
    std::vector<LineOperator> x_lines;  // x_lines[j-1] for j = 1..N-2
    LineOperator y_line;                // shared by every i
    std::vector<TriFactor> x_factors;
    BorderedFactor y_factor;
    std::size_t factorization_passes = 0;
};

/// Factors every x-line (one pass) and the shared y-line (second pass).
inline void factorize(OperatorSet& ops, const Grid& g) {
    const double pd = ops.phi * ops.dtau;
    ops.x_factors.assign(ops.x_lines.size(), TriFactor{});
    parallel_for(0, ops.x_lines.size(), [&](std::size_t k) {
        ops.x_factors[k] = tri_factor(ops.x_lines[k].implicit_matrix(pd), k + 1, g.y(k + 1));
    });
    ++ops.factorization_passes;
    ops.y_factor = bordered_factor(bordered_y_matrix(ops.y_line, 1.0, -pd), 0, g.x(1));
    ++ops.factorization_passes;
}

inline OperatorSet assemble_operator_set(const Grid& g, const TransformedCoefficients& c, double phi, double dtau) {
    require_line_grid(g);
    OperatorSet ops;
    ops.order = SpatialOrder::fourth;
    ops.phi = phi;
    ops.dtau = dtau;
    ops.x_lines.resize(g.N - 2);
    parallel_for(1, g.N - 1, [&](std::size_t j) { ops.x_lines[j - 1] = assemble_x_line(g, c, j); });
    ops.y_line = assemble_y_line(g, c, 1);
    factorize(ops, g);
    return ops;
}

}  // namespace svadi
