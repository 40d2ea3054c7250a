#pragma once

// Explicit evaluation of F = F0 + F1 + F2 for the explicit ADI stages.
//
// Fourth order: classical 5-point central differences in each direction and
// the tensor product of 5-point first-derivative stencils for the mixed
// term. Near the rim of the inner grid the stencil reaches one node beyond
// the walls; those ghost values are extrapolated from the six nearest
// nodes along the outward normal.

#include <cstddef>
#include <vector>

#include "svadi/errors.hpp"
#include "svadi/grid.hpp"
#include "svadi/model.hpp"
#include "svadi/parallel.hpp"

namespace svadi {

/// Field with a one-node ghost ring; indices run from -1 to M (resp. N).
class ExtendedField {
public:
    ExtendedField() = default;
    ExtendedField(std::size_t M, std::size_t N) : M_(M), N_(N), stride_(M + 2), data_((M + 2) * (N + 2), 0.0) {}

    double& at(std::ptrdiff_t i, std::ptrdiff_t j) { return data_[index(i, j)]; }
    double at(std::ptrdiff_t i, std::ptrdiff_t j) const { return data_[index(i, j)]; }

    std::size_t M() const { return M_; }
    std::size_t N() const { return N_; }
    std::size_t stride() const { return stride_; }
    const double* row(std::ptrdiff_t j) const { return data_.data() + (j + 1) * stride_ + 1; }
    double* row(std::ptrdiff_t j) { return data_.data() + (j + 1) * stride_ + 1; }

private:
    std::size_t index(std::ptrdiff_t i, std::ptrdiff_t j) const {
        return static_cast<std::size_t>(j + 1) * stride_ + static_cast<std::size_t>(i + 1);
    }
    std::size_t M_ = 0, N_ = 0, stride_ = 0;
    std::vector<double> data_;
};

namespace detail {
inline double extrapolate6(double u1, double u2, double u3, double u4, double u5, double u6) {
    return 6.0 * u1 - 15.0 * u2 + 20.0 * u3 - 15.0 * u4 + 6.0 * u5 - u6;
}
}  // namespace detail

/// Copies u into `out` (resized if needed) and fills the ghost ring.
inline void extend_into(const Field& u, ExtendedField& out) {
    const std::size_t M = u.M(), N = u.N();
    if (M < 6 || N < 6) throw DimensionError("ghost extrapolation needs at least 6 nodes per direction");
    if (out.M() != M || out.N() != N) out = ExtendedField(M, N);
    for (std::size_t j = 0; j < N; ++j) {
        const double* src = u.x_line(j).data();
        double* dst = out.row(static_cast<std::ptrdiff_t>(j));
        std::copy(src, src + M, dst);
        dst[-1] = detail::extrapolate6(src[0], src[1], src[2], src[3], src[4], src[5]);
        dst[M] = detail::extrapolate6(src[M - 1], src[M - 2], src[M - 3], src[M - 4], src[M - 5], src[M - 6]);
    }
    // Columns i = -1 and M already hold x-ghosts, so extrapolating them along y
    // fills the corners with the tensor product of the two edge rules.
    const auto m = static_cast<std::ptrdiff_t>(M), n = static_cast<std::ptrdiff_t>(N);
    for (std::ptrdiff_t i = -1; i <= m; ++i) {
        out.at(i, -1) = detail::extrapolate6(out.at(i, 0), out.at(i, 1), out.at(i, 2), out.at(i, 3), out.at(i, 4), out.at(i, 5));
        out.at(i, n) = detail::extrapolate6(out.at(i, n - 1), out.at(i, n - 2), out.at(i, n - 3), out.at(i, n - 4),
                                            out.at(i, n - 5), out.at(i, n - 6));
    }
}

inline ExtendedField extend_with_ghosts(const Field& u) {
    ExtendedField e;
    extend_into(u, e);
    return e;
}

/// Coefficients sampled once per y-row.
struct RowCoefficients {
    std::vector<double> c_xx, c_yy, c_xy, c_x, c_y;

    RowCoefficients() = default;
    RowCoefficients(const Grid& g, const TransformedCoefficients& c) {
        for (std::size_t j = 0; j < g.N; ++j) {
            const auto s = c.sample(g.y(j));
            c_xx.push_back(s.c_xx);
            c_yy.push_back(s.c_yy);
            c_xy.push_back(s.c_xy);
            c_x.push_back(s.c_x);
            c_y.push_back(s.c_y);
        }
    }
};

namespace stencil {
// 5-point central first and second derivatives, offsets -2..2.
inline constexpr double d1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
inline constexpr double d2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
}  // namespace stencil

namespace detail {

template <class Kernel>
Field apply_rows(const Grid& g, Kernel&& kernel) {
    Field out(g);
    parallel_for(1, g.N - 1, [&](std::size_t j) {
        double* dst = out.x_line(j).data();
        for (std::size_t i = 1; i + 1 < g.M; ++i) dst[i] = kernel(i, j);
    });
    return out;
}

inline double f1_at(const ExtendedField& u, const Grid& g, const RowCoefficients& rc, std::size_t i, std::size_t j) {
    const double* r = u.row(static_cast<std::ptrdiff_t>(j)) + i;
    double s1 = 0, s2 = 0;
    for (int k = -2; k <= 2; ++k) {
        s1 += stencil::d1[k + 2] * r[k];
        s2 += stencil::d2[k + 2] * r[k];
    }
    return rc.c_xx[j] * s2 / (g.dx * g.dx) + rc.c_x[j] * s1 / g.dx;
}

inline double f2_at(const ExtendedField& u, const Grid& g, const RowCoefficients& rc, std::size_t i, std::size_t j) {
    double s1 = 0, s2 = 0;
    const auto jj = static_cast<std::ptrdiff_t>(j);
    for (int k = -2; k <= 2; ++k) {
        const double v = u.row(jj + k)[i];
        s1 += stencil::d1[k + 2] * v;
        s2 += stencil::d2[k + 2] * v;
    }
    return rc.c_yy[j] * s2 / (g.dy * g.dy) + rc.c_y[j] * s1 / g.dy;
}

inline double f0_at(const ExtendedField& u, const Grid& g, const RowCoefficients& rc, std::size_t i, std::size_t j) {
    if (rc.c_xy[j] == 0.0) return 0.0;
    double s = 0;
    const auto jj = static_cast<std::ptrdiff_t>(j);
    for (int q = -2; q <= 2; ++q) {
        if (q == 0) continue;
        const double* r = u.row(jj + q) + i;
        const double inner = stencil::d1[0] * r[-2] + stencil::d1[1] * r[-1] + stencil::d1[3] * r[1] +
                             stencil::d1[4] * r[2];
        s += stencil::d1[q + 2] * inner;
    }
    return rc.c_xy[j] * s / (g.dx * g.dy);
}

}  // namespace detail

/// F1 = c_xx u_xx + c_x u_x on inner nodes (walls of the result are zero).
inline Field apply_F1(const ExtendedField& u, const Grid& g, const RowCoefficients& rc) {
    return detail::apply_rows(g, [&](std::size_t i, std::size_t j) { return detail::f1_at(u, g, rc, i, j); });
}
inline Field apply_F2(const ExtendedField& u, const Grid& g, const RowCoefficients& rc) {
    return detail::apply_rows(g, [&](std::size_t i, std::size_t j) { return detail::f2_at(u, g, rc, i, j); });
}
inline Field apply_F0(const ExtendedField& u, const Grid& g, const RowCoefficients& rc) {
    return detail::apply_rows(g, [&](std::size_t i, std::size_t j) { return detail::f0_at(u, g, rc, i, j); });
}

inline Field apply_F1(const ExtendedField& u, const Grid& g, const TransformedCoefficients& c) {
    return apply_F1(u, g, RowCoefficients(g, c));
}
inline Field apply_F2(const ExtendedField& u, const Grid& g, const TransformedCoefficients& c) {
    return apply_F2(u, g, RowCoefficients(g, c));
}
inline Field apply_F0(const ExtendedField& u, const Grid& g, const TransformedCoefficients& c) {
    return apply_F0(u, g, RowCoefficients(g, c));
}

/// Fourth-order F(u) on inner nodes. The walls of u must already hold the
/// values for u's time level.
inline Field apply_F(const Field& u, const Grid& g, const RowCoefficients& rc) {
    const ExtendedField e = extend_with_ghosts(u);
    return detail::apply_rows(g, [&](std::size_t i, std::size_t j) {
        return detail::f0_at(e, g, rc, i, j) + detail::f1_at(e, g, rc, i, j) + detail::f2_at(e, g, rc, i, j);
    });
}
inline Field apply_F(const Field& u, const Grid& g, const TransformedCoefficients& c) {
    return apply_F(u, g, RowCoefficients(g, c));
}

/// Second-order F(u): 3-point central differences and the 4-point cross
/// stencil for u_xy. Touches only walls and inner nodes, never ghosts.
inline void apply_F_second_order_into(const Field& u, const Grid& g, const RowCoefficients& rc, Field& out) {
    const double idx2 = 1.0 / (g.dx * g.dx), idy2 = 1.0 / (g.dy * g.dy);
    const double i2dx = 0.5 / g.dx, i2dy = 0.5 / g.dy, i4dxdy = 0.25 / (g.dx * g.dy);
    parallel_for(1, g.N - 1, [&](std::size_t j) {
        const double* dn = u.x_line(j - 1).data();
        const double* c = u.x_line(j).data();
        const double* up = u.x_line(j + 1).data();
        double* dst = out.x_line(j).data();
        const double cxx = rc.c_xx[j], cx = rc.c_x[j], cyy = rc.c_yy[j], cy = rc.c_y[j], cxy = rc.c_xy[j];
        for (std::size_t i = 1; i + 1 < g.M; ++i) {
            const double uxx = (c[i - 1] - 2 * c[i] + c[i + 1]) * idx2;
            const double ux = (c[i + 1] - c[i - 1]) * i2dx;
            const double uyy = (dn[i] - 2 * c[i] + up[i]) * idy2;
            const double uy = (up[i] - dn[i]) * i2dy;
            const double uxy = (up[i + 1] - up[i - 1] - dn[i + 1] + dn[i - 1]) * i4dxdy;
            dst[i] = cxx * uxx + cx * ux + cyy * uyy + cy * uy + cxy * uxy;
        }
    });
}

inline Field apply_F_second_order(const Field& u, const Grid& g, const RowCoefficients& rc) {
    Field out(g);
    apply_F_second_order_into(u, g, rc, out);
    return out;
}

/// Reusable evaluator of the explicit operator for the time loop.
class ExplicitOperator {
public:
    enum class Order { fourth, second };

    ExplicitOperator(const Grid& g, const TransformedCoefficients& c, Order order)
        : grid_(g), rows_(g, c), order_(order) {}

    /// out(i,j) = F(u)(i,j) on inner nodes; wall entries of out are untouched.
    void apply(const Field& u, Field& out) {
        const Grid& g = grid_;
        if (order_ == Order::second) {
            apply_F_second_order_into(u, g, rows_, out);
            return;
        }
        extend_into(u, ext_);
        const double idx = 1.0 / g.dx, idx2 = idx * idx, idy = 1.0 / g.dy, idy2 = idy * idy;
        const double idxdy = 1.0 / (g.dx * g.dy);
        const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(ext_.stride());
        parallel_for(1, g.N - 1, [&](std::size_t j) {
            const double* c = ext_.row(static_cast<std::ptrdiff_t>(j));
            double* dst = out.x_line(j).data();
            const double cxx = rows_.c_xx[j] * idx2, cx = rows_.c_x[j] * idx;
            const double cyy = rows_.c_yy[j] * idy2, cy = rows_.c_y[j] * idy;
            const double cxy = rows_.c_xy[j] * idxdy;
            using stencil::d1;
            using stencil::d2;
            for (std::size_t i = 1; i + 1 < g.M; ++i) {
                const double* p = c + i;
                const double ux = d1[0] * p[-2] + d1[1] * p[-1] + d1[3] * p[1] + d1[4] * p[2];
                const double uxx = d2[0] * (p[-2] + p[2]) + d2[1] * (p[-1] + p[1]) + d2[2] * p[0];
                const double ym2 = p[-2 * s], ym1 = p[-s], yp1 = p[s], yp2 = p[2 * s];
                const double uy = d1[0] * ym2 + d1[1] * ym1 + d1[3] * yp1 + d1[4] * yp2;
                const double uyy = d2[0] * (ym2 + yp2) + d2[1] * (ym1 + yp1) + d2[2] * p[0];
                double value = cxx * uxx + cx * ux + cyy * uyy + cy * uy;
                if (cxy != 0.0) {
                    double m = 0.0;
                    for (int q = -2; q <= 2; ++q) {
                        if (q == 0) continue;
                        const double* r = p + q * s;
                        m += d1[q + 2] * (d1[0] * r[-2] + d1[1] * r[-1] + d1[3] * r[1] + d1[4] * r[2]);
                    }
                    value += cxy * m;
                }
                dst[i] = value;
            }
        });
    }

    const RowCoefficients& rows() const { return rows_; }

private:
    Grid grid_;
    RowCoefficients rows_;
    Order order_;
    ExtendedField ext_;
};

}  // namespace svadi
