#pragma once

// Tridiagonal kernels with factor-once / solve-many semantics.
//
// Row k of a tridiagonal matrix reads sub[k] x[k-1] + diag[k] x[k] + sup[k] x[k+1];
// sub[0] and sup[n-1] are ignored.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "svadi/errors.hpp"

namespace svadi {

inline constexpr double pivot_floor_ratio = 1e-14;

struct Tridiagonal {
    std::vector<double> sub, diag, sup;

    Tridiagonal() = default;
    explicit Tridiagonal(std::size_t n) : sub(n, 0.0), diag(n, 0.0), sup(n, 0.0) {}
    std::size_t size() const { return diag.size(); }
};

/// Thomas (LU without pivot search) factorization of one tridiagonal line.
/// L has unit diagonal and sub-diagonal `lower`; U has diagonal `pivot` and
/// super-diagonal equal to the original super-diagonal.
class TriFactor {
public:
    TriFactor() = default;

    std::size_t size() const { return inv_pivot_.size(); }
    double pivot_floor() const { return floor_; }

    /// Solves in place.
    void solve(std::span<double> x) const {
        const std::size_t n = size();
        if (x.size() != n) throw DimensionError("tri_solve: rhs length mismatch");
        for (std::size_t k = 1; k < n; ++k) x[k] -= lower_[k] * x[k - 1];
        x[n - 1] *= inv_pivot_[n - 1];
        for (std::size_t k = n - 1; k-- > 0;) x[k] = (x[k] - sup_[k] * x[k + 1]) * inv_pivot_[k];
    }

    /// Solves `batch` systems stored row-interleaved: unknown k of system b
    /// lives at base[k * stride + b]. All systems share this factor.
    void solve_batch(double* base, std::size_t stride, std::size_t batch) const {
        const std::size_t n = size();
        for (std::size_t k = 1; k < n; ++k) {
            const double l = lower_[k];
            double* row = base + k * stride;
            const double* prev = row - stride;
            for (std::size_t b = 0; b < batch; ++b) row[b] -= l * prev[b];
        }
        {
            double* row = base + (n - 1) * stride;
            const double ip = inv_pivot_[n - 1];
            for (std::size_t b = 0; b < batch; ++b) row[b] *= ip;
        }
        for (std::size_t k = n - 1; k-- > 0;) {
            double* row = base + k * stride;
            const double* next = row + stride;
            const double s = sup_[k], ip = inv_pivot_[k];
            for (std::size_t b = 0; b < batch; ++b) row[b] = (row[b] - s * next[b]) * ip;
        }
    }

    /// L * U, for verifying the factorization.
    Tridiagonal reconstruct() const {
        const std::size_t n = size();
        Tridiagonal t(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double p = 1.0 / inv_pivot_[k];
            t.diag[k] = p + (k > 0 ? lower_[k] * sup_[k - 1] : 0.0);
            if (k > 0) t.sub[k] = lower_[k] / inv_pivot_[k - 1];
            if (k + 1 < n) t.sup[k] = sup_[k];
        }
        return t;
    }

private:
    friend TriFactor tri_factor(std::span<const double>, std::span<const double>, std::span<const double>,
                                std::size_t, double);

    std::vector<double> lower_, inv_pivot_, sup_;
    double floor_ = 0.0;
};

/// Factors the line; `line` and `coordinate` only label the error report.
/// Throws SingularLineError when a pivot magnitude drops below
/// 1e-14 * max |coefficient|.
inline TriFactor tri_factor(std::span<const double> sub, std::span<const double> diag,
                            std::span<const double> sup, std::size_t line = 0, double coordinate = 0.0) {
    const std::size_t n = diag.size();
    if (n == 0) throw DimensionError("tri_factor: empty line");
    if (sub.size() != n || sup.size() != n) throw DimensionError("tri_factor: length mismatch");
    double scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        scale = std::max(scale, std::abs(diag[k]));
        if (k > 0) scale = std::max(scale, std::abs(sub[k]));
        if (k + 1 < n) scale = std::max(scale, std::abs(sup[k]));
    }
    TriFactor f;
    f.floor_ = pivot_floor_ratio * scale;
    f.lower_.assign(n, 0.0);
    f.inv_pivot_.assign(n, 0.0);
    f.sup_.assign(n, 0.0);
    double pivot = diag[0];
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            f.lower_[k] = sub[k] / pivot;
            pivot = diag[k] - f.lower_[k] * sup[k - 1];
        }
        if (!(std::abs(pivot) > f.floor_))
            throw SingularLineError("singular line " + std::to_string(line) + " at coordinate " +
                                        std::to_string(coordinate) + " (pivot " + std::to_string(k) + ")",
                                    line, coordinate);
        f.inv_pivot_[k] = 1.0 / pivot;
        if (k + 1 < n) f.sup_[k] = sup[k];
    }
    return f;
}

inline TriFactor tri_factor(const Tridiagonal& t, std::size_t line = 0, double coordinate = 0.0) {
    return tri_factor(t.sub, t.diag, t.sup, line, coordinate);
}

inline std::vector<double> tri_solve(const TriFactor& f, std::span<const double> rhs) {
    if (rhs.size() != f.size()) throw DimensionError("tri_solve: rhs length mismatch");
    std::vector<double> x(rhs.begin(), rhs.end());
    f.solve(x);
    return x;
}

inline std::vector<double> tri_apply(std::span<const double> sub, std::span<const double> diag,
                                     std::span<const double> sup, std::span<const double> x) {
    const std::size_t n = diag.size();
    if (sub.size() != n || sup.size() != n || x.size() != n) throw DimensionError("tri_apply: length mismatch");
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) {
        double s = diag[k] * x[k];
        if (k > 0) s += sub[k] * x[k - 1];
        if (k + 1 < n) s += sup[k] * x[k + 1];
        y[k] = s;
    }
    return y;
}

inline std::vector<double> tri_apply(const Tridiagonal& t, std::span<const double> x) {
    return tri_apply(t.sub, t.diag, t.sup, x);
}

/// Tridiagonal matrix whose first row carries extra entries on columns
/// 0..4 and whose last row carries extra entries on columns n-1, n-2, ..., n-5.
/// Arises when a wall value outside the line is a fixed linear combination
/// (extrapolation) of the first or last five unknowns.
struct BorderedTridiagonal {
    Tridiagonal base;
    std::array<double, 5> head{};  // added to row 0, columns 0..4
    std::array<double, 5> tail{};  // added to row n-1, columns n-1-k for k = 0..4

    std::size_t size() const { return base.size(); }

    std::vector<double> apply(std::span<const double> x) const {
        auto y = tri_apply(base, x);
        const std::size_t n = size();
        for (std::size_t k = 0; k < 5; ++k) {
            y[0] += head[k] * x[k];
            y[n - 1] += tail[k] * x[n - 1 - k];
        }
        return y;
    }
};

/// Factor-once solver for a BorderedTridiagonal: Thomas factorization of the
/// tridiagonal part plus a rank-two Sherman-Morrison-Woodbury correction
/// whose two auxiliary solves are done at factorization time.
class BorderedFactor {
public:
    BorderedFactor() = default;

    std::size_t size() const { return base_.size(); }

    void solve(std::span<double> x) const {
        base_.solve(x);
        correct(x.data(), 1, 1);
    }

    /// Row-interleaved batch as in TriFactor::solve_batch.
    void solve_batch(double* base, std::size_t stride, std::size_t batch) const {
        base_.solve_batch(base, stride, batch);
        correct(base, stride, batch);
    }

private:
    friend BorderedFactor bordered_factor(const BorderedTridiagonal&, std::size_t, double);

    void correct(double* base, std::size_t stride, std::size_t batch) const {
        const std::size_t n = size();
        for (std::size_t b = 0; b < batch; ++b) {
            double s0 = 0.0, s1 = 0.0;
            for (std::size_t k = 0; k < 5; ++k) {
                s0 += head_[k] * base[k * stride + b];
                s1 += tail_[k] * base[(n - 1 - k) * stride + b];
            }
            const double t0 = cap_inv_[0] * s0 + cap_inv_[1] * s1;
            const double t1 = cap_inv_[2] * s0 + cap_inv_[3] * s1;
            if (t0 == 0.0 && t1 == 0.0) continue;
            for (std::size_t k = 0; k < n; ++k) base[k * stride + b] -= z0_[k] * t0 + z1_[k] * t1;
        }
    }

    TriFactor base_;
    std::array<double, 5> head_{}, tail_{};
    std::vector<double> z0_, z1_;
    std::array<double, 4> cap_inv_{};
};

inline BorderedFactor bordered_factor(const BorderedTridiagonal& m, std::size_t line = 0, double coordinate = 0.0) {
    const std::size_t n = m.size();
    if (n < 5) throw DimensionError("bordered_factor: need at least 5 unknowns");
    BorderedFactor f;
    f.base_ = tri_factor(m.base, line, coordinate);
    f.head_ = m.head;
    f.tail_ = m.tail;
    f.z0_.assign(n, 0.0);
    f.z1_.assign(n, 0.0);
    f.z0_[0] = 1.0;
    f.z1_[n - 1] = 1.0;
    f.base_.solve(f.z0_);
    f.base_.solve(f.z1_);
    double c00 = 1.0, c01 = 0.0, c10 = 0.0, c11 = 1.0;
    for (std::size_t k = 0; k < 5; ++k) {
        c00 += m.head[k] * f.z0_[k];
        c01 += m.head[k] * f.z1_[k];
        c10 += m.tail[k] * f.z0_[n - 1 - k];
        c11 += m.tail[k] * f.z1_[n - 1 - k];
    }
    const double det = c00 * c11 - c01 * c10;
    const double scale = std::max({std::abs(c00 * c11), std::abs(c01 * c10), 1.0});
    if (!(std::abs(det) > pivot_floor_ratio * scale))
        throw SingularLineError("singular bordered line " + std::to_string(line), line, coordinate);
    f.cap_inv_ = {c11 / det, -c01 / det, -c10 / det, c00 / det};
    return f;
}

}  // namespace svadi
