#pragma once

// Hundsdorfer-Verwer ADI time loop
//
//   Y0 = U + dt F(U)
//   Y1 = Y0 + phi dt (F1(Y1) - F1(U))           x-implicit
//   Y2 = Y1 + phi dt (F2(Y2) - F2(U))           y-implicit
//   Z0 = Y0 + psi dt (F(Y2) - F(U))
//   Z1 = Z0 + phi dt (F1(Z1) - F1(Y2))          x-implicit
//   Z2 = Z1 + phi dt (F2(Z2) - F2(Y2))          y-implicit
//   U' = Z2
//
// Implicit stages use the compact form A u = B F, i.e. they solve
// (B - phi dt A) Y = B P - phi dt A R for predictor P and reference R.
// Every stage approximates level n+1, so its walls are set to tau_{n+1}:
// Dirichlet on x-walls, extrapolation from the five nearest rows on y-walls.
// In the y-solves the extrapolated wall values of the unknown are folded
// into the line matrix, so the walls of the result are consistent with it.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "svadi/baseline.hpp"
#include "svadi/errors.hpp"
#include "svadi/explicit_stencils.hpp"
#include "svadi/grid.hpp"
#include "svadi/implicit_hoc.hpp"
#include "svadi/linalg.hpp"
#include "svadi/model.hpp"
#include "svadi/parallel.hpp"

namespace svadi {

enum class Scheme { high_order, second_order_baseline };

inline const char* scheme_name(Scheme s) { return s == Scheme::high_order ? "ho" : "second"; }

struct HVConfig {
    double phi = 0.5;
    double psi = 0.5;
    Scheme scheme = Scheme::high_order;
    bool smooth_payoff = true;

    void validate() const {
        if (!(phi > 0 && phi <= 1)) throw ConfigError("phi", "must lie in (0, 1]");
        if (!std::isfinite(psi)) throw ConfigError("psi", "must be finite");
    }
};

/// Values imposed on the x-walls as functions of tau.
struct XWalls {
    std::function<double(double)> low, high;

    static XWalls dirichlet(const ModelParams& p, double L1) {
        return {[p, L1](double tau) { return dirichlet_x(Side::low, tau, p, L1); },
                [p, L1](double tau) { return dirichlet_x(Side::high, tau, p, L1); }};
    }
    static XWalls constant(double low, double high) {
        return {[low](double) { return low; }, [high](double) { return high; }};
    }
};

/// Sets rows j = 0 and j = N-1 (0 < i < M-1) from the five adjacent interior rows.
inline void refresh_y_walls_in_place(Field& u) {
    const std::size_t M = u.M(), N = u.N();
    if (N < min_nodes_per_direction) throw DimensionError("y-wall extrapolation needs at least 7 rows");
    const auto& w = extrapolation_weights;
    for (std::size_t i = 1; i + 1 < M; ++i) {
        u(i, 0) = w[0] * u(i, 1) + w[1] * u(i, 2) + w[2] * u(i, 3) + w[3] * u(i, 4) + w[4] * u(i, 5);
        u(i, N - 1) = w[0] * u(i, N - 2) + w[1] * u(i, N - 3) + w[2] * u(i, N - 4) + w[3] * u(i, N - 5) +
                      w[4] * u(i, N - 6);
    }
}

inline Field refresh_y_walls(Field u) {
    refresh_y_walls_in_place(u);
    return u;
}

inline void set_x_walls(Field& u, double low, double high) {
    for (std::size_t j = 0; j < u.N(); ++j) {
        u(0, j) = low;
        u(u.M() - 1, j) = high;
    }
}

/// Payoff on every node with walls consistent with tau = 0. With `smooth`,
/// nodes within three cells of the strike take the kernel-averaged payoff.
inline Field initial_field(const Grid& g, const XWalls& walls, bool smooth = true) {
    Field u(g);
    std::vector<double> row(g.M);
    for (std::size_t i = 0; i < g.M; ++i) {
        const double x = g.x(i);
        row[i] = smooth && std::abs(x) < 3.0 * g.dx ? smoothed_initial_condition(x, g.dx) : initial_condition(x);
    }
    for (std::size_t j = 0; j < g.N; ++j)
        for (std::size_t i = 0; i < g.M; ++i) u(i, j) = row[i];
    set_x_walls(u, walls.low(0.0), walls.high(0.0));
    refresh_y_walls_in_place(u);
    return u;
}

struct RunStats {
    std::size_t factorization_passes = 0;
    std::size_t steps = 0;
    double setup_seconds = 0.0;
    double loop_seconds = 0.0;
};

struct SolverState {
    Field u;
    std::size_t n = 0;
    double tau = 0.0;
};

/// Owns the factored operators and scratch fields for one (grid, dtau, scheme).
class HVStepper {
public:
    HVStepper(const Grid& g, const TransformedCoefficients& c, XWalls walls, double dtau, HVConfig hv = {})
        : grid_(g), walls_(std::move(walls)), dtau_(dtau), hv_(hv),
          explicit_(g, c, hv.scheme == Scheme::high_order ? ExplicitOperator::Order::fourth
                                                          : ExplicitOperator::Order::second) {
        hv_.validate();
        if (!(dtau > 0) || !std::isfinite(dtau)) throw ConfigError("dtau", "must be > 0");
        ops_ = hv.scheme == Scheme::high_order ? assemble_operator_set(g, c, hv.phi, dtau)
                                               : to_operator_set(assemble_second_order(g, c), g, hv.phi, dtau);
        for (Field* f : {&f_u_, &f_y2_, &y0_, &y1_, &y2_, &z0_, &z1_}) *f = Field(g);
    }

    const Grid& grid() const { return grid_; }
    const OperatorSet& operators() const { return ops_; }
    std::size_t factorization_passes() const { return ops_.factorization_passes; }
    double dtau() const { return dtau_; }

    /// Advances one step in place. The walls of state.u must match state.tau.
    void hv_step(SolverState& state) {
        const std::size_t step = state.n + 1;
        const double tau1 = state.tau + dtau_;
        const double low1 = walls_.low(tau1), high1 = walls_.high(tau1);
        const Field& U = state.u;
        const double dt = dtau_;

        explicit_.apply(U, f_u_);
        combine(y0_, U, 1.0, f_u_, dt, nullptr, 0.0);
        finish_stage(y0_, low1, high1, "Y0", step);

        x_solve(y0_, U, low1, high1, y1_);
        finish_stage(y1_, low1, high1, "Y1", step);

        y_solve(y1_, U, y2_);
        finish_stage(y2_, low1, high1, "Y2", step);

        explicit_.apply(y2_, f_y2_);
        combine(z0_, y0_, 1.0, f_y2_, hv_.psi * dt, &f_u_, -hv_.psi * dt);
        finish_stage(z0_, low1, high1, "Z0", step);

        x_solve(z0_, y2_, low1, high1, z1_);
        finish_stage(z1_, low1, high1, "Z1", step);

        y_solve(z1_, y2_, state.u);
        finish_stage(state.u, low1, high1, "Z2", step);

        state.n = step;
        state.tau = tau1;
    }

    SolverState initial_state() const { return {initial_field(grid_, walls_, hv_.smooth_payoff), 0, 0.0}; }

private:
    // out = a + wa * fa (+ wb * fb) on inner nodes.
    void combine(Field& out, const Field& a, double wa, const Field& fa, double wfa, const Field* fb, double wfb) {
        const Grid& g = grid_;
        parallel_for(1, g.N - 1, [&](std::size_t j) {
            const double* pa = a.x_line(j).data();
            const double* pf = fa.x_line(j).data();
            double* po = out.x_line(j).data();
            if (fb) {
                const double* pb = fb->x_line(j).data();
                for (std::size_t i = 1; i + 1 < g.M; ++i) po[i] = wa * pa[i] + (wfa * pf[i] + wfb * pb[i]);
            } else {
                for (std::size_t i = 1; i + 1 < g.M; ++i) po[i] = wa * pa[i] + wfa * pf[i];
            }
        });
    }

    void finish_stage(Field& u, double low, double high, const char* stage, std::size_t step) {
        set_x_walls(u, low, high);
        refresh_y_walls_in_place(u);
        check_finite(u, stage, step);
    }

    void check_finite(const Field& u, const char* stage, std::size_t step) const {
        double sum = 0.0;
        for (double v : u.data()) sum += v;
        if (std::isfinite(sum)) return;
        for (std::size_t j = 0; j < u.N(); ++j)
            for (std::size_t i = 0; i < u.M(); ++i)
                if (!std::isfinite(u(i, j))) throw InstabilityError(stage, step, i, j);
    }

    // (B - pd A) out = B pred - pd A ref along every inner x-line. The walls of
    // pred and out are both the tau_{n+1} values; the wall terms of out are
    // moved to the right-hand side.
    void x_solve(const Field& pred, const Field& ref, double low1, double high1, Field& out) {
        const Grid& g = grid_;
        const double pd = hv_.phi * dtau_;
        parallel_for(1, g.N - 1, [&](std::size_t j) {
            const LineOperator& line = ops_.x_lines[j - 1];
            const double* p = pred.x_line(j).data();
            const double* r = ref.x_line(j).data();
            double* dst = out.x_line(j).data();
            const std::size_t n = line.size();
            for (std::size_t k = 0; k < n; ++k) {
                const std::size_t i = k + 1;
                const TriCoeffs& a = line.a[k];
                const TriCoeffs& b = line.b[k];
                dst[i] = (b.sub * p[i - 1] + b.diag * p[i] + b.sup * p[i + 1]) -
                         pd * (a.sub * r[i - 1] + a.diag * r[i] + a.sup * r[i + 1]);
            }
            dst[1] -= (line.b[0].sub - pd * line.a[0].sub) * low1;
            dst[n] -= (line.b[n - 1].sup - pd * line.a[n - 1].sup) * high1;
            ops_.x_factors[j - 1].solve(std::span<double>(dst + 1, n));
        });
    }

    // (B - pd A) out = B pred - pd A ref along every inner y-line, with the
    // y-wall values of out given by extrapolation of out itself.
    void y_solve(const Field& pred, const Field& ref, Field& out) {
        const Grid& g = grid_;
        const double pd = hv_.phi * dtau_;
        const LineOperator& line = ops_.y_line;
        const std::size_t M = g.M;
        parallel_for(1, g.N - 1, [&](std::size_t j) {
            const TriCoeffs& a = line.a[j - 1];
            const TriCoeffs& b = line.b[j - 1];
            const double* pm = pred.x_line(j - 1).data();
            const double* p0 = pred.x_line(j).data();
            const double* pp = pred.x_line(j + 1).data();
            const double* rm = ref.x_line(j - 1).data();
            const double* r0 = ref.x_line(j).data();
            const double* rp = ref.x_line(j + 1).data();
            double* dst = out.x_line(j).data();
            for (std::size_t i = 1; i + 1 < M; ++i)
                dst[i] = (b.sub * pm[i] + b.diag * p0[i] + b.sup * pp[i]) -
                         pd * (a.sub * rm[i] + a.diag * r0[i] + a.sup * rp[i]);
        });
        double* base = &out(1, 1);
        const std::size_t batch = M - 2;
        const std::size_t workers = std::min<std::size_t>(worker_count(), batch / 32 + 1);
        if (workers <= 1) {
            ops_.y_factor.solve_batch(base, M, batch);
            return;
        }
        const std::size_t chunk = (batch + workers - 1) / workers;
        parallel_for(0, workers, [&](std::size_t w) {
            const std::size_t lo = w * chunk, hi = std::min(batch, lo + chunk);
            if (lo < hi) ops_.y_factor.solve_batch(base + lo, M, hi - lo);
        });
    }

    Grid grid_;
    XWalls walls_;
    double dtau_;
    HVConfig hv_;
    ExplicitOperator explicit_;
    OperatorSet ops_;
    Field f_u_, f_y2_, y0_, y1_, y2_, z0_, z1_;
};

struct Solution {
    Field u;
    Grid grid;
    TimeGrid time;
    RunStats stats;
};

/// Full time loop from the payoff to tau = T with custom coefficients and walls.
inline Solution solve(const Grid& g, const TransformedCoefficients& c, const XWalls& walls, const TimeGrid& tg,
                      const HVConfig& hv, Field initial) {
    using clock = std::chrono::steady_clock;
    Solution sol{std::move(initial), g, tg, {}};
    if (tg.steps() == 0) return sol;
    const auto t0 = clock::now();
    HVStepper stepper(g, c, walls, tg.dtau, hv);
    const auto t1 = clock::now();
    SolverState state{std::move(sol.u), 0, 0.0};
    for (std::size_t k = 0; k < tg.steps(); ++k) stepper.hv_step(state);
    const auto t2 = clock::now();
    sol.u = std::move(state.u);
    sol.stats.factorization_passes = stepper.factorization_passes();
    sol.stats.steps = tg.steps();
    sol.stats.setup_seconds = std::chrono::duration<double>(t1 - t0).count();
    sol.stats.loop_seconds = std::chrono::duration<double>(t2 - t1).count();
    return sol;
}

inline Solution solve(const ModelParams& p, const Grid& g, const TimeGrid& tg, const HVConfig& hv) {
    p.validate();
    const XWalls walls = XWalls::dirichlet(p, g.L1);
    return solve(g, transformed_coefficients(p), walls, tg, hv, initial_field(g, walls, hv.smooth_payoff));
}

/// Transformed solution at tau = T.
inline Field run(const ModelParams& p, const Grid& g, const TimeGrid& tg, const HVConfig& hv) {
    return solve(p, g, tg, hv).u;
}

/// The same time loop with the second-order operators.
inline Field run_baseline(const ModelParams& p, const Grid& g, const TimeGrid& tg, HVConfig hv) {
    hv.scheme = Scheme::second_order_baseline;
    return run(p, g, tg, hv);
}

}  // namespace svadi
