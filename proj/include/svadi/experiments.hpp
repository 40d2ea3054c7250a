#pragma once

// Convergence and stability studies against a fine-mesh reference solution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "svadi/errors.hpp"
#include "svadi/grid.hpp"
#include "svadi/model.hpp"
#include "svadi/timestepper.hpp"

namespace svadi {

struct ErrorNorms {
    double l2 = 0.0;
    double linf = 0.0;
    double ref_l2 = 0.0;  // l2 norm of the reference over the same nodes
};

/// Errors of `u` on grid `g` against `ref` on grid `fine`, where every node of
/// g is a node of fine (injection, no interpolation). Inner nodes only.
inline ErrorNorms injected_errors(const Field& u, const Grid& g, const Field& ref, const Grid& fine) {
    const double fx = g.dx / fine.dx, fy = g.dy / fine.dy;
    const auto sx = static_cast<std::size_t>(std::llround(fx)), sy = static_cast<std::size_t>(std::llround(fy));
    const auto ox = std::llround((g.L1 - fine.L1) / fine.dx), oy = std::llround((g.L2 - fine.L2) / fine.dy);
    if (std::abs(fx - static_cast<double>(sx)) > 1e-9 * fx || std::abs(fy - static_cast<double>(sy)) > 1e-9 * fy ||
        std::abs(g.L1 - (fine.L1 + static_cast<double>(ox) * fine.dx)) > 1e-9 ||
        std::abs(g.L2 - (fine.L2 + static_cast<double>(oy) * fine.dy)) > 1e-9 || ox < 0 || oy < 0 ||
        static_cast<std::size_t>(ox) + (g.M - 1) * sx >= fine.M || static_cast<std::size_t>(oy) + (g.N - 1) * sy >= fine.N)
        throw DimensionError("grids are not nested");
    ErrorNorms e;
    double s2 = 0.0, r2 = 0.0;
    for (std::size_t j = 1; j + 1 < g.N; ++j) {
        const std::size_t jf = static_cast<std::size_t>(oy) + j * sy;
        for (std::size_t i = 1; i + 1 < g.M; ++i) {
            const double r = ref(static_cast<std::size_t>(ox) + i * sx, jf);
            const double d = u(i, j) - r;
            s2 += d * d;
            r2 += r * r;
            e.linf = std::max(e.linf, std::abs(d));
        }
    }
    e.l2 = std::sqrt(s2 * g.dx * g.dy);
    e.ref_l2 = std::sqrt(r2 * g.dx * g.dy);
    return e;
}

/// Least-squares slope m of ln e = ln C + m ln h over points with e > 0.
/// NaN with fewer than two usable points.
inline double fitted_order(std::span<const double> h, std::span<const double> e) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < h.size() && k < e.size(); ++k) {
        if (!(e[k] > 0) || !std::isfinite(e[k]) || !(h[k] > 0)) continue;
        const double x = std::log(h[k]), y = std::log(e[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double nn = static_cast<double>(n);
    const double den = nn * sxx - sx * sx;
    if (den == 0) return std::numeric_limits<double>::quiet_NaN();
    return (nn * sxy - sx * sy) / den;
}

struct StudyOptions {
    Bounds bounds{};
    double phi = 0.5;
    double psi = 0.5;
    bool smooth_payoff = true;
};

struct ReportRow {
    double h = 0.0;
    double eps_l2 = std::numeric_limits<double>::quiet_NaN();
    double eps_linf = std::numeric_limits<double>::quiet_NaN();
    double order_l2 = std::numeric_limits<double>::quiet_NaN();    // against the previous (coarser) row
    double order_linf = std::numeric_limits<double>::quiet_NaN();
    bool unstable = false;
    std::string message;
};

struct ExperimentReport {
    Scheme scheme = Scheme::high_order;
    double rho = 0.0;
    double gamma = 0.0;
    double h_ref = 0.0;
    std::size_t ref_M = 0, ref_N = 0, ref_steps = 0;
    std::vector<ReportRow> rows;  // decreasing h
    double fitted_l2 = std::numeric_limits<double>::quiet_NaN();
    double fitted_linf = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline HVConfig make_hv(Scheme scheme, const StudyOptions& opt) {
    HVConfig hv;
    hv.scheme = scheme;
    hv.phi = opt.phi;
    hv.psi = opt.psi;
    hv.smooth_payoff = opt.smooth_payoff;
    return hv;
}

inline void fill_orders(ExperimentReport& r) {
    std::vector<double> h, e2, ei;
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
        auto& row = r.rows[k];
        if (k > 0 && !row.unstable && !r.rows[k - 1].unstable) {
            const auto& prev = r.rows[k - 1];
            const double ratio = std::log(prev.h / row.h);
            row.order_l2 = std::log(prev.eps_l2 / row.eps_l2) / ratio;
            row.order_linf = std::log(prev.eps_linf / row.eps_linf) / ratio;
        }
        if (!row.unstable) {
            h.push_back(row.h);
            e2.push_back(row.eps_l2);
            ei.push_back(row.eps_linf);
        }
    }
    r.fitted_l2 = fitted_order(h, e2);
    r.fitted_linf = fitted_order(h, ei);
}

inline std::vector<double> sorted_descending(std::span<const double> hs) {
    std::vector<double> v(hs.begin(), hs.end());
    std::sort(v.begin(), v.end(), std::greater<>());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace detail

/// Spatial convergence at fixed gamma: one reference run at h_ref, one run
/// per h in h_list on nested meshes, errors by injection over inner nodes.
/// A run that goes unstable is flagged in its row; the study continues.
inline ExperimentReport convergence_study(const ModelParams& p, Scheme scheme, double gamma,
                                          std::span<const double> h_list, double h_ref,
                                          const StudyOptions& opt = {}) {
    p.validate();
    if (h_list.empty()) throw ConfigError("h_list", "must not be empty");
    const std::vector<double> hs = detail::sorted_descending(h_list);
    if (!(h_ref > 0) || !(h_ref < hs.back() / 2 * (1 + 1e-12)))
        throw ConfigError("h_ref", "must be at most half the smallest h");
    std::vector<double> levels = hs;
    levels.push_back(h_ref);
    const std::vector<Grid> grids = build_nested_grids(opt.bounds, levels);
    const HVConfig hv = detail::make_hv(scheme, opt);

    ExperimentReport report;
    report.scheme = scheme;
    report.rho = p.rho;
    report.gamma = gamma;
    report.h_ref = h_ref;
    const Grid& fine = grids.back();
    const TimeGrid tref = build_time_grid(p.maturity, gamma, h_ref);
    report.ref_M = fine.M;
    report.ref_N = fine.N;
    report.ref_steps = tref.steps();
    const Field ref = run(p, fine, tref, hv);

    for (std::size_t k = 0; k < hs.size(); ++k) {
        ReportRow row;
        row.h = hs[k];
        try {
            const Field u = run(p, grids[k], build_time_grid(p.maturity, gamma, hs[k]), hv);
            const ErrorNorms e = injected_errors(u, grids[k], ref, fine);
            row.eps_l2 = e.l2;
            row.eps_linf = e.linf;
        } catch (const InstabilityError& ex) {
            row.unstable = true;
            row.message = ex.what();
        }
        report.rows.push_back(row);
    }
    detail::fill_orders(report);
    return report;
}

/// Sign changes of du/dx that push a node more than `tol` outside the range
/// spanned by the two x-wall values of its line and that line of `initial`.
/// A smoothed payoff may already undershoot near the strike, and that
/// undershoot is not new.
inline bool has_spurious_extremum(const Field& u, const Field& initial, double tol = 1e-6) {
    if (initial.M() != u.M() || initial.N() != u.N()) throw DimensionError("initial field shape mismatch");
    for (std::size_t j = 1; j + 1 < u.N(); ++j) {
        double lo = std::min(u(0, j), u(u.M() - 1, j)), hi = std::max(u(0, j), u(u.M() - 1, j));
        if (&initial != &u)
            for (std::size_t i = 0; i < u.M(); ++i) {
                lo = std::min(lo, initial(i, j));
                hi = std::max(hi, initial(i, j));
            }
        for (std::size_t i = 1; i + 1 < u.M(); ++i) {
            const double a = u(i - 1, j), b = u(i, j), c = u(i + 1, j);
            const bool local_max = b > a && b > c, local_min = b < a && b < c;
            if ((local_max && b > hi + tol) || (local_min && b < lo - tol)) return true;
        }
    }
    return false;
}

/// The same check against the wall values alone.
inline bool has_spurious_extremum(const Field& u, double tol = 1e-6) { return has_spurious_extremum(u, u, tol); }

struct StabilityCell {
    double gamma = 0.0;
    double h = 0.0;
    double rel_eps_l2 = std::numeric_limits<double>::quiet_NaN();
    bool non_finite = false;
    bool oscillation = false;
    bool unstable() const { return non_finite || oscillation; }
};

struct StabilityGrid {
    double rho = 0.0;
    Scheme scheme = Scheme::high_order;
    std::vector<double> gammas;
    std::vector<double> hs;         // decreasing
    std::vector<StabilityCell> cells;  // gamma-major: cells[g * hs.size() + k]

    const StabilityCell& at(std::size_t g, std::size_t k) const { return cells[g * hs.size() + k]; }
};

/// One solve per (gamma, h) on nested meshes, compared against a single
/// reference at half the smallest h with gamma = 1/2. Errors are relative to
/// the l2 norm of the reference over the same nodes.
inline StabilityGrid stability_sweep(const ModelParams& p, Scheme scheme, std::span<const double> gamma_list,
                                     std::span<const double> h_list, const StudyOptions& opt = {}) {
    p.validate();
    if (h_list.empty()) throw ConfigError("h_list", "must not be empty");
    for (double g : gamma_list)
        if (!(g > 0 && g <= 1)) throw ConfigError("gamma_list", "entries must lie in (0, 1]");
    StabilityGrid out;
    out.rho = p.rho;
    out.scheme = scheme;
    out.gammas.assign(gamma_list.begin(), gamma_list.end());
    out.hs = detail::sorted_descending(h_list);
    if (out.gammas.empty()) return out;

    const double h_ref = out.hs.back() / 2;
    std::vector<double> levels = out.hs;
    levels.push_back(h_ref);
    const std::vector<Grid> grids = build_nested_grids(opt.bounds, levels);
    const HVConfig hv = detail::make_hv(scheme, opt);
    const Grid& fine = grids.back();
    const Field ref = run(p, fine, build_time_grid(p.maturity, 0.5, h_ref), hv);

    for (double gamma : out.gammas) {
        for (std::size_t k = 0; k < out.hs.size(); ++k) {
            StabilityCell cell;
            cell.gamma = gamma;
            cell.h = out.hs[k];
            try {
                const Field u = run(p, grids[k], build_time_grid(p.maturity, gamma, out.hs[k]), hv);
                const ErrorNorms e = injected_errors(u, grids[k], ref, fine);
                cell.rel_eps_l2 = e.l2 / e.ref_l2;
                const Field u0 = initial_field(grids[k], XWalls::dirichlet(p, grids[k].L1), hv.smooth_payoff);
                cell.oscillation = has_spurious_extremum(u, u0);
            } catch (const InstabilityError&) {
                cell.non_finite = true;
            }
            out.cells.push_back(cell);
        }
    }
    return out;
}

struct GammaOrderRow {
    Scheme scheme;
    double gamma;
    double order_l2;
    double order_linf;
};

/// Fitted orders per scheme and gamma.
inline std::vector<GammaOrderRow> gamma_order_table(const ModelParams& p, std::span<const double> gamma_list,
                                                    std::span<const double> h_list, double h_ref,
                                                    std::span<const Scheme> schemes, const StudyOptions& opt = {}) {
    std::vector<GammaOrderRow> out;
    for (Scheme s : schemes)
        for (double g : gamma_list) {
            const ExperimentReport r = convergence_study(p, s, g, h_list, h_ref, opt);
            out.push_back({s, g, r.fitted_l2, r.fitted_linf});
        }
    return out;
}

}  // namespace svadi
