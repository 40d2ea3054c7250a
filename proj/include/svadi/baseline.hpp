#pragma once

// Standard second-order central differences for the same ADI loop: plain
// implicit lines (B = I) and an explicit 3x3 stencil. The time loop itself
// is shared with the high-order scheme (see timestepper.hpp, run_baseline).

#include <array>
#include <cstddef>
#include <vector>

#include "svadi/grid.hpp"
#include "svadi/implicit_hoc.hpp"
#include "svadi/model.hpp"

namespace svadi {

/// c_xx d2 + c_x d0 as a (sub, diag, sup) triple with identity B.
inline LinePair second_order_line_coefficients(double a, double b, double h) {
    return {{a / (h * h) - b / (2 * h), -2 * a / (h * h), a / (h * h) + b / (2 * h)}, {0.0, 1.0, 0.0}};
}

struct SecondOrderOperatorSet {
    std::vector<LineOperator> x_lines;  // x_lines[j-1]
    LineOperator y_line;
    /// Cross-stencil weights w[p+1][q+1] for u(i+p, j+q), to be scaled by
    /// c_xy(y_j) / (dx dy).
    std::array<std::array<double, 3>, 3> cross{{{0.25, 0.0, -0.25}, {0.0, 0.0, 0.0}, {-0.25, 0.0, 0.25}}};
};

inline SecondOrderOperatorSet assemble_second_order(const Grid& g, const TransformedCoefficients& c) {
    require_line_grid(g);
    SecondOrderOperatorSet s;
    for (std::size_t j = 1; j + 1 < g.N; ++j) {
        const auto cs = c.sample(g.y(j));
        const LinePair pair = second_order_line_coefficients(cs.c_xx, cs.c_x, g.dx);
        s.x_lines.push_back({LineOrientation::x_line, j, std::vector<TriCoeffs>(g.M - 2, pair.a),
                             std::vector<TriCoeffs>(g.M - 2, pair.b)});
    }
    s.y_line = {LineOrientation::y_line, 1, {}, {}};
    for (std::size_t j = 1; j + 1 < g.N; ++j) {
        const auto cs = c.sample(g.y(j));
        const LinePair pair = second_order_line_coefficients(cs.c_yy, cs.c_y, g.dy);
        s.y_line.a.push_back(pair.a);
        s.y_line.b.push_back(pair.b);
    }
    return s;
}

inline OperatorSet to_operator_set(SecondOrderOperatorSet s, const Grid& g, double phi, double dtau) {
    OperatorSet ops;
    ops.order = SpatialOrder::second;
    ops.phi = phi;
    ops.dtau = dtau;
    ops.x_lines = std::move(s.x_lines);
    ops.y_line = std::move(s.y_line);
    factorize(ops, g);
    return ops;
}

}  // namespace svadi
