#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "measurements.hpp"
#include "oracles.hpp"
#include "svadi/svadi.hpp"

using namespace svadi;

TEST(HocXLine, UnitDiffusionExample) {
    // r = 0, v y = 1, dx = 1: c_xx = 1/2, c_x = -1/2.
    ModelParams p;
    p.r = 0.0;
    const Grid g = measure::rectangle(0.0, 8.0, 4.0, 16.0, 1.0);
    ASSERT_DOUBLE_EQ(g.y(6), 10.0);
    const auto line = assemble_x_line(g, transformed_coefficients(p), 6);
    EXPECT_NEAR(line.a[0].sub, 19.0 / 24, 1e-15);
    EXPECT_NEAR(line.a[0].diag, -13.0 / 12, 1e-15);
    EXPECT_NEAR(line.a[0].sup, 7.0 / 24, 1e-15);
    EXPECT_DOUBLE_EQ(line.b[0].diag, 5.0 / 6);
}

TEST(HocXLine, ReducesToCentralSecondDifferenceAsDxVanishes) {
    ModelParams p;
    p.r = 0.0;
    const double y = 1.0, a = p.v * y / 2;
    for (double h : {1e-2, 1e-3}) {
        const Grid g = measure::rectangle(-0.5, 0.5, 0.5, 1.5, h);
        const auto line = assemble_x_line(g, transformed_coefficients(p), g.nearest_y(y));
        EXPECT_NEAR(line.a[3].sub * h * h, a, 2 * h * a);
        EXPECT_NEAR(line.a[3].diag * h * h, -2 * a, 2 * h * h * a);
        EXPECT_NEAR(line.a[3].sup * h * h, a, 2 * h * a);
    }
}

TEST(HocXLine, AsymmetryIsFirstOrderInDx) {
    ModelParams p;
    p.r = 0.0;
    auto skew = [&](double h) {
        const Grid g = measure::rectangle(-0.5, 0.5, 0.5, 1.5, h);
        const auto line = assemble_x_line(g, transformed_coefficients(p), g.nearest_y(1.0));
        const double a = line.a[2].sub, c = line.a[2].sup;
        return std::abs(a - c) / (0.5 * (a + c));
    };
    EXPECT_NEAR(skew(0.02) / skew(0.01), 2.0, 0.01);
}

TEST(HocLines, RowSumsOverParameterSweep) {
    const auto rep = measure::row_sums();
    EXPECT_GT(rep.lines, 1000u);
    EXPECT_LE(rep.a, 1e-12);
    EXPECT_LE(rep.b, 1e-12);
}

TEST(HocLines, YLineCentreWeightAndZeroOperator) {
    const Grid g = measure::rectangle(-1, 1, 0.5, 1.5, 0.1);
    const auto y = assemble_y_line(g, transformed_coefficients(ModelParams{}), 3);
    for (const auto& b : y.b) EXPECT_DOUBLE_EQ(b.diag, 5.0 / 6);
    const auto z = assemble_x_line(g, TransformedCoefficients::zero(), 2);
    EXPECT_EQ(z.a[0], (TriCoeffs{0, 0, 0}));
    EXPECT_EQ(z.b[0], (TriCoeffs{0, 1, 0}));
}

TEST(HocLines, DegenerateYIsRejected) {
    const Grid g = measure::rectangle(-1, 1, -0.5, 0.5, 0.1);
    EXPECT_THROW(assemble_y_line(g, transformed_coefficients(ModelParams{}), 1), DomainError);
}

class Truncation : public ::testing::TestWithParam<ModelVariant> {};

TEST_P(Truncation, XLineResidualIsFourthOrder) {
    ModelParams p;
    p.with_variant(GetParam());
    EXPECT_GE(measure::refinement_slope([&](double h) { return measure::hoc_x_residual(p, h); }), 3.5);
}

TEST_P(Truncation, YLineResidualIsFourthOrder) {
    ModelParams p;
    p.with_variant(GetParam());
    EXPECT_GE(measure::refinement_slope([&](double h) { return measure::hoc_y_residual(p, h); }), 3.5);
}

INSTANTIATE_TEST_SUITE_P(AllVariants, Truncation, ::testing::ValuesIn(all_variants),
                         [](const auto& info) { return std::to_string(static_cast<int>(info.param)); });

TEST(BoundaryVector, NonzeroOnlyNextToWalls) {
    const ModelParams p;
    const Grid g = measure::rectangle(-5.0, 1.0, 0.5, 1.5, 0.125);
    const auto tc = transformed_coefficients(p);
    const auto d = assemble_boundary_vector(g, tc, 0.0, p);
    const auto flat = d.dense(g);
    InnerIndexMap map(g);
    for (std::size_t j = 1; j + 1 < g.N; ++j) {
        const auto line = assemble_x_line(g, tc, j);
        EXPECT_NEAR(d.low[j - 1], -line.a[0].sub * (1.0 - std::exp(g.L1)), 1e-15);
        EXPECT_EQ(d.high[j - 1], 0.0);
        for (std::size_t i = 2; i + 2 < g.M; ++i) EXPECT_EQ(flat[map.x_major(i, j)], 0.0);
    }
}

TEST(BoundaryVector, GWallTermsAndSizeChecks) {
    const Grid g = measure::rectangle(-1.0, 1.0, 0.5, 1.5, 0.125);
    const auto tc = transformed_coefficients(ModelParams{});
    std::vector<LineOperator> lines;
    for (std::size_t j = 1; j + 1 < g.N; ++j) lines.push_back(assemble_x_line(g, tc, j));
    const std::size_t n = lines.size();
    const std::vector<double> ul(n, 0.5), uh(n, 0.1), gl(n, 2.0), gh(n, -1.0);
    const auto d = assemble_boundary_vector(lines, ul, uh, gl, gh);
    const auto& l = lines[0];
    EXPECT_NEAR(d.low[0], l.b[0].sub * 2.0 - l.a[0].sub * 0.5, 1e-14);
    EXPECT_NEAR(d.high[0], l.b.back().sup * -1.0 - l.a.back().sup * 0.1, 1e-14);
    EXPECT_THROW(assemble_boundary_vector(lines, std::vector<double>(n - 1), uh, gl, gh), DimensionError);
}

namespace {

// Dense (B - pd A) for one x-line, inner unknowns only.
oracle::Matrix dense_x(const LineOperator& line, double pd) {
    const std::size_t n = line.size();
    oracle::Matrix m(n, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        m[k][k] = line.b[k].diag - pd * line.a[k].diag;
        if (k > 0) m[k][k - 1] = line.b[k].sub - pd * line.a[k].sub;
        if (k + 1 < n) m[k][k + 1] = line.b[k].sup - pd * line.a[k].sup;
    }
    return m;
}

// Dense (B - pd A) over the full y-line j = 0..N-1, then eliminate the two
// wall unknowns by substituting u_0 = 5u_1 - 10u_2 + 10u_3 - 5u_4 + u_5
// (and its mirror image).
oracle::Matrix dense_y(const LineOperator& line, double pd) {
    const std::size_t n = line.size();
    oracle::Matrix full(n, std::vector<double>(n + 2, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        full[k][k] = line.b[k].sub - pd * line.a[k].sub;
        full[k][k + 1] = line.b[k].diag - pd * line.a[k].diag;
        full[k][k + 2] = line.b[k].sup - pd * line.a[k].sup;
    }
    const double w[5] = {5, -10, 10, -5, 1};
    oracle::Matrix m(n, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t c = 0; c < n; ++c) m[k][c] = full[k][c + 1];
        for (std::size_t q = 0; q < 5; ++q) {
            m[k][q] += full[k][0] * w[q];
            m[k][n - 1 - q] += full[k][n + 1] * w[q];
        }
    }
    return m;
}

}  // namespace

TEST(OperatorSet, FactoredSolvesMatchDenseOracle) {
    const ModelParams p;
    const Grid g = measure::rectangle(-0.6, 0.6, 0.7, 1.3, 0.1);
    ASSERT_EQ(g.M, 13u);
    ASSERT_EQ(g.N, 7u);
    const double dtau = 0.05;
    const auto ops = assemble_operator_set(g, transformed_coefficients(p), 0.5, dtau);
    EXPECT_EQ(ops.factorization_passes, 2u);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> d(-1, 1);
    for (std::size_t j = 1; j + 1 < g.N; ++j) {
        std::vector<double> rhs(g.M - 2);
        for (double& x : rhs) x = d(rng);
        auto got = rhs;
        ops.x_factors[j - 1].solve(got);
        const auto want = oracle::dense_solve(dense_x(ops.x_lines[j - 1], 0.5 * dtau), rhs);
        for (std::size_t k = 0; k < rhs.size(); ++k)
            EXPECT_NEAR(got[k], want[k], 1e-12 * std::max(1.0, oracle::max_abs(want)));
    }
    std::vector<double> rhs(g.N - 2);
    for (double& x : rhs) x = d(rng);
    auto got = rhs;
    ops.y_factor.solve(got);
    const auto want = oracle::dense_solve(dense_y(ops.y_line, 0.5 * dtau), rhs);
    for (std::size_t k = 0; k < rhs.size(); ++k) EXPECT_NEAR(got[k], want[k], 1e-12 * std::max(1.0, oracle::max_abs(want)));
}

TEST(OperatorSet, ZeroStepFactorsB) {
    const Grid g = measure::rectangle(-1, 1, 0.5, 1.5, 0.1);
    const auto ops = assemble_operator_set(g, transformed_coefficients(ModelParams{}), 0.5, 0.0);
    std::vector<double> x(g.M - 2);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::sin(0.3 * static_cast<double>(k));
    const auto& line = ops.x_lines[4];
    Tridiagonal b(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        b.sub[k] = line.b[k].sub;
        b.diag[k] = line.b[k].diag;
        b.sup[k] = line.b[k].sup;
    }
    auto bx = tri_apply(b, x);
    ops.x_factors[4].solve(bx);
    for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(bx[k], x[k], 1e-14);
}
