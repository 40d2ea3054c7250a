#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "svadi/grid.hpp"
#include "svadi/model.hpp"

using namespace svadi;

TEST(Coefficients, MatchIndependentFormulasForEveryVariant) {
    for (auto m : all_variants) {
        ModelParams p;
        p.with_variant(m);
        p.lambda0 = 0.3;
        const auto tc = transformed_coefficients(p);
        for (double y : {0.1, 0.7, 1.0, 2.5, 5.0}) {
            const auto want = oracle::coefficients(y, p.r, p.v, p.kappa(), p.theta(), p.rho, p.alpha, p.beta);
            const auto got = tc.sample(y);
            EXPECT_NEAR(got.c_xx, want.c_xx, 1e-14 * std::abs(want.c_xx) + 1e-15) << variant_name(m);
            EXPECT_NEAR(got.c_yy, want.c_yy, 1e-14 * std::abs(want.c_yy) + 1e-15) << variant_name(m);
            EXPECT_NEAR(got.c_xy, want.c_xy, 1e-14 * std::abs(want.c_xy) + 1e-15) << variant_name(m);
            EXPECT_NEAR(got.c_x, want.c_x, 1e-14 * std::abs(want.c_x) + 1e-15) << variant_name(m);
            EXPECT_NEAR(got.c_y, want.c_y, 1e-13 * std::abs(want.c_y) + 1e-14) << variant_name(m);
        }
    }
}

TEST(Coefficients, DerivativesAgreeWithFiniteDifferences) {
    for (auto m : all_variants) {
        ModelParams p;
        p.with_variant(m);
        const auto tc = transformed_coefficients(p);
        const double e = 1e-4;
        for (double y : {0.4, 1.0, 3.0}) {
            const auto s = tc.sample(y);
            const double yy_m = tc.c_yy(y - e), yy_p = tc.c_yy(y + e), cy_m = tc.c_y(y - e), cy_p = tc.c_y(y + e);
            EXPECT_NEAR(s.c_yy_d1, (yy_p - yy_m) / (2 * e), 1e-6) << variant_name(m);
            EXPECT_NEAR(s.c_yy_d2, (yy_p - 2 * s.c_yy + yy_m) / (e * e), 1e-5) << variant_name(m);
            EXPECT_NEAR(s.c_y_d1, (cy_p - cy_m) / (2 * e), 1e-6 * std::max(1.0, std::abs(s.c_y_d1))) << variant_name(m);
            EXPECT_NEAR(s.c_y_d2, (cy_p - 2 * s.c_y + cy_m) / (e * e), 1e-4 * std::max(1.0, std::abs(s.c_y_d2)))
                << variant_name(m);
        }
    }
}

TEST(Coefficients, MeanReversionDriftVanishesAtLongRunMean) {
    const ModelParams p;
    EXPECT_NEAR(transformed_coefficients(p).c_y(p.theta() / p.v), 0.0, 1e-15);
}

TEST(Coefficients, ZeroCorrelationRemovesMixedTerm) {
    ModelParams p;
    p.rho = 0.0;
    for (double y : {0.2, 1.0, 4.0}) EXPECT_EQ(transformed_coefficients(p).c_xy(y), 0.0);
}

TEST(Coefficients, RejectNonPositiveY) {
    const auto tc = transformed_coefficients(ModelParams{});
    EXPECT_THROW(tc.sample(0.0), DomainError);
    EXPECT_THROW(tc.sample(-1.0), DomainError);
}

TEST(Coefficients, ZeroVolOfVolIsRejectedByTheTransform) {
    ModelParams p;
    p.v = 0.0;
    EXPECT_NO_THROW(p.validate());
    EXPECT_THROW(transformed_coefficients(p), ConfigError);
}

TEST(ModelParams, RiskPremiumFoldsIntoKappaTheta) {
    ModelParams p;
    p.lambda0 = 0.5;
    EXPECT_DOUBLE_EQ(p.kappa(), 2.5);
    EXPECT_DOUBLE_EQ(p.kappa() * p.theta(), p.kappa_tilde * p.theta_tilde);
}

TEST(ModelParams, ValidationNamesTheField) {
    auto field_of = [](ModelParams p) {
        try {
            p.validate();
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string();
    };
    ModelParams p;
    p.rho = 1.5;
    EXPECT_EQ(field_of(p), "rho");
    p = ModelParams{};
    p.strike = 0;
    EXPECT_EQ(field_of(p), "strike");
    p = ModelParams{};
    p.maturity = -1;
    EXPECT_EQ(field_of(p), "maturity");
    p = ModelParams{};
    p.v = std::nan("");
    EXPECT_EQ(field_of(p), "vol_of_vol");
    EXPECT_EQ(field_of(ModelParams{}), "");
}

TEST(Payoff, KinkAndRoundTrip) {
    EXPECT_EQ(initial_condition(0.0), 0.0);
    EXPECT_EQ(initial_condition(1.0), 0.0);
    const ModelParams p;
    const Grid g = build_grid(Bounds{}, 0.25);
    Field u(g);
    for (std::size_t j = 0; j < g.N; ++j)
        for (std::size_t i = 0; i < g.M; ++i) u(i, j) = initial_condition(g.x(i));
    for (const PricePoint& pt : inverse_transform(u, g, p, 0.0))
        EXPECT_NEAR(pt.V, std::max(p.strike - pt.S, 0.0), 1e-12 * p.strike);
}

namespace {
double simpson(double (*f)(double, int), int power, double a, double b, int n = 6000) {
    const double h = (b - a) / n;
    double s = f(a, power) + f(b, power);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h, power);
    return s * h / 3.0;
}
double kernel_moment(double t, int power) { return smoothing_kernel(t) * std::pow(t, power); }
}  // namespace

TEST(Payoff, SmoothingKernelReproducesCubics) {
    EXPECT_NEAR(simpson(kernel_moment, 0, -3, 3), 1.0, 1e-12);
    for (int k = 1; k <= 3; ++k) EXPECT_NEAR(simpson(kernel_moment, k, -3, 3), 0.0, 1e-12) << k;
    EXPECT_GT(std::abs(simpson(kernel_moment, 4, -3, 3)), 1e-3);
}

TEST(Payoff, SmoothedPayoffAwayFromKinkIsFourthOrderClose) {
    // Away from the kink the payoff is smooth, so kernel averaging is O(h^4).
    const double x = -0.5;
    const double e1 = std::abs(smoothed_initial_condition(x, 0.04) - initial_condition(x));
    const double e2 = std::abs(smoothed_initial_condition(x, 0.02) - initial_condition(x));
    EXPECT_GT(std::log2(e1 / e2), 3.7);
    EXPECT_LT(e1, 1e-6);
    EXPECT_NEAR(smoothed_initial_condition(0.3, 0.05), 0.0, 1e-15);
}

TEST(Walls, DirichletValues) {
    const ModelParams p;
    EXPECT_DOUBLE_EQ(dirichlet_x(Side::low, 0.5, p, -5.0), 1.0 - std::exp(0.05 * 0.5 - 5.0));
    EXPECT_EQ(dirichlet_x(Side::high, 0.5, p, -5.0), 0.0);
}

TEST(Grid, StrikeNeverOnMeshAndBoundsReproduced) {
    for (double h : {0.4, 0.2, 0.1, 0.05, 0.3, 0.125}) {
        const Grid g = build_grid(Bounds{}, h);
        EXPECT_LE(g.dx, h * (1 + 1e-12));
        EXPECT_LE(g.dy, h * (1 + 1e-12));
        for (std::size_t i = 0; i < g.M; ++i) EXPECT_GT(std::abs(g.x(i)), 1e-9) << h;
        EXPECT_NEAR(g.x(g.M - 1), g.K1, 1e-12);
        EXPECT_NEAR(g.y(g.N - 1), g.K2, 1e-12);
        EXPECT_EQ(g.y(0), g.L2);
        EXPECT_NEAR(g.K1 - g.L1, 10.0, 1e-12);
    }
}

TEST(Grid, TooCoarseIsRejected) {
    EXPECT_THROW(build_grid(Bounds{-1, 1, 0.1, 1}, 0.5), ConfigError);
    EXPECT_THROW(build_grid(Bounds{1, -1, 0.1, 1}, 0.1), ConfigError);
    EXPECT_THROW(build_grid(Bounds{-1, 1, 0.0, 1}, 0.1), ConfigError);
}

TEST(Grid, NestedGridsShareNodesBitwise) {
    const std::vector<double> hs{0.4, 0.2, 0.1, 0.05};
    const auto grids = build_nested_grids(Bounds{}, hs);
    ASSERT_EQ(grids.size(), 4u);
    const Grid& fine = grids.back();
    for (std::size_t k = 0; k < grids.size(); ++k) {
        const Grid& g = grids[k];
        EXPECT_NEAR(g.dx, hs[k], 1e-12);
        EXPECT_NEAR(g.dy, hs[k], 1e-12);
        const std::size_t f = std::size_t(1) << (3 - k);
        EXPECT_EQ((g.M - 1) * f, fine.M - 1);
        for (std::size_t i = 0; i < g.M; ++i) EXPECT_NEAR(g.x(i), fine.x(i * f), 1e-12);
        for (std::size_t i = 0; i < fine.M; ++i) EXPECT_GT(std::abs(fine.x(i)), 1e-9);
    }
    EXPECT_THROW(build_nested_grids(Bounds{}, std::vector<double>{0.4, 0.3}), ConfigError);
}

TEST(TimeGrid, AdjustsStepToCoverMaturity) {
    const TimeGrid t = build_time_grid(0.5, 0.5, 0.3);
    EXPECT_NEAR(t.dtau * static_cast<double>(t.steps()), 0.5, 1e-15);
    EXPECT_LE(t.dtau, 0.5 * 0.09 * (1 + 1e-12));
    EXPECT_NEAR(t.gamma, t.dtau / 0.09, 1e-15);
    EXPECT_EQ(time_grid_with_steps(0.5, 0, 0.1).steps(), 0u);
    EXPECT_THROW(build_time_grid(0.5, 0.0, 0.1), ConfigError);
}

TEST(InnerIndexMap, BothNumberingsAreBijections) {
    const Grid g = build_grid(Bounds{-1, 1, 0.1, 1.5}, 0.2);
    InnerIndexMap map(g);
    std::set<std::size_t> xs, ys;
    for (std::size_t j = 1; j + 1 < g.N; ++j)
        for (std::size_t i = 1; i + 1 < g.M; ++i) {
            const auto kx = map.x_major(i, j), ky = map.y_major(i, j);
            xs.insert(kx);
            ys.insert(ky);
            EXPECT_EQ(map.from_x_major(kx), (InnerIndexMap::Node{i, j}));
            EXPECT_EQ(map.from_y_major(ky), (InnerIndexMap::Node{i, j}));
        }
    EXPECT_EQ(xs.size(), map.size());
    EXPECT_EQ(ys.size(), map.size());
    EXPECT_EQ(*xs.rbegin(), map.size() - 1);
    EXPECT_EQ(map.x_major(1, 1), 0u);
}
