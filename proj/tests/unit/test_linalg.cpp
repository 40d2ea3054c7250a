#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "svadi/linalg.hpp"

using namespace svadi;

namespace {

Tridiagonal random_dominant(std::size_t n, std::mt19937& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Tridiagonal t(n);
    for (std::size_t k = 0; k < n; ++k) {
        t.sub[k] = k > 0 ? d(rng) : 0.0;
        t.sup[k] = k + 1 < n ? d(rng) : 0.0;
        t.diag[k] = (d(rng) > 0 ? 1 : -1) * (2.5 + std::abs(d(rng)));
    }
    return t;
}

oracle::Matrix dense(const Tridiagonal& t) {
    const std::size_t n = t.size();
    oracle::Matrix a(n, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        a[k][k] = t.diag[k];
        if (k > 0) a[k][k - 1] = t.sub[k];
        if (k + 1 < n) a[k][k + 1] = t.sup[k];
    }
    return a;
}

std::vector<double> random_vector(std::size_t n, std::mt19937& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = d(rng);
    return v;
}

}  // namespace

TEST(TriFactor, IdentityLeavesInputUnchanged) {
    Tridiagonal t(5);
    for (double& d : t.diag) d = 1.0;
    const std::vector<double> rhs{1, -2, 3.5, 4, 0.25};
    EXPECT_EQ(tri_solve(tri_factor(t), rhs), rhs);
}

TEST(TriFactor, SmallLaplacian) {
    const std::vector<double> sub{0, 1, 1}, diag{-2, -2, -2}, sup{1, 1, 0};
    const auto x = tri_solve(tri_factor(sub, diag, sup), std::vector<double>{1, 0, 1});
    const auto want = oracle::dense_solve({{-2, 1, 0}, {1, -2, 1}, {0, 1, -2}}, {1, 0, 1});
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(x[k], want[k], 1e-14);
    EXPECT_NEAR(x[0], -1.0, 1e-14);
    EXPECT_NEAR(x[1], -1.0, 1e-14);
}

TEST(TriFactor, ZeroDiagonalIsSingular) {
    Tridiagonal t(4);
    try {
        tri_factor(t, 7, 0.25);
        FAIL() << "expected SingularLineError";
    } catch (const SingularLineError& e) {
        EXPECT_EQ(e.line(), 7u);
        EXPECT_EQ(e.coordinate(), 0.25);
    }
}

TEST(TriFactor, ConsistencyAndZeroRhs) {
    std::mt19937 rng(1);
    const Tridiagonal t = random_dominant(40, rng);
    const auto f = tri_factor(t);
    const auto x = tri_solve(f, tri_apply(t, std::vector<double>(40, 1.0)));
    for (double v : x) EXPECT_NEAR(v, 1.0, 1e-12);
    for (double v : tri_solve(f, std::vector<double>(40, 0.0))) EXPECT_EQ(v, 0.0);
}

TEST(TriFactor, MatchesDenseOracle) {
    std::mt19937 rng(2);
    for (std::size_t n : {1u, 2u, 5u, 33u, 64u}) {
        const Tridiagonal t = random_dominant(n, rng);
        const auto rhs = random_vector(n, rng);
        const auto x = tri_solve(tri_factor(t), rhs);
        const auto want = oracle::dense_solve(dense(t), rhs);
        for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(x[k], want[k], 1e-10) << n;
        std::vector<double> res = oracle::dense_apply(dense(t), x);
        for (std::size_t k = 0; k < n; ++k) res[k] -= rhs[k];
        EXPECT_LE(oracle::max_abs(res), 1e-10 * oracle::max_abs(rhs));
    }
}

TEST(TriFactor, ReconstructReproducesMatrix) {
    std::mt19937 rng(3);
    const Tridiagonal t = random_dominant(25, rng);
    const Tridiagonal r = tri_factor(t).reconstruct();
    for (std::size_t k = 0; k < 25; ++k) {
        EXPECT_NEAR(r.diag[k], t.diag[k], 1e-12 * std::abs(t.diag[k]));
        if (k > 0) {
            EXPECT_NEAR(r.sub[k], t.sub[k], 1e-12 * std::abs(t.diag[k]));
        }
        if (k + 1 < 25) {
            EXPECT_NEAR(r.sup[k], t.sup[k], 1e-12 * std::abs(t.diag[k]));
        }
    }
}

TEST(TriFactor, BatchSolveEqualsSingleSolvesBitwise) {
    std::mt19937 rng(4);
    const std::size_t n = 17, batch = 6, stride = 9;
    const auto f = tri_factor(random_dominant(n, rng));
    std::vector<double> block(n * stride, 0.0);
    std::vector<std::vector<double>> singles(batch);
    for (std::size_t b = 0; b < batch; ++b) {
        singles[b] = random_vector(n, rng);
        for (std::size_t k = 0; k < n; ++k) block[k * stride + b] = singles[b][k];
        f.solve(singles[b]);
    }
    f.solve_batch(block.data(), stride, batch);
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t k = 0; k < n; ++k) EXPECT_EQ(block[k * stride + b], singles[b][k]);
}

TEST(TriApply, ProductsAndMismatch) {
    const std::vector<double> sub{0, 1, 1, 1}, diag{-2, -2, -2, -2}, sup{1, 1, 1, 0};
    const auto y = tri_apply(sub, diag, sup, std::vector<double>(4, 1.0));
    EXPECT_EQ(y, (std::vector<double>{-1, 0, 0, -1}));
    std::mt19937 rng(5);
    const Tridiagonal t = random_dominant(30, rng);
    const auto x = random_vector(30, rng);
    const auto got = tri_apply(t, x);
    const auto want = oracle::dense_apply(dense(t), x);
    for (std::size_t k = 0; k < 30; ++k) EXPECT_NEAR(got[k], want[k], 1e-13);
    EXPECT_THROW(tri_apply(sub, diag, sup, std::vector<double>(3, 1.0)), DimensionError);
    EXPECT_THROW(tri_solve(tri_factor(t), std::vector<double>(3, 1.0)), DimensionError);
}

TEST(BorderedFactor, MatchesDenseOracle) {
    std::mt19937 rng(6);
    for (std::size_t n : {5u, 6u, 12u, 40u}) {
        BorderedTridiagonal m;
        m.base = random_dominant(n, rng);
        m.head = {0.3, -0.6, 0.6, -0.3, 0.06};
        m.tail = {-0.2, 0.4, -0.4, 0.2, -0.04};
        oracle::Matrix a = dense(m.base);
        for (std::size_t k = 0; k < 5; ++k) {
            a[0][k] += m.head[k];
            a[n - 1][n - 1 - k] += m.tail[k];
        }
        const auto rhs = random_vector(n, rng);
        std::vector<double> x = rhs;
        bordered_factor(m).solve(x);
        const auto want = oracle::dense_solve(a, rhs);
        for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(x[k], want[k], 1e-12) << n;
        const auto back = m.apply(x);
        for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(back[k], rhs[k], 1e-12);
    }
    BorderedTridiagonal tiny;
    tiny.base = Tridiagonal(4);
    EXPECT_THROW(bordered_factor(tiny), DimensionError);
}
