#include <plcseg/linalg.hpp>
#include <plcseg/random.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace plcseg;

TEST(Linalg, DiagonalMatrix)
{
    const auto e = eigen_symmetric({{{1, 0, 0}, {0, 3, 0}, {0, 0, 2}}});
    EXPECT_DOUBLE_EQ(e.values[0], 3);
    EXPECT_DOUBLE_EQ(e.values[1], 2);
    EXPECT_DOUBLE_EQ(e.values[2], 1);
    EXPECT_NEAR(std::abs(e.vectors[0][1]), 1.0, 1e-15);
}

TEST(Linalg, EigenpairsSatisfyDefinition)
{
    random_source rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        mat3 a{};
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j)
                a[i][j] = a[j][i] = rng.uniform(-5, 5);
        const auto e = eigen_symmetric(a);
        EXPECT_GE(e.values[0], e.values[1]);
        EXPECT_GE(e.values[1], e.values[2]);
        for (int k = 0; k < 3; ++k) {
            const auto& v = e.vectors[k];
            EXPECT_NEAR(norm(v), 1.0, 1e-12);
            for (int i = 0; i < 3; ++i) {
                const double av = a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2];
                EXPECT_NEAR(av, e.values[k] * v[i], 1e-10);
            }
            for (int m = k + 1; m < 3; ++m)
                EXPECT_NEAR(dot(v, e.vectors[m]), 0.0, 1e-12);
        }
        EXPECT_NEAR(e.values[0] + e.values[1] + e.values[2], a[0][0] + a[1][1] + a[2][2], 1e-10);
    }
}

TEST(Linalg, SolveLinear)
{
    const std::array<std::array<double, 3>, 3> a{{{2, 1, 0}, {1, 3, 1}, {0, 1, 4}}};
    const auto x = solve_linear<3>(a, {3, 5, 5});
    ASSERT_TRUE(x);
    EXPECT_NEAR((*x)[0], 1, 1e-14);
    EXPECT_NEAR((*x)[1], 1, 1e-14);
    EXPECT_NEAR((*x)[2], 1, 1e-14);
    EXPECT_FALSE((solve_linear<3>({{{1, 2, 3}, {2, 4, 6}, {0, 0, 1}}}, {1, 2, 3})));
}

TEST(Random, DeterministicAndInRange)
{
    random_source a(123);
    random_source b(123);
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform01();
        EXPECT_EQ(u, b.uniform01());
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_LT(a.index(7), 7u);
        (void)b.index(7);
        EXPECT_LE(std::abs(a.truncated_normal(2.0, 3.5)), 7.0);
        (void)b.truncated_normal(2.0, 3.5);
    }
}
