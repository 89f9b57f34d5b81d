#include <plcseg/catenary.hpp>
#include <plcseg/random.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace plcseg;

namespace {

std::vector<profile_point> catenary_samples(double a, double b, double c, double y0, double y1, int n,
                                            double noise = 0.0, std::uint64_t seed = 1)
{
    random_source rng(seed);
    std::vector<profile_point> pts;
    for (int i = 0; i < n; ++i) {
        const double y = y0 + (y1 - y0) * i / (n - 1);
        pts.push_back({y, a + c * std::cosh((y - b) / c) + (noise > 0 ? noise * rng.normal() : 0.0)});
    }
    return pts;
}

} // namespace

TEST(Quadratic, ExactParabola)
{
    std::vector<profile_point> pts;
    for (int i = -20; i <= 20; ++i)
        pts.push_back({i * 0.5, 0.03 * i * i * 0.25 - 0.4 * i * 0.5 + 7.0});
    const auto lsq = fit_quadratic_lsq(pts);
    EXPECT_NEAR(lsq.a2, 0.03, 1e-10);
    EXPECT_NEAR(lsq.a1, -0.4, 1e-10);
    EXPECT_NEAR(lsq.a0, 7.0, 1e-10);
    const auto m = fit_quadratic_msac(pts, {});
    EXPECT_NEAR(m.a2, 0.03, 1e-10);
    EXPECT_NEAR(m.a1, -0.4, 1e-10);
    EXPECT_NEAR(m.a0, 7.0, 1e-10);
    EXPECT_EQ(m.inlier_ids.size(), pts.size());
}

TEST(Quadratic, ThreePointsInterpolate)
{
    const std::vector<profile_point> pts{{-1, 2}, {0, 1}, {2, 5}};
    const auto m = fit_quadratic_lsq(pts);
    EXPECT_NEAR(m.rmse, 0.0, 1e-12);
    for (const auto& p : pts)
        EXPECT_NEAR(m(p.y), p.z, 1e-12);
    const auto r = fit_quadratic_msac(pts, {0.1, 10, 1});
    EXPECT_NEAR(r.rmse, 0.0, 1e-12);
}

TEST(Quadratic, MsacIgnoresGrossOutliers)
{
    random_source rng(17);
    std::vector<profile_point> clean;
    std::vector<profile_point> all;
    for (int i = 0; i < 500; ++i) {
        const double y = rng.uniform(-30, 30);
        const double z = 0.005 * y * y + 0.1 * y + 12.0 + 0.02 * rng.normal();
        const profile_point p{y, z};
        if (i % 5 == 0) {
            all.push_back({y, z + 10.0});
        } else {
            all.push_back(p);
            clean.push_back(p);
        }
    }
    const auto ref = fit_quadratic_lsq(clean);
    const auto m   = fit_quadratic_msac(all, {});
    EXPECT_NEAR(m.a2, ref.a2, 0.05 * std::abs(ref.a2));
    EXPECT_NEAR(m.a1, ref.a1, 0.05 * std::abs(ref.a1));
    EXPECT_NEAR(m.a0, ref.a0, 0.05 * std::abs(ref.a0));
    EXPECT_EQ(m.inlier_ids.size(), clean.size());

    const auto again = fit_quadratic_msac(all, {});
    EXPECT_EQ(again.a2, m.a2);
    EXPECT_EQ(again.a1, m.a1);
    EXPECT_EQ(again.a0, m.a0);
}

TEST(Catenary, NoiselessRecovery)
{
    const auto pts = catenary_samples(0, 0, 100, -40, 40, 801);
    const auto m = fit_catenary(pts);
    EXPECT_NEAR(m.a, 0.0, 1e-6 * 100); // a = 0: relative to the curve scale c
    EXPECT_NEAR(m.b, 0.0, 1e-6 * 100);
    EXPECT_NEAR(m.c, 100.0, 1e-6 * 100);
    EXPECT_TRUE(m.converged);
}

TEST(Catenary, ShiftedVertex)
{
    const auto pts = catenary_samples(-88.0, 15.0, 100, -25, 55, 801);
    const auto m = fit_catenary(pts);
    EXPECT_NEAR(m.b, 15.0, 1e-6 * 15.0);
    EXPECT_NEAR(m.c, 100.0, 1e-6 * 100.0);
    EXPECT_NEAR(m.a, -88.0, 1e-6 * 88.0);
}

TEST(Catenary, NoisyRecoveryOverSeeds)
{
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto pts = catenary_samples(0, 0, 100, -40, 40, 801, 0.02, seed);
        const auto m = fit_catenary(pts);
        EXPECT_LE(std::abs(m.c - 100.0) / 100.0, 0.01) << "seed " << seed;
    }
}

TEST(Catenary, WeightGivesTension)
{
    auto m = fit_catenary(catenary_samples(0, 0, 100, -40, 40, 101));
    m.set_weight(15.0);
    ASSERT_TRUE(m.t0);
    EXPECT_NEAR(*m.t0, 1500.0, 1e-4);
    EXPECT_THROW(m.set_weight(0.0), std::invalid_argument);
}

TEST(Catenary, RejectsTooFewOrTooShort)
{
    EXPECT_THROW((void)fit_catenary(catenary_samples(0, 0, 100, 0, 1, 3)), std::invalid_argument);
    EXPECT_THROW((void)fit_catenary(catenary_samples(0, 0, 100, 0, 0.5, 50)), std::invalid_argument);
}

TEST(Sag, ReferenceSpan)
{
    const auto pts = catenary_samples(0, 0, 100, -40, 40, 801);
    catenary_model m;
    m.a = 0;
    m.b = 0;
    m.c = 100;
    const auto r = assess_sag(m, pts, 0.2, 10.0);
    EXPECT_NEAR(r.sag_depth, 100.0 * std::cosh(0.4) - 100.0, 1e-9);
    EXPECT_NEAR(r.sag_depth, 8.107, 1e-3);
    EXPECT_FALSE(r.hazard);
    EXPECT_TRUE(r.hazard_determined);
    EXPECT_TRUE(assess_sag(m, pts, 0.2, 8.0).hazard);
}

TEST(Sag, StraightWire)
{
    std::vector<profile_point> pts;
    for (int i = 0; i < 100; ++i)
        pts.push_back({i * 0.5, 12.0});
    const auto q = fit_quadratic_lsq(pts);
    const auto r = assess_sag(q, pts, 0.2, 10.0);
    EXPECT_NEAR(r.sag_depth, 0.0, 1e-9);
    EXPECT_FALSE(r.hazard);
}

TEST(Sag, IcicleBulgeIsHazard)
{
    auto pts = catenary_samples(0, 0, 100, -40, 40, 801);
    for (auto& p : pts)
        if (p.y > 5 && p.y < 13)
            p.z -= 0.5;
    const auto m = fit_catenary(pts);
    const auto r = assess_sag(m, pts, 0.2, 10.0);
    EXPECT_GT(r.residual_p95, 0.2);
    EXPECT_TRUE(r.hazard);
}

TEST(Sag, VertexOutsideSamplesIsUndetermined)
{
    const auto pts = catenary_samples(0, 0, 100, 10, 40, 301);
    catenary_model m;
    m.c = 100;
    const auto r = assess_sag(m, pts, 0.2, 10.0);
    EXPECT_FALSE(r.hazard_determined);
    EXPECT_FALSE(r.hazard);
}
