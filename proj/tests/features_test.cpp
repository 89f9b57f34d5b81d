#include "test_util.hpp"

#include <plcseg/features.hpp>
#include <plcseg/kdtree.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace plcseg;

namespace {

// Two-pass textbook covariance in long double.
mat3 reference_covariance(const std::vector<point3>& pts)
{
    long double m[3] = {0, 0, 0};
    for (const auto& p : pts) {
        m[0] += p.x;
        m[1] += p.y;
        m[2] += p.z;
    }
    for (auto& v : m)
        v /= static_cast<long double>(pts.size());
    long double s[3][3] = {};
    for (const auto& p : pts) {
        const long double d[3] = {p.x - m[0], p.y - m[1], p.z - m[2]};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                s[i][j] += d[i] * d[j];
    }
    mat3 out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out[i][j] = static_cast<double>(s[i][j] / static_cast<long double>(pts.size()));
    return out;
}

point_cloud wire(point3 origin, point3 dir, int n, double step, double noise, std::uint64_t seed)
{
    random_source rng(seed);
    point_cloud c;
    for (int i = 0; i < n; ++i) {
        const double t = i * step;
        c.points.push_back({origin.x + t * dir.x + rng.truncated_normal(noise, 3.0),
                            origin.y + t * dir.y + rng.truncated_normal(noise, 3.0),
                            origin.z + t * dir.z + rng.truncated_normal(noise, 3.0)});
    }
    return c;
}

} // namespace

TEST(Covariance, IdenticalPointsGiveZero)
{
    const std::vector<point3> pts(3, point3{1, 2, 3});
    const auto s = covariance(pts);
    for (const auto& row : s)
        for (double v : row)
            EXPECT_EQ(v, 0.0);
}

TEST(Covariance, SymmetricTriple)
{
    const std::vector<point3> pts{{-1, 0, 0}, {0, 0, 0}, {1, 0, 0}};
    const auto s = covariance(pts);
    EXPECT_NEAR(s[0][0], 2.0 / 3.0, 1e-15);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i || j) {
                EXPECT_EQ(s[i][j], 0.0);
            }
}

TEST(Covariance, MatchesTwoPassReference)
{
    const auto c = test::random_cloud(500, 21, 100.0);
    const auto s = covariance(c.points);
    const auto r = reference_covariance(c.points);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            EXPECT_NEAR(s[i][j], r[i][j], 1e-12 * std::max(1.0, std::abs(r[i][j])));
}

TEST(Covariance, NeedsThreePoints)
{
    const std::vector<point3> pts{{0, 0, 0}, {1, 1, 1}};
    EXPECT_THROW((void)covariance(pts), std::invalid_argument);
}

TEST(EigenFeatures, CollinearIsPurelyLinear)
{
    const std::vector<point3> pts{{0, 0, 0}, {1, 2, 0.5}, {2, 4, 1}, {3, 6, 1.5}, {4, 8, 2}};
    const auto f = features_from_covariance(covariance(pts), 4);
    EXPECT_NEAR(f.ln, 1.0, 1e-12);
    EXPECT_NEAR(f.pl, 0.0, 1e-12);
    EXPECT_NEAR(f.sp, 0.0, 1e-12);
}

TEST(EigenFeatures, IsotropicHasNoLinearity)
{
    const std::vector<point3> pts{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    const auto f = features_from_covariance(covariance(pts), 5);
    EXPECT_NEAR(f.ln, 0.0, 1e-12);
    EXPECT_NEAR(f.sp, 1.0, 1e-12);
}

TEST(EigenFeatures, PlanarDiskIsPlanar)
{
    random_source rng(4);
    std::vector<point3> pts;
    while (pts.size() < 400) {
        const double x = rng.uniform(-1, 1);
        const double y = rng.uniform(-1, 1);
        if (x * x + y * y <= 1)
            pts.push_back({x, y, 0.0});
    }
    const auto f = features_from_covariance(covariance(pts), pts.size() - 1);
    EXPECT_GT(f.pl, f.ln);
    EXPECT_GT(f.pl, f.sp);
    EXPECT_NEAR(f.ln + f.pl + f.sp, 1.0, 1e-9);
}

TEST(EigenFeatures, PerPointNeighbourhoods)
{
    const auto c = test::random_cloud(300, 9);
    const kd_index idx(c);
    const auto feats = compute_eigen_features(idx, c, 10);
    ASSERT_EQ(feats.size(), c.size());
    for (std::size_t i = 0; i < c.size(); i += 37) {
        EXPECT_EQ(feats[i].neighbor_count, 10u);
        std::vector<point3> hood;
        for (const auto& n : idx.knn(c.points[i], 11))
            hood.push_back(c.points[n.id]);
        const auto ref = features_from_covariance(reference_covariance(hood), 10);
        EXPECT_NEAR(feats[i].ln, ref.ln, 1e-9);
        EXPECT_NEAR(feats[i].lambda[0], ref.lambda[0], 1e-12);
    }
}

TEST(Candidates, DirectionTest)
{
    EXPECT_NEAR(elevation_angle_deg({1, 0, 0}), 0.0, 1e-12);
    EXPECT_NEAR(elevation_angle_deg({0, 0, -1}), 90.0, 1e-12);
    EXPECT_NEAR(elevation_angle_deg({1, 0, 1}), 45.0, 1e-12);
    eigen_features f;
    f.ln = 0.9;
    f.neighbor_count = 10;
    f.v[0] = {std::cos(0.05), 0.0, std::sin(0.05)}; // ~2.9 degrees
    EXPECT_TRUE(is_candidate(f, {}));
    f.v[0] = {std::cos(0.1), 0.0, std::sin(0.1)}; // ~5.7 degrees
    EXPECT_FALSE(is_candidate(f, {}));
    f.v[0] = {1, 0, 0};
    f.neighbor_count = 4;
    EXPECT_FALSE(is_candidate(f, {}));
}

TEST(Candidates, WireInVegetation)
{
    const auto w = wire({0, 0, 10}, {0.6, 0.8, 0.0}, 2000, 0.02, 0.0005, 3);
    random_source rng(5);
    point_cloud c = w;
    std::size_t veg = 0;
    for (int i = 0; i < 3000; ++i, ++veg) {
        double x, y, z;
        do {
            x = rng.uniform(-2, 2);
            y = rng.uniform(-2, 2);
            z = rng.uniform(-2, 2);
        } while (x * x + y * y + z * z > 4);
        c.points.push_back({10 + x, 30 + y, 5 + z});
    }
    const kd_index idx(c);
    const auto feats = compute_eigen_features(idx, c, 10);
    const auto ids = select_candidate_ids(feats, {});
    std::size_t wire_kept = 0;
    std::size_t veg_kept = 0;
    for (auto id : ids)
        (id < w.size() ? wire_kept : veg_kept)++;
    EXPECT_GE(static_cast<double>(wire_kept), 0.98 * static_cast<double>(w.size()));
    EXPECT_LE(static_cast<double>(veg_kept), 0.02 * static_cast<double>(veg));
}

TEST(Candidates, VegetationOnlyRaises)
{
    // crown-like neighbourhoods: isotropic, no dominant direction
    random_source rng(33);
    std::vector<eigen_features> feats;
    for (int i = 0; i < 500; ++i) {
        std::vector<point3> hood;
        for (int j = 0; j < 11; ++j)
            hood.push_back({rng.normal(), rng.normal(), rng.normal()});
        auto f = features_from_covariance(covariance(hood), 10);
        if (f.ln < 0.82)
            feats.push_back(f);
    }
    try {
        (void)select_candidate_ids(feats, {});
        FAIL();
    } catch (const stage_error& e) {
        EXPECT_EQ(e.code(), error_code::no_candidates);
    }
}

TEST(Candidates, UnitThresholdKeepsOnlyExactLines)
{
    point_cloud c;
    for (int i = 0; i < 50; ++i)
        c.points.push_back({static_cast<double>(i), 0.0, 5.0});
    random_source rng(2);
    for (int i = 0; i < 50; ++i)
        c.points.push_back({100.0 + i, rng.uniform(0, 0.1), rng.uniform(0, 0.1)});
    const kd_index idx(c);
    const auto feats = compute_eigen_features(idx, c, 10);
    candidate_params p;
    p.ln_thres = 1.0;
    for (auto id : select_candidate_ids(feats, p))
        EXPECT_LT(id, 50u);
}

TEST(OutlierRemoval, FarPointRemoved)
{
    point_cloud c;
    for (int i = 0; i < 200; ++i)
        c.points.push_back({0.05 * i, 0.0, 0.0});
    c.points.push_back({5.0, 50.0, 0.0});
    const auto kept = statistical_inlier_ids(c, 10, 4.0);
    ASSERT_EQ(kept.size(), 200u);
    EXPECT_EQ(kept.back(), 199u);
}

TEST(OutlierRemoval, UniformGridKeepsEverything)
{
    point_cloud c;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            c.points.push_back({static_cast<double>(i), static_cast<double>(j), 0.0});
    // k = 1: every point's nearest neighbour is exactly 1 away, so sigma = 0
    outlier_stats s;
    EXPECT_EQ(statistical_inlier_ids(c, 1, 4.0, &s).size(), c.size());
    EXPECT_DOUBLE_EQ(s.stddev, 0.0);
}

TEST(OutlierRemoval, HugeMultiplierIsIdentity)
{
    const auto c = test::random_cloud(300, 8);
    EXPECT_EQ(remove_statistical_outliers(c, 10, 1e12).points, c.points);
}

TEST(Regularization, WireAlongYIsIdentity)
{
    const auto c = wire({1, 2, 10}, {0, 1, 0}, 200, 0.1, 0.0, 1);
    const auto t = estimate_regularization(c);
    EXPECT_NEAR(t.theta, 0.0, 1e-12);
    const auto r = apply_transform(c, t);
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_NEAR(r.points[i].x, c.points[i].x, 1e-12);
        EXPECT_NEAR(r.points[i].y, c.points[i].y, 1e-12);
    }
}

TEST(Regularization, WireAlongXTurnsOntoY)
{
    const auto c = wire({0, 0, 10}, {1, 0, 0}, 200, 0.1, 0.0, 1);
    const auto t = estimate_regularization(c);
    EXPECT_NEAR(std::abs(t.theta), std::numbers::pi / 2, 1e-9);
    const auto r = apply_transform(c, t);
    const auto e = eigen_symmetric(covariance(r.points));
    EXPECT_NEAR(std::abs(e.vectors[0][1]), 1.0, 1e-12);
}

TEST(Regularization, ThirtyDegreeWire)
{
    const double a = 30.0 * std::numbers::pi / 180.0;
    const auto c = wire({0, 0, 10}, {std::sin(a), std::cos(a), 0}, 300, 0.1, 0.001, 1);
    const auto t = estimate_regularization(c);
    EXPECT_NEAR(t.theta, a, 1e-4); // noise-limited
    EXPECT_NEAR(t.theta, t.theta_check, 1e-6);
    const auto exact = wire({0, 0, 10}, {std::sin(a), std::cos(a), 0}, 300, 0.1, 0.0, 1);
    EXPECT_NEAR(estimate_regularization(exact).theta, a, 1e-6);
    const auto r = apply_transform(exact, estimate_regularization(exact));
    const auto e = eigen_symmetric(covariance(r.points));
    EXPECT_NEAR(std::abs(e.vectors[0][1]), 1.0, 1e-12);
}

TEST(Regularization, AmbiguousOrientation)
{
    const auto blob = test::random_cloud(200, 3);
    try {
        (void)estimate_regularization(blob);
        FAIL();
    } catch (const stage_error& e) {
        EXPECT_EQ(e.code(), error_code::ambiguous_orientation);
    }
}

TEST(Transform, IdentityAndInvolution)
{
    const auto c = test::random_cloud(100, 6);
    const auto id = regularization_transform::about(0.0, {1, 2, 3});
    EXPECT_EQ(apply_transform(c, id).points, c.points);
    const auto half = regularization_transform::about(std::numbers::pi, {4, 5, 0});
    const auto twice = apply_transform(apply_transform(c, half), half);
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_NEAR(twice.points[i].x, c.points[i].x, 1e-12);
        EXPECT_NEAR(twice.points[i].y, c.points[i].y, 1e-12);
        EXPECT_EQ(twice.points[i].z, c.points[i].z);
    }
}

TEST(Transform, PreservesPairwiseDistances)
{
    const auto c = test::random_cloud(150, 7, 50.0);
    const auto t = regularization_transform::about(0.7345, {3, -2, 0});
    const auto r = apply_transform(c, t);
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j) {
            const double d0 = distance(c.points[i], c.points[j]);
            EXPECT_NEAR(distance(r.points[i], r.points[j]), d0, 1e-10 * d0);
        }
}
