#include <plcseg/dbscan.hpp>
#include <plcseg/random.hpp>

#include <gtest/gtest.h>

#include <map>
#include <numeric>

using namespace plcseg;

namespace {

/// O(n^2) reference: core points by direct counting, clusters as connected
/// components of core points (union-find), borders attached to any adjacent core.
struct reference_result
{
    std::vector<bool> core;
    std::vector<int>  component; // core points only, -1 otherwise
};

template <std::size_t Dim>
reference_result reference_dbscan(const std::vector<std::array<double, Dim>>& pts, double eps, int min_pts)
{
    const std::size_t n = pts.size();
    auto close = [&](std::size_t i, std::size_t j) {
        double s = 0;
        for (std::size_t d = 0; d < Dim; ++d)
            s += (pts[i][d] - pts[j][d]) * (pts[i][d] - pts[j][d]);
        return s <= eps * eps;
    };
    reference_result r;
    r.core.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        int count = 0;
        for (std::size_t j = 0; j < n; ++j)
            count += close(i, j);
        r.core[i] = count >= min_pts;
    }
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (r.core[i] && r.core[j] && close(i, j))
                parent[find(i)] = find(j);
    r.component.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i)
        if (r.core[i])
            r.component[i] = static_cast<int>(find(i));
    return r;
}

template <std::size_t Dim>
std::vector<std::array<double, Dim>> clustered_points(std::size_t n, std::uint64_t seed)
{
    random_source rng(seed);
    std::vector<std::array<double, Dim>> centres(1 + rng.index(6));
    for (auto& c : centres)
        for (auto& v : c)
            v = rng.uniform(0, 10);
    std::vector<std::array<double, Dim>> pts(n);
    for (auto& p : pts) {
        if (rng.uniform01() < 0.15) {
            for (auto& v : p)
                v = rng.uniform(0, 10);
        } else {
            const auto& c = centres[rng.index(centres.size())];
            for (std::size_t d = 0; d < Dim; ++d)
                p[d] = c[d] + rng.normal() * 0.5;
        }
    }
    return pts;
}

} // namespace

TEST(Dbscan, TwoSeparatedBlobs)
{
    random_source rng(1);
    std::vector<std::array<double, 2>> pts;
    const double eps = 0.5;
    for (int b = 0; b < 2; ++b)
        for (int i = 0; i < 100; ++i)
            pts.push_back({b * 10 * eps + rng.uniform(0, 0.3), rng.uniform(0, 0.3)});
    const auto r = dbscan(pts, {eps, 5});
    EXPECT_EQ(r.cluster_count, 2);
    for (std::size_t i = 0; i < pts.size(); ++i)
        EXPECT_EQ(r.labels[i], i < 100 ? 0 : 1);
}

TEST(Dbscan, FewerPointsThanMinPtsIsAllNoise)
{
    const std::vector<std::array<double, 3>> pts{{0, 0, 0}, {0, 0, 0.01}, {0, 0.01, 0}};
    const auto r = dbscan(pts, {1.0, 4});
    EXPECT_EQ(r.cluster_count, 0);
    for (int l : r.labels)
        EXPECT_EQ(l, noise_label);
}

TEST(Dbscan, MinPtsCountsThePointItself)
{
    const std::vector<std::array<double, 1>> pts{{0.0}, {0.1}};
    EXPECT_EQ(dbscan(pts, {0.2, 2}).cluster_count, 1);
    EXPECT_EQ(dbscan(pts, {0.2, 3}).cluster_count, 0);
}

TEST(Dbscan, MatchesQuadraticReference)
{
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto pts = clustered_points<2>(2000, seed);
        const double eps = 0.2 + 0.05 * static_cast<double>(seed);
        const int min_pts = 4 + static_cast<int>(seed);
        const auto got = dbscan(pts, {eps, min_pts});
        const auto ref = reference_dbscan(pts, eps, min_pts);
        std::map<int, int> to_ref;
        std::map<int, int> to_got;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            ASSERT_EQ(got.core[i], ref.core[i]) << "seed " << seed << " point " << i;
            if (!ref.core[i])
                continue;
            ASSERT_NE(got.labels[i], noise_label);
            const auto [a, ia] = to_ref.emplace(got.labels[i], ref.component[i]);
            const auto [b, ib] = to_got.emplace(ref.component[i], got.labels[i]);
            EXPECT_EQ(a->second, ref.component[i]);
            EXPECT_EQ(b->second, got.labels[i]);
        }
    }
}

TEST(Dbscan, BorderAndNoiseSemantics)
{
    const auto pts = clustered_points<3>(1500, 42);
    const double eps = 0.6;
    const int min_pts = 8;
    const auto got = dbscan(pts, {eps, min_pts});
    const auto ref = reference_dbscan(pts, eps, min_pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (ref.core[i])
            continue;
        bool near_core = false;
        bool joined_adjacent = false;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            double s = 0;
            for (int d = 0; d < 3; ++d)
                s += (pts[i][d] - pts[j][d]) * (pts[i][d] - pts[j][d]);
            if (s <= eps * eps && ref.core[j]) {
                near_core = true;
                joined_adjacent |= got.labels[j] == got.labels[i];
            }
        }
        if (near_core)
            EXPECT_TRUE(joined_adjacent) << "border point " << i << " not joined to an adjacent core's cluster";
        else
            EXPECT_EQ(got.labels[i], noise_label);
    }
}

TEST(Dbscan, LabelsAreContiguous)
{
    const auto pts = clustered_points<2>(800, 5);
    const auto r = dbscan(pts, {0.3, 6});
    std::vector<bool> seen(static_cast<std::size_t>(r.cluster_count), false);
    for (int l : r.labels) {
        ASSERT_GE(l, noise_label);
        ASSERT_LT(l, r.cluster_count);
        if (l >= 0)
            seen[static_cast<std::size_t>(l)] = true;
    }
    for (bool s : seen)
        EXPECT_TRUE(s);
}

TEST(Dbscan, MonotoneCoreCount)
{
    const auto pts = clustered_points<2>(1000, 8);
    std::size_t prev = pts.size() + 1;
    for (int m : {2, 4, 8, 16, 32}) {
        const auto r = dbscan(pts, {0.3, m});
        const auto cores = static_cast<std::size_t>(std::count(r.core.begin(), r.core.end(), true));
        EXPECT_LE(cores, prev);
        prev = cores;
    }
}

TEST(Dbscan, InvalidParams)
{
    const std::vector<std::array<double, 1>> pts{{0.0}};
    EXPECT_THROW((void)dbscan(pts, {0.0, 3}), std::invalid_argument);
    EXPECT_THROW((void)dbscan(pts, {1.0, 0}), std::invalid_argument);
}
