#ifndef PLCSEG_FEATURES_HPP
#define PLCSEG_FEATURES_HPP

#include <plcseg/errors.hpp>
#include <plcseg/kdtree.hpp>
#include <plcseg/linalg.hpp>
#include <plcseg/parallel.hpp>
#include <plcseg/point_cloud.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace plcseg {

/// Per-point eigen-features of the local covariance.
struct eigen_features
{
    vec3        lambda{};  // descending, non-negative
    std::array<vec3, 3> v{}; // unit eigenvectors, v[0] dominant
    double      ln = 0.0;  // (l1 - l2) / l1
    double      pl = 0.0;  // (l2 - l3) / l1
    double      sp = 0.0;  // l3 / l1
    std::size_t neighbor_count = 0;
};

struct candidate_params
{
    int    k_neighbors = 10;
    double ln_thres    = 0.82;
    double alpha_thres = 5.0; // degrees
    double filt_mult   = 4.0;

    void validate() const
    {
        if (k_neighbors < 5)
            throw std::invalid_argument("k_neighbors must be at least 5");
        if (!(ln_thres >= 0.5 && ln_thres <= 1.0))
            throw std::invalid_argument("ln_thres must lie in [0.5, 1]");
        if (!(alpha_thres >= 0.0 && alpha_thres <= 20.0))
            throw std::invalid_argument("alpha_thres must lie in [0, 20] degrees");
        if (!(filt_mult > 0.0))
            throw std::invalid_argument("filt_mult must be positive");
    }
};

/// Population covariance (1/N) * Xc^T Xc of mean-centred coordinates.
inline mat3 covariance(std::span<const point3> points)
{
    if (points.size() < 3)
        throw std::invalid_argument("covariance needs at least 3 points, got " + std::to_string(points.size()));
    const point3 mean = centroid(points);
    mat3 s{};
    for (const auto& p : points) {
        const double dx = p.x - mean.x;
        const double dy = p.y - mean.y;
        const double dz = p.z - mean.z;
        s[0][0] += dx * dx;
        s[0][1] += dx * dy;
        s[0][2] += dx * dz;
        s[1][1] += dy * dy;
        s[1][2] += dy * dz;
        s[2][2] += dz * dz;
    }
    const double n = static_cast<double>(points.size());
    for (int r = 0; r < 3; ++r)
        for (int c = r; c < 3; ++c)
            s[r][c] /= n;
    s[1][0] = s[0][1];
    s[2][0] = s[0][2];
    s[2][1] = s[1][2];
    return s;
}

/// covariance() over cloud points selected by a neighbour list.
inline mat3 neighborhood_covariance(const point_cloud& cloud, std::span<const neighbor> hood)
{
    point3 mean;
    for (const auto& n : hood) {
        const auto& p = cloud.points[n.id];
        mean.x += p.x;
        mean.y += p.y;
        mean.z += p.z;
    }
    const double count = static_cast<double>(hood.size());
    mean = {mean.x / count, mean.y / count, mean.z / count};
    mat3 s{};
    for (const auto& n : hood) {
        const auto& p = cloud.points[n.id];
        const double dx = p.x - mean.x;
        const double dy = p.y - mean.y;
        const double dz = p.z - mean.z;
        s[0][0] += dx * dx;
        s[0][1] += dx * dy;
        s[0][2] += dx * dz;
        s[1][1] += dy * dy;
        s[1][2] += dy * dz;
        s[2][2] += dz * dz;
    }
    for (int r = 0; r < 3; ++r)
        for (int c = r; c < 3; ++c)
            s[r][c] /= count;
    s[1][0] = s[0][1];
    s[2][0] = s[0][2];
    s[2][1] = s[1][2];
    return s;
}

/// Shape descriptors from a covariance; LN = PL = SP = 0 when l1 == 0.
inline eigen_features features_from_covariance(const mat3& cov, std::size_t neighbor_count)
{
    const auto eig = eigen_symmetric(cov);
    eigen_features f;
    f.lambda         = eig.values;
    f.v              = eig.vectors;
    f.neighbor_count = neighbor_count;
    const double l1 = f.lambda[0];
    if (l1 > 0.0) {
        f.ln = (l1 - f.lambda[1]) / l1;
        f.pl = (f.lambda[1] - f.lambda[2]) / l1;
        f.sp = f.lambda[2] / l1;
    }
    return f;
}

/**
 * Eigen-features for every point of `cloud` over its neighbourhood: the point itself
 * plus its k nearest other points. `index` must be built over `cloud`.
 */
inline std::vector<eigen_features> compute_eigen_features(const kd_index& index, const point_cloud& cloud, int k)
{
    if (k < 2)
        throw std::invalid_argument("eigen features need k >= 2");
    if (index.size() != cloud.size())
        throw std::invalid_argument("index was not built over this cloud");
    const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(k) + 1, cloud.size());
    std::vector<eigen_features> out(cloud.size());
    parallel_for(cloud.size(), [&](std::size_t i) {
        const auto nn = index.knn(cloud.points[i], want);
        if (nn.size() < 3) {
            out[i].neighbor_count = nn.size() - 1;
            return;
        }
        out[i] = features_from_covariance(neighborhood_covariance(cloud, nn), nn.size() - 1);
    });
    return out;
}

/// Elevation angle of a direction above the horizontal plane, degrees in [0, 90].
inline double elevation_angle_deg(const vec3& v)
{
    const double n = norm(v);
    if (n == 0.0)
        return 90.0;
    return std::asin(std::min(1.0, std::abs(v[2]) / n)) * 180.0 / std::numbers::pi;
}

/// Linear, near-horizontal points with more than four neighbours.
inline bool is_candidate(const eigen_features& f, const candidate_params& params)
{
    return f.neighbor_count > 4 && f.ln >= params.ln_thres && elevation_angle_deg(f.v[0]) <= params.alpha_thres;
}

/// Ids (ascending) of points passing the candidate test. Empty result is an error.
inline std::vector<std::size_t> select_candidate_ids(std::span<const eigen_features> features,
                                                     const candidate_params& params)
{
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < features.size(); ++i)
        if (is_candidate(features[i], params))
            ids.push_back(i);
    if (ids.empty())
        throw stage_error(error_code::no_candidates, "no power-line candidates");
    return ids;
}

inline point_cloud select_candidates(const point_cloud& cloud, std::span<const eigen_features> features,
                                     const candidate_params& params)
{
    if (features.size() != cloud.size())
        throw std::invalid_argument("features are not aligned with the cloud");
    return subset(cloud, select_candidate_ids(features, params));
}

struct outlier_stats
{
    double mean   = 0.0; // mean over points of the mean k-neighbour distance
    double stddev = 0.0;
    double threshold = 0.0;
};

/**
 * Ids (ascending) of points whose mean distance to their k nearest neighbours is
 * at most mu + filt_mult * sigma over all points.
 */
inline std::vector<std::size_t> statistical_inlier_ids(const point_cloud& cloud, int k, double filt_mult,
                                                       outlier_stats* stats = nullptr)
{
    if (k < 1)
        throw std::invalid_argument("outlier removal needs k >= 1");
    if (cloud.size() <= static_cast<std::size_t>(k))
        throw std::invalid_argument("outlier removal needs more than k = " + std::to_string(k) + " points, got " +
                                    std::to_string(cloud.size()));
    const kd_index index(cloud);
    const std::size_t kk = static_cast<std::size_t>(k);
    std::vector<double> mean_dist(cloud.size());
    parallel_for(cloud.size(), [&](std::size_t i) {
        const auto nn = index.knn(cloud.points[i], kk + 1);
        double sum = 0.0;
        std::size_t used = 0;
        bool skipped_self = false;
        for (const auto& n : nn) {
            if (!skipped_self && n.id == i) {
                skipped_self = true;
                continue;
            }
            if (used == kk)
                break;
            sum += n.distance;
            ++used;
        }
        mean_dist[i] = sum / static_cast<double>(used);
    });

    double mu = 0.0;
    for (double d : mean_dist)
        mu += d;
    mu /= static_cast<double>(mean_dist.size());
    double var = 0.0;
    for (double d : mean_dist)
        var += (d - mu) * (d - mu);
    const double sigma = std::sqrt(var / static_cast<double>(mean_dist.size()));
    const double threshold = mu + filt_mult * sigma;

    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        if (!(mean_dist[i] > threshold))
            kept.push_back(i);
    if (stats)
        *stats = {mu, sigma, threshold};
    return kept;
}

inline point_cloud remove_statistical_outliers(const point_cloud& cloud, int k, double filt_mult)
{
    return subset(cloud, statistical_inlier_ids(cloud, k, filt_mult));
}

/// Rotation about the vertical axis through `pivot`.
struct regularization_transform
{
    double theta       = 0.0; // radians, from the arctangent of the horizontal direction
    double theta_check = 0.0; // radians, from the angle between plane normals
    point3 pivot{};
    mat3   matrix{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};

    static regularization_transform about(double theta, point3 pivot)
    {
        regularization_transform t;
        t.theta       = theta;
        t.theta_check = theta;
        t.pivot       = pivot;
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        t.matrix = {{{c, -s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}}};
        return t;
    }
};

/**
 * Rotation that turns the dominant horizontal direction of `candidates` onto +Y.
 *
 * theta = atan(vx / vy) of the dominant eigenvector, sign-normalised so vy > 0
 * (or vx > 0 when vy == 0), giving theta in (-pi/2, pi/2]. The same angle is
 * recomputed as the angle between the normal of the ZY-plane and the normal of
 * the conductor's vertical plane; both must agree within 1e-6 rad.
 */
inline regularization_transform estimate_regularization(const point_cloud& candidates)
{
    if (candidates.size() < 3)
        throw stage_error(error_code::ambiguous_orientation, "ambiguous line orientation: fewer than 3 candidates");
    const auto eig = eigen_symmetric(covariance(candidates.points));
    if (!(eig.values[0] > 2.0 * eig.values[1]))
        throw stage_error(error_code::ambiguous_orientation,
                          "ambiguous line orientation: no dominant direction (l1 = " + std::to_string(eig.values[0]) +
                              ", l2 = " + std::to_string(eig.values[1]) + ")");
    double vx = eig.vectors[0][0];
    double vy = eig.vectors[0][1];
    const double horizontal = std::hypot(vx, vy);
    if (horizontal < 1e-9)
        throw stage_error(error_code::ambiguous_orientation, "ambiguous line orientation: dominant direction is vertical");
    if (vy < 0.0 || (vy == 0.0 && vx < 0.0)) {
        vx = -vx;
        vy = -vy;
    }

    const double theta = vy == 0.0 ? std::numbers::pi / 2.0 : std::atan(vx / vy);

    // ZY-plane normal (1,0,0); the conductor's vertical plane contains (vx,vy,0) and Z,
    // so its normal is (vy,-vx,0).
    const vec3 n1{1.0, 0.0, 0.0};
    const vec3 n2{vy, -vx, 0.0};
    const double cosang = std::clamp(dot(n1, n2) / (norm(n1) * norm(n2)), -1.0, 1.0);
    const double theta_check = std::copysign(std::acos(cosang), vx);
    if (std::abs(theta - theta_check) > 1e-6)
        throw stage_error(error_code::ambiguous_orientation,
                          "rotation angle estimates disagree: " + std::to_string(theta) + " vs " +
                              std::to_string(theta_check));

    auto t = regularization_transform::about(theta, centroid(candidates.points));
    t.theta_check = theta_check;
    return t;
}

inline point3 apply_transform(const point3& p, const regularization_transform& t)
{
    const double dx = p.x - t.pivot.x;
    const double dy = p.y - t.pivot.y;
    return {t.pivot.x + t.matrix[0][0] * dx + t.matrix[0][1] * dy,
            t.pivot.y + t.matrix[1][0] * dx + t.matrix[1][1] * dy, p.z};
}

inline point_cloud apply_transform(const point_cloud& cloud, const regularization_transform& t)
{
    point_cloud out = cloud;
    for (auto& p : out.points)
        p = apply_transform(p, t);
    return out;
}

} // namespace plcseg

#endif // PLCSEG_FEATURES_HPP
