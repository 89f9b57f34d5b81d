#ifndef PLCSEG_POINT_CLOUD_HPP
#define PLCSEG_POINT_CLOUD_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace plcseg {

struct point3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const point3&, const point3&) = default;
};

inline bool is_finite(const point3& p) noexcept
{
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

inline double squared_distance(const point3& a, const point3& b) noexcept
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

inline double distance(const point3& a, const point3& b) noexcept
{
    return std::sqrt(squared_distance(a, b));
}

using label_t = std::int32_t;

/// Ordered point set with optional per-point integer labels.
struct point_cloud
{
    std::vector<point3> points;
    std::optional<std::vector<label_t>> labels;

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
    [[nodiscard]] bool empty() const noexcept { return points.empty(); }
    [[nodiscard]] bool has_labels() const noexcept { return labels.has_value(); }

    /// Throws std::invalid_argument when labels are present with the wrong length.
    void validate() const
    {
        if (labels && labels->size() != points.size())
            throw std::invalid_argument("label count does not match point count");
    }

    friend bool operator==(const point_cloud&, const point_cloud&) = default;
};

/// Copy of `cloud` restricted to `ids`, in the order given. Labels follow their points.
inline point_cloud subset(const point_cloud& cloud, std::span<const std::size_t> ids)
{
    point_cloud out;
    out.points.reserve(ids.size());
    for (auto id : ids)
        out.points.push_back(cloud.points.at(id));
    if (cloud.labels) {
        out.labels.emplace();
        out.labels->reserve(ids.size());
        for (auto id : ids)
            out.labels->push_back((*cloud.labels)[id]);
    }
    return out;
}

struct bounding_box
{
    point3 min;
    point3 max;
};

inline bounding_box bounds(std::span<const point3> points)
{
    if (points.empty())
        return {};
    bounding_box box{points.front(), points.front()};
    for (const auto& p : points) {
        box.min.x = std::min(box.min.x, p.x);
        box.min.y = std::min(box.min.y, p.y);
        box.min.z = std::min(box.min.z, p.z);
        box.max.x = std::max(box.max.x, p.x);
        box.max.y = std::max(box.max.y, p.y);
        box.max.z = std::max(box.max.z, p.z);
    }
    return box;
}

inline point3 centroid(std::span<const point3> points)
{
    point3 c;
    if (points.empty())
        return c;
    for (const auto& p : points) {
        c.x += p.x;
        c.y += p.y;
        c.z += p.z;
    }
    const double n = static_cast<double>(points.size());
    return {c.x / n, c.y / n, c.z / n};
}

} // namespace plcseg

#endif // PLCSEG_POINT_CLOUD_HPP
