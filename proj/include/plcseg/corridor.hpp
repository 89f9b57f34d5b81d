#ifndef PLCSEG_CORRIDOR_HPP
#define PLCSEG_CORRIDOR_HPP

#include <plcseg/catenary.hpp>
#include <plcseg/errors.hpp>
#include <plcseg/kdtree.hpp>
#include <plcseg/parallel.hpp>
#include <plcseg/point_cloud.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace plcseg {

enum class environment_mode { open, complex };

struct corridor_params
{
    environment_mode      mode      = environment_mode::open;
    double                clearance = 2.0; // metres
    std::optional<double> r_override;

    void validate() const
    {
        if (!(clearance > 0.0))
            throw std::invalid_argument("clearance must be positive");
        if (r_override && !(*r_override > 0.0))
            throw std::invalid_argument("r_override must be positive");
    }
};

/// Point classes, in increasing precedence. The values are the label codes written to disk.
enum class corridor_class : label_t { other = 0, corridor = 1, hazard = 2, conductor = 3 };

struct hazard_point
{
    std::size_t id         = 0;
    double      distance   = 0.0; // to the nearest conductor point
    int         segment_id = 0;
};

struct radius_selection
{
    double r       = 0.0;
    double delta_z = 0.0; // complex mode only
    double d_i     = 0.0; // complex mode only
    double max_a0  = 0.0;
    bool   overridden = false;
};

struct corridor_report
{
    double                      r_used    = 0.0;
    double                      clearance = 0.0;
    std::vector<corridor_class> classes; // one per point of the full cloud
    std::vector<hazard_point>   hazard_points;
    std::vector<std::string>    warnings;

    [[nodiscard]] std::size_t count(corridor_class c) const
    {
        return static_cast<std::size_t>(std::count(classes.begin(), classes.end(), c));
    }
};

/// Height of a fitted conductor at y = 0 of its frame; the a0 coefficient of a quadratic.
inline double sag_height(const conductor_model& m) { return evaluate(m, 0.0); }

/**
 * Search radius rule: r = max(dz, d_i) in complex environments, max(a0) otherwise.
 * An override replaces either case.
 */
inline double corridor_radius(environment_mode mode, double delta_z, double d_i, std::span<const double> a0s,
                              std::optional<double> r_override = std::nullopt)
{
    if (r_override)
        return *r_override;
    if (mode == environment_mode::complex)
        return std::max(delta_z, d_i);
    double r = 0.0;
    bool any = false;
    for (double a0 : a0s) {
        r = any ? std::max(r, a0) : a0;
        any = true;
    }
    return r;
}

namespace detail {

inline double box_distance(const bounding_box& b, const point3& p)
{
    const double dx = std::max({b.min.x - p.x, 0.0, p.x - b.max.x});
    const double dy = std::max({b.min.y - p.y, 0.0, p.y - b.max.y});
    const double dz = std::max({b.min.z - p.z, 0.0, p.z - b.max.z});
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

} // namespace detail

/**
 * Corridor search radius over a regularized cloud (conductors along Y).
 *
 * `segments[i]` lists the conductor point ids of segment i and `models[i]` its fitted
 * curve. In complex mode the near field is every non-conductor point within
 * 2 * max(a0) of some conductor's bounding box; each near-field point is compared
 * with the conductor whose box is closest: dz = |z - curve(y)| and d_i = |x - x_c|,
 * the offset from the conductor's vertical plane x = x_c (its mean x).
 */
inline radius_selection select_radius(const point_cloud& regularized,
                                      std::span<const std::vector<std::size_t>> segments,
                                      std::span<const conductor_model> models, const corridor_params& params)
{
    params.validate();
    if (segments.empty() || segments.size() != models.size())
        throw std::invalid_argument("radius selection needs one fitted model per segment and at least one segment");

    radius_selection sel;
    std::vector<double> a0s;
    for (const auto& m : models)
        a0s.push_back(sag_height(m));
    sel.max_a0 = *std::max_element(a0s.begin(), a0s.end());

    if (params.mode == environment_mode::complex && !params.r_override) {
        std::vector<bounding_box> boxes;
        std::vector<double> plane_x;
        std::vector<bool> is_conductor(regularized.size(), false);
        for (const auto& ids : segments) {
            std::vector<point3> pts;
            for (auto id : ids) {
                pts.push_back(regularized.points.at(id));
                is_conductor[id] = true;
            }
            boxes.push_back(bounds(pts));
            plane_x.push_back(centroid(pts).x);
        }
        const double margin = 2.0 * std::abs(sel.max_a0);
        for (std::size_t i = 0; i < regularized.size(); ++i) {
            if (is_conductor[i])
                continue;
            const auto& p = regularized.points[i];
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s < boxes.size(); ++s) {
                const double d = detail::box_distance(boxes[s], p);
                if (d < best_d) {
                    best_d = d;
                    best = s;
                }
            }
            if (best_d > margin)
                continue;
            sel.delta_z = std::max(sel.delta_z, std::abs(p.z - evaluate(models[best], p.y)));
            sel.d_i     = std::max(sel.d_i, std::abs(p.x - plane_x[best]));
        }
    }
    sel.overridden = params.r_override.has_value();
    sel.r = corridor_radius(params.mode, sel.delta_z, sel.d_i, a0s, params.r_override);
    return sel;
}

/**
 * Classifies every point of `cloud` by its distance to the nearest conductor point:
 * conductor (member of a segment), hazard (<= clearance), corridor (<= r), other.
 * Segment ids index into `cloud` and must be disjoint.
 */
inline corridor_report extract_corridor(const point_cloud& cloud, std::span<const std::vector<std::size_t>> segments,
                                        double r, double clearance)
{
    if (segments.empty())
        throw std::invalid_argument("corridor extraction needs at least one segment");
    if (!(r >= 0.0) || !(clearance > 0.0))
        throw std::invalid_argument("corridor radius must be non-negative and clearance positive");

    corridor_report rep;
    rep.r_used    = r;
    rep.clearance = clearance;
    if (r < clearance)
        rep.warnings.push_back("corridor radius " + std::to_string(r) + " m is below the clearance " +
                               std::to_string(clearance) + " m; hazards are limited to the radius");

    std::vector<int> owner(cloud.size(), -1);
    std::vector<point3> conductor_pts;
    std::vector<int> conductor_seg;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        for (auto id : segments[s]) {
            if (id >= cloud.size())
                throw std::out_of_range("segment point id " + std::to_string(id) + " outside the cloud");
            if (owner[id] != -1)
                throw std::invalid_argument("segments overlap at point " + std::to_string(id));
            owner[id] = static_cast<int>(s);
            conductor_pts.push_back(cloud.points[id]);
            conductor_seg.push_back(static_cast<int>(s));
        }
    }
    if (conductor_pts.empty())
        throw std::invalid_argument("corridor extraction needs conductor points");
    const kd_index index(conductor_pts);

    rep.classes.assign(cloud.size(), corridor_class::other);
    std::vector<double> dist(cloud.size(), -1.0);
    std::vector<int> nearest_seg(cloud.size(), -1);
    parallel_for(cloud.size(), [&](std::size_t i) {
        if (owner[i] != -1) {
            rep.classes[i] = corridor_class::conductor;
            return;
        }
        const auto hit = index.nearest_within(cloud.points[i], r);
        if (!hit)
            return;
        dist[i] = hit->distance;
        nearest_seg[i] = conductor_seg[hit->id];
        rep.classes[i] = hit->distance <= clearance ? corridor_class::hazard : corridor_class::corridor;
    });
    for (std::size_t i = 0; i < cloud.size(); ++i)
        if (rep.classes[i] == corridor_class::hazard)
            rep.hazard_points.push_back({i, dist[i], nearest_seg[i]});
    return rep;
}

} // namespace plcseg

#endif // PLCSEG_CORRIDOR_HPP
