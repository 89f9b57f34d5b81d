#ifndef PLCSEG_SEGMENTATION_HPP
#define PLCSEG_SEGMENTATION_HPP

#include <plcseg/dbscan.hpp>
#include <plcseg/errors.hpp>
#include <plcseg/point_cloud.hpp>

#include <array>
#include <cstddef>
#include <vector>

namespace plcseg {

struct power_line_segment
{
    int                      segment_id = 0;
    std::vector<std::size_t> point_ids; // into the segmented cloud, ascending
    int                      stage1_id  = 0;
    int                      stage2_id  = 0;
};

/**
 * Two-stage DBSCAN over a cloud whose conductors run along Y.
 *
 * Stage 1 clusters the XZ projection, which separates conductors by their cross-
 * section position. Stage 2 clusters every stage-1 cluster on Y alone, splitting a
 * conductor at gaps such as pylons. Noise from either stage is dropped, as is any
 * stage-2 cluster smaller than stage2.min_pts. Segments are ordered by
 * (stage1_id, stage2_id) and numbered from 0.
 */
inline std::vector<power_line_segment> segment_power_lines(const point_cloud& regularized, const dbscan_params& stage1,
                                                           const dbscan_params& stage2)
{
    stage1.validate();
    stage2.validate();
    if (regularized.empty())
        throw stage_error(error_code::no_segments, "no power line found: empty candidate cloud");

    std::vector<std::array<double, 2>> cross_section;
    cross_section.reserve(regularized.size());
    for (const auto& p : regularized.points)
        cross_section.push_back({p.x, p.z});
    const auto first = dbscan<2>(cross_section, stage1);

    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(first.cluster_count));
    for (std::size_t i = 0; i < regularized.size(); ++i)
        if (first.labels[i] != noise_label)
            members[static_cast<std::size_t>(first.labels[i])].push_back(i);

    std::vector<power_line_segment> segments;
    for (std::size_t c = 0; c < members.size(); ++c) {
        const auto& ids = members[c];
        std::vector<std::array<double, 1>> along;
        along.reserve(ids.size());
        for (auto id : ids)
            along.push_back({regularized.points[id].y});
        const auto second = dbscan<1>(along, stage2);

        std::vector<std::vector<std::size_t>> spans(static_cast<std::size_t>(second.cluster_count));
        for (std::size_t j = 0; j < ids.size(); ++j)
            if (second.labels[j] != noise_label)
                spans[static_cast<std::size_t>(second.labels[j])].push_back(ids[j]);
        for (std::size_t s = 0; s < spans.size(); ++s) {
            if (spans[s].size() < static_cast<std::size_t>(stage2.min_pts))
                continue;
            power_line_segment seg;
            seg.segment_id = static_cast<int>(segments.size());
            seg.point_ids  = std::move(spans[s]);
            seg.stage1_id  = static_cast<int>(c);
            seg.stage2_id  = static_cast<int>(s);
            segments.push_back(std::move(seg));
        }
    }
    if (segments.empty())
        throw stage_error(error_code::no_segments, "no power line found");
    return segments;
}

struct segment_summary
{
    int          segment_id  = 0;
    std::size_t  point_count = 0;
    point3       centroid{};
    bounding_box box{};
};

inline segment_summary summarize(const point_cloud& cloud, const power_line_segment& seg)
{
    std::vector<point3> pts;
    pts.reserve(seg.point_ids.size());
    for (auto id : seg.point_ids)
        pts.push_back(cloud.points[id]);
    return {seg.segment_id, pts.size(), centroid(pts), bounds(pts)};
}

} // namespace plcseg

#endif // PLCSEG_SEGMENTATION_HPP
