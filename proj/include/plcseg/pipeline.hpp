#ifndef PLCSEG_PIPELINE_HPP
#define PLCSEG_PIPELINE_HPP

#include <plcseg/catenary.hpp>
#include <plcseg/config.hpp>
#include <plcseg/corridor.hpp>
#include <plcseg/elevation_filter.hpp>
#include <plcseg/errors.hpp>
#include <plcseg/features.hpp>
#include <plcseg/kdtree.hpp>
#include <plcseg/point_cloud.hpp>
#include <plcseg/segmentation.hpp>

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace plcseg {

enum class stage { filter, features, segment, fit, corridor };

inline const char* to_string(stage s) noexcept
{
    switch (s) {
    case stage::filter: return "filter";
    case stage::features: return "features";
    case stage::segment: return "segment";
    case stage::fit: return "fit";
    case stage::corridor: return "corridor";
    }
    return "?";
}

inline stage parse_stage(std::string_view name)
{
    for (auto s : {stage::filter, stage::features, stage::segment, stage::fit, stage::corridor})
        if (name == to_string(s))
            return s;
    throw config_error("unknown stage '" + std::string(name) + "'");
}

struct stage_timing
{
    std::string name;
    double      ms = 0.0;
};

struct segment_fit
{
    int                           segment_id = 0;
    quadratic_model               quadratic;
    std::optional<catenary_model> catenary;
    std::string                   catenary_error; // set when the catenary was not fitted
    sag_report                    sag;

    [[nodiscard]] conductor_model best() const
    {
        if (catenary)
            return *catenary;
        return quadratic;
    }
};

/// Product of a candidate stage: points after selection, outlier removal and rotation.
struct candidate_stage
{
    std::vector<std::size_t>  candidate_ids; // into the stage input, before outlier removal
    std::vector<std::size_t>  inlier_ids;    // into the stage input, after outlier removal
    outlier_stats             outliers;
    regularization_transform  transform;
    point_cloud               regularized;   // aligned with inlier_ids
};

/// Candidate selection, statistical outlier removal and regularization over `high`.
inline candidate_stage extract_candidates(const point_cloud& high, std::span<const eigen_features> features,
                                          const candidate_params& params, int outlier_k)
{
    candidate_stage out;
    out.candidate_ids = select_candidate_ids(features, params);
    const point_cloud candidates = subset(high, out.candidate_ids);
    if (candidates.size() <= static_cast<std::size_t>(outlier_k))
        throw stage_error(error_code::no_candidates,
                          "no power-line candidates: only " + std::to_string(candidates.size()) +
                              " points left for outlier removal");
    const auto kept = statistical_inlier_ids(candidates, outlier_k, params.filt_mult, &out.outliers);
    out.inlier_ids.reserve(kept.size());
    for (auto k : kept)
        out.inlier_ids.push_back(out.candidate_ids[k]);
    const point_cloud inliers = subset(high, out.inlier_ids);
    out.transform   = estimate_regularization(inliers);
    out.regularized = apply_transform(inliers, out.transform);
    return out;
}

inline std::vector<profile_point> profile_of(const point_cloud& regularized, const power_line_segment& seg)
{
    std::vector<profile_point> pts;
    pts.reserve(seg.point_ids.size());
    for (auto id : seg.point_ids)
        pts.push_back({regularized.points[id].y, regularized.points[id].z});
    return pts;
}

/// MSAC quadratic, then the catenary seeded from the least-squares quadratic, then sag.
inline segment_fit fit_segment(const point_cloud& regularized, const power_line_segment& seg, const fit_params& p)
{
    const auto pts = profile_of(regularized, seg);
    segment_fit fit;
    fit.segment_id = seg.segment_id;
    fit.quadratic  = fit_quadratic_msac(pts, {p.inlier_tol, p.msac_iterations, p.seed});
    try {
        auto cat = fit_catenary(pts);
        if (p.weight)
            cat.set_weight(*p.weight);
        fit.catenary = cat;
    } catch (const catenary_fit_error& e) {
        fit.catenary_error = e.what();
    } catch (const std::invalid_argument& e) {
        fit.catenary_error = e.what();
    }
    fit.sag = assess_sag(fit.best(), pts, p.hazard_tol, p.sag_limit);
    return fit;
}

struct pipeline_result
{
    std::size_t input_count = 0;
    double      area_m2     = 0.0; // XY bounding box of the input

    elevation_report         elevation;
    std::vector<std::size_t> high_ids; // into the input

    std::size_t              candidate_count = 0;
    candidate_stage          candidates;
    std::vector<std::size_t> regularized_origin; // regularized point -> input id

    std::vector<power_line_segment> segments;   // ids into candidates.regularized
    std::vector<segment_fit>        fits;
    std::optional<radius_selection> radius;
    std::optional<corridor_report>  corridor;

    std::vector<stage_timing> timings;
    stage                     last_stage = stage::filter;

    [[nodiscard]] double total_ms() const
    {
        double t = 0.0;
        for (const auto& s : timings)
            t += s.ms;
        return t;
    }
    [[nodiscard]] double ms_per_m2() const { return area_m2 > 0.0 ? total_ms() / area_m2 : 0.0; }
    [[nodiscard]] std::size_t segmented_count() const
    {
        std::size_t n = 0;
        for (const auto& s : segments)
            n += s.point_ids.size();
        return n;
    }

    /// Segment member ids mapped back to the input cloud.
    [[nodiscard]] std::vector<std::vector<std::size_t>> segment_input_ids() const
    {
        std::vector<std::vector<std::size_t>> out;
        for (const auto& s : segments) {
            std::vector<std::size_t> ids;
            ids.reserve(s.point_ids.size());
            for (auto id : s.point_ids)
                ids.push_back(regularized_origin[id]);
            out.push_back(std::move(ids));
        }
        return out;
    }
};

class stage_clock
{
  public:
    explicit stage_clock(std::vector<stage_timing>& sink) : sink_(sink) {}
    void lap(std::string name)
    {
        const auto now = std::chrono::steady_clock::now();
        sink_.push_back({std::move(name), std::chrono::duration<double, std::milli>(now - start_).count()});
        start_ = now;
    }

  private:
    std::vector<stage_timing>&            sink_;
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

namespace detail {

/// Runs one stage, prefixing plcseg errors with the stage name.
template <class Fn>
void in_stage(stage s, Fn&& fn)
{
    try {
        fn();
    } catch (const error& e) {
        throw error(e.code(), std::string(to_string(s)) + " stage: " + e.what());
    }
}

} // namespace detail

/**
 * filter -> features/candidates -> outlier removal -> regularization -> two-stage
 * segmentation -> per-segment fits -> corridor classification, stopping after
 * `stop_after`. Stage failures propagate as plcseg::error with their exit code.
 */
inline pipeline_result run_pipeline(const point_cloud& cloud, const pipeline_config& config,
                                    stage stop_after = stage::corridor)
{
    if (cloud.empty())
        throw io_error("input contains no points");

    pipeline_result res;
    res.input_count = cloud.size();
    const auto box  = bounds(cloud.points);
    res.area_m2     = (box.max.x - box.min.x) * (box.max.y - box.min.y);
    stage_clock clock(res.timings);

    validate(config);
    elevation_result elev;
    detail::in_stage(stage::filter, [&] { elev = filter_high_elevation(cloud, config.elevation); });
    res.elevation = elev.report;
    res.high_ids  = std::move(elev.kept);
    clock.lap("filter");
    res.last_stage = stage::filter;
    if (stop_after == stage::filter)
        return res;

    detail::in_stage(stage::features, [&] {
        const kd_index index(elev.cloud);
        const auto features = compute_eigen_features(index, elev.cloud, config.candidates.k_neighbors);
        res.candidates = extract_candidates(elev.cloud, features, config.candidates, config.outlier_k);
    });
    res.candidate_count = res.candidates.candidate_ids.size();
    res.regularized_origin.reserve(res.candidates.inlier_ids.size());
    for (auto id : res.candidates.inlier_ids)
        res.regularized_origin.push_back(res.high_ids[id]);
    clock.lap("features");
    res.last_stage = stage::features;
    if (stop_after == stage::features)
        return res;

    detail::in_stage(stage::segment, [&] {
        res.segments = segment_power_lines(res.candidates.regularized, config.stage1, config.stage2);
    });
    clock.lap("segment");
    res.last_stage = stage::segment;
    if (stop_after == stage::segment)
        return res;

    detail::in_stage(stage::fit, [&] {
        for (const auto& seg : res.segments)
            res.fits.push_back(fit_segment(res.candidates.regularized, seg, config.fit));
    });
    clock.lap("fit");
    res.last_stage = stage::fit;
    if (stop_after == stage::fit)
        return res;

    detail::in_stage(stage::corridor, [&] {
        const auto conductors = res.segment_input_ids();
        std::vector<conductor_model> models;
        for (const auto& f : res.fits) {
            if (config.corridor.mode == environment_mode::open)
                models.emplace_back(f.quadratic);
            else
                models.push_back(f.best());
        }
        if (config.corridor.mode == environment_mode::complex && !config.corridor.r_override) {
            const point_cloud rotated = apply_transform(cloud, res.candidates.transform);
            res.radius = select_radius(rotated, conductors, models, config.corridor);
        } else {
            res.radius = select_radius(point_cloud{}, conductors, models, config.corridor);
        }
        res.corridor = extract_corridor(cloud, conductors, res.radius->r, config.corridor.clearance);
    });
    clock.lap("corridor");
    res.last_stage = stage::corridor;
    return res;
}

} // namespace plcseg

#endif // PLCSEG_PIPELINE_HPP
