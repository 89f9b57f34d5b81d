#ifndef PLCSEG_REPORT_HPP
#define PLCSEG_REPORT_HPP

#include <plcseg/config.hpp>
#include <plcseg/pipeline.hpp>
#include <plcseg/tuner.hpp>

#include <json.hpp>

#include <string>
#include <variant>

namespace plcseg {

namespace detail {

inline json point_json(const point3& p) { return json::array({p.x, p.y, p.z}); }

inline json model_json(const conductor_model& m)
{
    if (const auto* c = std::get_if<catenary_model>(&m)) {
        json j = {{"type", "catenary"}, {"a", c->a}, {"b", c->b}, {"c", c->c}, {"iterations", c->iterations},
                  {"converged", c->converged}};
        if (c->w) {
            j["w"]  = *c->w;
            j["t0"] = *c->t0;
        }
        return j;
    }
    const auto& q = std::get<quadratic_model>(m);
    return {{"type", "quadratic"}, {"a2", q.a2}, {"a1", q.a1}, {"a0", q.a0}};
}

inline double model_rmse(const conductor_model& m)
{
    return std::visit([](const auto& model) { return model.rmse; }, m);
}

} // namespace detail

/**
 * JSON report of a pipeline run. Segment summaries are in input coordinates and
 * fits in the regularized frame. Wall-clock numbers live only under "timings_ms"
 * and "runtime_ms_per_m2", so two runs differ nowhere else.
 */
inline json pipeline_report(const point_cloud& input, const pipeline_result& r, const pipeline_config& config)
{
    json rep;
    rep["last_stage"] = to_string(r.last_stage);
    rep["config"]     = to_json(config);
    rep["area_m2"]    = r.area_m2;

    json counts = {{"input", r.input_count}, {"high_elevation", r.high_ids.size()}};
    if (r.last_stage != stage::filter) {
        counts["candidates"]        = r.candidate_count;
        counts["outlier_filtered"]  = r.candidates.inlier_ids.size();
    }
    if (r.last_stage >= stage::segment)
        counts["segmented"] = r.segmented_count();
    rep["counts"] = counts;

    rep["elevation"] = {{"ground_z", r.elevation.ground_z},
                        {"cut_z", r.elevation.cut_z},
                        {"removed_fraction", r.elevation.removed_fraction},
                        {"total", r.elevation.total},
                        {"removed", r.elevation.removed}};

    if (r.last_stage != stage::filter) {
        const auto& t = r.candidates.transform;
        rep["regularization"] = {{"theta_rad", t.theta},
                                 {"theta_check_rad", t.theta_check},
                                 {"pivot", detail::point_json(t.pivot)}};
        rep["outliers"] = {{"mean", r.candidates.outliers.mean},
                           {"stddev", r.candidates.outliers.stddev},
                           {"threshold", r.candidates.outliers.threshold}};
    }

    if (r.last_stage >= stage::segment) {
        json segs = json::array();
        const auto ids = r.segment_input_ids();
        for (std::size_t s = 0; s < r.segments.size(); ++s) {
            const auto sum = summarize(input, {r.segments[s].segment_id, ids[s], 0, 0});
            segs.push_back({{"id", sum.segment_id},
                            {"point_count", sum.point_count},
                            {"centroid", detail::point_json(sum.centroid)},
                            {"bbox", {{"min", detail::point_json(sum.box.min)},
                                      {"max", detail::point_json(sum.box.max)}}}});
        }
        rep["segments"] = segs;
    }

    if (r.last_stage >= stage::fit) {
        json fits = json::array();
        for (const auto& f : r.fits) {
            const auto best = f.best();
            json j = {{"segment_id", f.segment_id},
                      {"model", detail::model_json(best)},
                      {"rmse", detail::model_rmse(best)},
                      {"quadratic", detail::model_json(f.quadratic)},
                      {"quadratic_inliers", f.quadratic.inlier_ids.size()},
                      {"sag_depth", f.sag.sag_depth},
                      {"vertex_y", f.sag.vertex_y},
                      {"residual_p95", f.sag.residual_p95},
                      {"hazard", f.sag.hazard},
                      {"hazard_determined", f.sag.hazard_determined}};
            if (!f.catenary_error.empty())
                j["catenary_error"] = f.catenary_error;
            fits.push_back(j);
        }
        rep["fits"] = fits;
    }

    if (r.corridor) {
        const auto& c = *r.corridor;
        json hazards = json::array();
        for (const auto& h : c.hazard_points)
            hazards.push_back({{"id", h.id}, {"distance", h.distance}, {"segment_id", h.segment_id}});
        rep["corridor"] = {{"r_used", c.r_used},
                           {"clearance", c.clearance},
                           {"radius", {{"delta_z", r.radius->delta_z},
                                       {"d_i", r.radius->d_i},
                                       {"max_a0", r.radius->max_a0},
                                       {"overridden", r.radius->overridden}}},
                           {"counts", {{"other", c.count(corridor_class::other)},
                                       {"corridor", c.count(corridor_class::corridor)},
                                       {"hazard", c.count(corridor_class::hazard)},
                                       {"conductor", c.count(corridor_class::conductor)}}},
                           {"hazard_points", hazards},
                           {"warnings", c.warnings}};
    }

    json timings = json::object();
    for (const auto& t : r.timings)
        timings[t.name] = t.ms;
    timings["total"] = r.total_ms();
    rep["timings_ms"] = timings;
    rep["runtime_ms_per_m2"] = r.ms_per_m2();
    return rep;
}

inline json to_json(const grid_cell& c)
{
    return {{"nbin", c.nbin},         {"beta", c.beta},       {"r", c.r},
            {"ln_thres", c.ln_thres}, {"alpha_thres", c.alpha_thres},
            {"filt_mult", c.filt_mult}, {"eps", c.eps},       {"min_pts", c.min_pts}};
}

inline json tune_report(const tune_result& t)
{
    json table = json::array();
    for (const auto& cs : t.table) {
        json row = {{"cell", to_json(cs.cell)},
                    {"score", cs.score},
                    {"segments", cs.segments},
                    {"covered", cs.covered},
                    {"mean_linearity", cs.mean_linearity}};
        if (!cs.error.empty())
            row["error"] = cs.error;
        table.push_back(row);
    }
    return {{"best_cell", to_json(t.best_cell)},
            {"score", t.score},
            {"evaluated", t.evaluated},
            {"best_config", to_json(t.best_config)},
            {"table", table}};
}

} // namespace plcseg

#endif // PLCSEG_REPORT_HPP
