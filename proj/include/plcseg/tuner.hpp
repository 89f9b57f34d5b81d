#ifndef PLCSEG_TUNER_HPP
#define PLCSEG_TUNER_HPP

#include <plcseg/config.hpp>
#include <plcseg/elevation_filter.hpp>
#include <plcseg/errors.hpp>
#include <plcseg/features.hpp>
#include <plcseg/kdtree.hpp>
#include <plcseg/pipeline.hpp>
#include <plcseg/segmentation.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace plcseg {

/// One grid cell. Field order is the lexicographic tie-break order.
struct grid_cell
{
    int    nbin        = 100;
    double beta        = 4.0;
    double r           = 0.6;
    double ln_thres    = 0.82;
    double alpha_thres = 5.0;
    double filt_mult   = 4.0;
    double eps         = 0.2;
    int    min_pts     = 50;

    [[nodiscard]] auto tuple() const { return std::tie(nbin, beta, r, ln_thres, alpha_thres, filt_mult, eps, min_pts); }
};

struct cell_score
{
    grid_cell   cell;
    double      score          = 0.0;
    std::size_t segments       = 0;
    double      covered        = 0.0; // fraction of candidates inside segments
    double      mean_linearity = 0.0;
    std::string error;                // why the cell scored zero, if it failed
};

struct tune_result
{
    pipeline_config         best_config;
    grid_cell               best_cell;
    double                  score     = 0.0;
    std::size_t             evaluated = 0;
    std::vector<cell_score> table; // grid order
};

/// Linearity of a segment's overall covariance.
inline double segment_linearity(const point_cloud& cloud, const power_line_segment& seg)
{
    std::vector<point3> pts;
    pts.reserve(seg.point_ids.size());
    for (auto id : seg.point_ids)
        pts.push_back(cloud.points[id]);
    if (pts.size() < 3)
        return 0.0;
    return features_from_covariance(covariance(pts), pts.size()).ln;
}

/// covered fraction x mean segment linearity, zero without segments.
inline double segmentation_score(const point_cloud& regularized, const std::vector<power_line_segment>& segments,
                                 double* covered = nullptr, double* mean_ln = nullptr)
{
    if (segments.empty() || regularized.empty())
        return 0.0;
    std::size_t in_segments = 0;
    double ln_sum = 0.0;
    for (const auto& s : segments) {
        in_segments += s.point_ids.size();
        ln_sum += segment_linearity(regularized, s);
    }
    const double frac = static_cast<double>(in_segments) / static_cast<double>(regularized.size());
    const double ln   = ln_sum / static_cast<double>(segments.size());
    if (covered)
        *covered = frac;
    if (mean_ln)
        *mean_ln = ln;
    return frac * ln;
}

/// True when `a` beats `b`: higher score, then smaller eps, larger min_pts, then the
/// lexicographically smaller parameter tuple.
inline bool better_cell(const cell_score& a, const cell_score& b)
{
    if (a.score != b.score)
        return a.score > b.score;
    if (a.cell.eps != b.cell.eps)
        return a.cell.eps < b.cell.eps;
    if (a.cell.min_pts != b.cell.min_pts)
        return a.cell.min_pts > b.cell.min_pts;
    return a.cell.tuple() < b.cell.tuple();
}

inline pipeline_config apply_cell(pipeline_config base, const grid_cell& c)
{
    base.elevation.nbin         = c.nbin;
    base.elevation.beta         = c.beta;
    base.corridor.r_override    = c.r;
    base.candidates.ln_thres    = c.ln_thres;
    base.candidates.alpha_thres = c.alpha_thres;
    base.candidates.filt_mult   = c.filt_mult;
    base.stage1.eps     = c.eps;
    base.stage1.min_pts = c.min_pts;
    base.stage2.eps     = c.eps;
    base.stage2.min_pts = c.min_pts;
    return base;
}

/**
 * Exhaustive grid search through segmentation. Cells are enumerated in
 * lexicographic order of (nbin, beta, r, ln_thres, alpha_thres, filt_mult, eps,
 * min_pts); an empty list falls back to the base config's value. Stage products are
 * reused along shared prefixes, and r, which the score ignores, reuses the score of
 * an identical cell with a different r. Failing cells score 0.
 */
inline tune_result tune(const point_cloud& cloud, const param_grid& grid, const pipeline_config& base = {})
{
    validate(grid);
    if (cloud.empty())
        throw io_error("tuning needs a non-empty cloud");

    auto or_base = [](auto values, auto fallback) {
        if (values.empty())
            values.push_back(fallback);
        return values;
    };
    const auto nbins  = or_base(grid.nbin, base.elevation.nbin);
    const auto betas  = or_base(grid.beta, base.elevation.beta);
    const auto rs     = or_base(grid.r, base.corridor.r_override.value_or(0.6));
    const auto lns    = or_base(grid.ln_thres, base.candidates.ln_thres);
    const auto alphas = or_base(grid.alpha_thres, base.candidates.alpha_thres);
    const auto filts  = or_base(grid.filt_mult, base.candidates.filt_mult);
    const auto epss   = or_base(grid.eps, base.stage1.eps);
    const auto mins   = or_base(grid.min_pts, base.stage1.min_pts);

    using score_key = std::tuple<int, double, double, double, double, double, int>;
    std::map<score_key, cell_score> memo;

    // prefix caches, valid for the most recent key only
    std::optional<std::pair<int, double>> elev_key;
    std::optional<elevation_result> elev;
    std::vector<eigen_features> features;
    std::string elev_error;

    std::optional<std::tuple<int, double, double, double, double>> cand_key;
    std::optional<candidate_stage> cand;
    std::string cand_error;

    tune_result result;
    for (int nbin : nbins)
        for (double beta : betas)
            for (double r : rs)
                for (double ln : lns)
                    for (double alpha : alphas)
                        for (double filt : filts)
                            for (double eps : epss)
                                for (int min_pts : mins) {
                                    const grid_cell cell{nbin, beta, r, ln, alpha, filt, eps, min_pts};
                                    const score_key key{nbin, beta, ln, alpha, filt, eps, min_pts};
                                    cell_score cs;
                                    if (auto hit = memo.find(key); hit != memo.end()) {
                                        cs = hit->second;
                                    } else {
                                        const pipeline_config cfg = apply_cell(base, cell);
                                        if (!elev_key || *elev_key != std::pair{nbin, beta}) {
                                            elev_key = std::pair{nbin, beta};
                                            elev.reset();
                                            features.clear();
                                            elev_error.clear();
                                            cand_key.reset();
                                            try {
                                                elev = filter_high_elevation(cloud, cfg.elevation);
                                                const kd_index index(elev->cloud);
                                                features = compute_eigen_features(index, elev->cloud,
                                                                                  cfg.candidates.k_neighbors);
                                            } catch (const std::exception& e) {
                                                elev.reset();
                                                elev_error = e.what();
                                            }
                                        }
                                        const auto ck = std::tuple{nbin, beta, ln, alpha, filt};
                                        if (elev && (!cand_key || *cand_key != ck)) {
                                            cand_key = ck;
                                            cand.reset();
                                            cand_error.clear();
                                            try {
                                                cand = extract_candidates(elev->cloud, features, cfg.candidates,
                                                                          cfg.outlier_k);
                                            } catch (const std::exception& e) {
                                                cand_error = e.what();
                                            }
                                        }
                                        if (!elev) {
                                            cs.error = elev_error;
                                        } else if (!cand) {
                                            cs.error = cand_error;
                                        } else {
                                            try {
                                                const auto segs = segment_power_lines(cand->regularized, cfg.stage1,
                                                                                      cfg.stage2);
                                                cs.segments = segs.size();
                                                cs.score = segmentation_score(cand->regularized, segs, &cs.covered,
                                                                              &cs.mean_linearity);
                                            } catch (const std::exception& e) {
                                                cs.error = e.what();
                                            }
                                        }
                                        memo.emplace(key, cs);
                                        ++result.evaluated;
                                    }
                                    cs.cell = cell;
                                    result.table.push_back(cs);
                                }

    const cell_score* best = nullptr;
    for (const auto& cs : result.table)
        if (!best || better_cell(cs, *best))
            best = &cs;
    if (!best || !(best->score > 0.0))
        throw stage_error(error_code::no_segments, "no power line found under any configuration");
    result.best_cell   = best->cell;
    result.score       = best->score;
    result.best_config = apply_cell(base, best->cell);
    return result;
}

} // namespace plcseg

#endif // PLCSEG_TUNER_HPP
