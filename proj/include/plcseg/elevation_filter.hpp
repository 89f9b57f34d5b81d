#ifndef PLCSEG_ELEVATION_FILTER_HPP
#define PLCSEG_ELEVATION_FILTER_HPP

#include <plcseg/errors.hpp>
#include <plcseg/point_cloud.hpp>

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace plcseg {

struct elevation_filter_params
{
    int    nbin = 100; // equally spaced z-bins
    double beta = 4.0; // metres above the estimated ground

    void validate() const
    {
        if (nbin < 2)
            throw std::invalid_argument("nbin must be at least 2");
        if (!(beta > 0.0))
            throw std::invalid_argument("beta must be positive");
    }
};

struct elevation_report
{
    double ground_z         = 0.0;
    double cut_z            = 0.0;
    double removed_fraction = 0.0;
    std::size_t total       = 0;
    std::size_t removed     = 0;
};

struct elevation_result
{
    point_cloud              cloud;
    std::vector<std::size_t> kept; // ids into the input cloud, ascending
    elevation_report         report;
};

/**
 * Keeps the points strictly above ground_z + beta.
 *
 * The z-range [z_min, z_max] is split into nbin equal bins. The ground bin is the
 * most populous bin whose centre lies in the lower half of the range (lowest bin
 * on ties), and ground_z is that bin's upper edge. Single pass, input order kept.
 */
inline elevation_result filter_high_elevation(const point_cloud& cloud, const elevation_filter_params& params)
{
    params.validate();
    if (cloud.empty())
        throw std::invalid_argument("elevation filter needs a non-empty cloud");

    double z_min = cloud.points.front().z;
    double z_max = z_min;
    for (const auto& p : cloud.points) {
        z_min = std::min(z_min, p.z);
        z_max = std::max(z_max, p.z);
    }
    const double extent = z_max - z_min;
    if (!(extent > 0.0))
        throw std::invalid_argument("elevation filter needs a positive z-extent (all points share one height)");

    const auto   nbin  = static_cast<std::size_t>(params.nbin);
    const double width = extent / static_cast<double>(nbin);
    std::vector<std::size_t> counts(nbin, 0);
    for (const auto& p : cloud.points) {
        auto bin = static_cast<std::size_t>((p.z - z_min) / width);
        counts[std::min(bin, nbin - 1)]++;
    }

    const double mid = z_min + 0.5 * extent;
    std::size_t ground_bin = 0;
    for (std::size_t b = 1; b < nbin; ++b) {
        const double center = z_min + (static_cast<double>(b) + 0.5) * width;
        if (center > mid)
            break;
        if (counts[b] > counts[ground_bin])
            ground_bin = b;
    }

    elevation_result result;
    result.report.ground_z = z_min + static_cast<double>(ground_bin + 1) * width;
    result.report.cut_z    = result.report.ground_z + params.beta;
    result.report.total    = cloud.size();
    for (std::size_t i = 0; i < cloud.size(); ++i)
        if (cloud.points[i].z > result.report.cut_z)
            result.kept.push_back(i);
    result.report.removed          = cloud.size() - result.kept.size();
    result.report.removed_fraction = static_cast<double>(result.report.removed) / static_cast<double>(cloud.size());

    if (result.kept.empty())
        throw stage_error(error_code::no_high_elevation,
                          "no high-elevation points above cut z = " + std::to_string(result.report.cut_z));
    result.cloud = subset(cloud, result.kept);
    return result;
}

} // namespace plcseg

#endif // PLCSEG_ELEVATION_FILTER_HPP
