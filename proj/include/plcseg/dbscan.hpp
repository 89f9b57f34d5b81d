#ifndef PLCSEG_DBSCAN_HPP
#define PLCSEG_DBSCAN_HPP

#include <plcseg/kdtree.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace plcseg {

struct dbscan_params
{
    double eps     = 0.2;
    int    min_pts = 50; // counts the point itself

    void validate() const
    {
        if (!(eps > 0.0))
            throw std::invalid_argument("eps must be positive");
        if (min_pts < 1)
            throw std::invalid_argument("min_pts must be at least 1");
    }
};

inline constexpr int noise_label = -1;

struct cluster_labels
{
    std::vector<int>  labels; // noise_label or a cluster id in [0, cluster_count)
    std::vector<bool> core;
    int               cluster_count = 0;
};

/**
 * Classical DBSCAN. A point is core when at least min_pts points (itself included)
 * lie within eps. Clusters are grown from unvisited core points taken in ascending
 * id order; a border point belongs to the first cluster that reaches it.
 */
template <std::size_t Dim>
cluster_labels dbscan(std::span<const std::array<double, Dim>> points, const dbscan_params& params)
{
    params.validate();
    if (points.empty())
        throw std::invalid_argument("dbscan needs at least one point");

    constexpr int unvisited = -2;
    const basic_kd_tree<Dim> tree(std::vector<std::array<double, Dim>>(points.begin(), points.end()));
    const auto min_pts = static_cast<std::size_t>(params.min_pts);

    cluster_labels out;
    out.labels.assign(points.size(), unvisited);
    out.core.assign(points.size(), false);

    std::vector<std::size_t> hood;
    std::vector<std::size_t> frontier;
    auto neighbors = [&](std::size_t i) {
        hood.clear();
        tree.for_each_in_radius(points[i], params.eps, [&](std::size_t j) { hood.push_back(j); });
        return hood.size() >= min_pts;
    };

    for (std::size_t seed = 0; seed < points.size(); ++seed) {
        if (out.labels[seed] != unvisited)
            continue;
        if (!neighbors(seed)) {
            out.labels[seed] = noise_label;
            continue;
        }
        const int cluster = out.cluster_count++;
        out.labels[seed]  = cluster;
        out.core[seed]    = true;
        frontier.clear();
        for (auto j : hood)
            if (out.labels[j] == unvisited || out.labels[j] == noise_label)
                frontier.push_back(j);

        while (!frontier.empty()) {
            const std::size_t j = frontier.back();
            frontier.pop_back();
            if (out.labels[j] == noise_label) {
                out.labels[j] = cluster; // border
                continue;
            }
            if (out.labels[j] != unvisited)
                continue;
            out.labels[j] = cluster;
            if (neighbors(j)) {
                out.core[j] = true;
                for (auto m : hood)
                    if (out.labels[m] == unvisited || out.labels[m] == noise_label)
                        frontier.push_back(m);
            }
        }
    }
    return out;
}

template <std::size_t Dim>
cluster_labels dbscan(const std::vector<std::array<double, Dim>>& points, const dbscan_params& params)
{
    return dbscan<Dim>(std::span<const std::array<double, Dim>>(points), params);
}

} // namespace plcseg

#endif // PLCSEG_DBSCAN_HPP
