#ifndef PLCSEG_KDTREE_HPP
#define PLCSEG_KDTREE_HPP

#include <plcseg/errors.hpp>
#include <plcseg/point_cloud.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace plcseg {

struct neighbor
{
    std::size_t id       = 0;
    double      distance = 0.0;

    friend bool operator==(const neighbor&, const neighbor&) = default;
};

/**
 * Exact k-nearest-neighbour and fixed-radius search over an immutable point set.
 *
 * Construction splits each node on its widest-spread axis at the median element,
 * ordering equal coordinates by point id, so the tree is a pure function of the
 * input order. Leaves hold up to `leaf_size` points stored contiguously.
 *
 * Distances are compared in squared form. knn() orders by (distance, id); radius
 * queries are inclusive (squared distance <= r*r). Queries are const and may run
 * concurrently.
 */
template <std::size_t Dim>
class basic_kd_tree
{
    static_assert(Dim >= 1 && Dim <= 3);

  public:
    using coord = std::array<double, Dim>;

    static constexpr std::size_t default_leaf_size = 16;

    explicit basic_kd_tree(std::vector<coord> points, std::size_t leaf_size = default_leaf_size)
        : leaf_size_(leaf_size)
    {
        if (points.empty())
            throw std::invalid_argument("cannot build a spatial index over an empty point set");
        if (leaf_size_ == 0)
            throw std::invalid_argument("leaf size must be positive");
        if (points.size() > std::numeric_limits<std::uint32_t>::max())
            throw std::invalid_argument("point set too large for the index");

        std::vector<std::uint32_t> order(points.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = static_cast<std::uint32_t>(i);
        nodes_.reserve(2 * points.size() / leaf_size_ + 1);
        build(points, order, 0, static_cast<std::uint32_t>(order.size()), 0);

        pts_.resize(points.size());
        ids_.resize(points.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            pts_[i] = points[order[i]];
            ids_[i] = order[i];
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return pts_.size(); }
    [[nodiscard]] std::size_t depth() const noexcept { return depth_; }
    [[nodiscard]] std::size_t leaf_size() const noexcept { return leaf_size_; }

    /// The k nearest points, ascending by (distance, id).
    [[nodiscard]] std::vector<neighbor> knn(const coord& q, std::size_t k) const
    {
        if (k == 0)
            throw std::invalid_argument("k must be positive");
        if (k > size())
            throw std::invalid_argument("k = " + std::to_string(k) + " exceeds the " + std::to_string(size()) +
                                        " indexed points");
        return bounded_knn(q, k, std::numeric_limits<double>::infinity());
    }

    /// Nearest point with squared distance <= r*r, if any.
    [[nodiscard]] std::optional<neighbor> nearest_within(const coord& q, double r) const
    {
        check_radius(r);
        auto found = bounded_knn(q, 1, r * r);
        if (found.empty())
            return std::nullopt;
        return found.front();
    }

    /// Ids with distance <= r, ascending.
    [[nodiscard]] std::vector<std::size_t> radius(const coord& q, double r) const
    {
        std::vector<std::size_t> out;
        for_each_in_radius(q, r, [&](std::size_t id) { out.push_back(id); });
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Calls fn(id) for every point within r, in tree order.
    template <class Fn>
    void for_each_in_radius(const coord& q, double r, Fn&& fn) const
    {
        check_radius(r);
        const double r2 = r * r;
        visit_radius(0, q, r2, fn);
    }

    /// Number of points within r, stopping early once `limit` is reached.
    [[nodiscard]] std::size_t count_in_radius(const coord& q, double r,
                                              std::size_t limit = std::numeric_limits<std::size_t>::max()) const
    {
        check_radius(r);
        std::size_t count = 0;
        count_radius(0, q, r * r, limit, count);
        return count;
    }

  private:
    struct node
    {
        std::uint32_t begin = 0;
        std::uint32_t end   = 0;
        std::uint32_t left  = 0;
        std::uint32_t right = 0;
        std::int32_t  axis  = -1; // -1 marks a leaf
        double        split = 0.0;
        coord         lo{};
        coord         hi{};
    };

    struct candidate
    {
        double        d2;
        std::uint32_t id;
        bool operator<(const candidate& o) const noexcept { return d2 < o.d2 || (d2 == o.d2 && id < o.id); }
    };

    static void check_radius(double r)
    {
        if (!(r >= 0.0))
            throw std::invalid_argument("search radius must be non-negative");
    }

    static double box_sq_dist(const node& n, const coord& q) noexcept
    {
        double s = 0.0;
        for (std::size_t d = 0; d < Dim; ++d) {
            const double t = q[d] < n.lo[d] ? n.lo[d] - q[d] : (q[d] > n.hi[d] ? q[d] - n.hi[d] : 0.0);
            s += t * t;
        }
        return s;
    }

    static double sq_dist(const coord& a, const coord& b) noexcept
    {
        double s = 0.0;
        for (std::size_t d = 0; d < Dim; ++d) {
            const double t = a[d] - b[d];
            s += t * t;
        }
        return s;
    }

    std::uint32_t build(const std::vector<coord>& points, std::vector<std::uint32_t>& order, std::uint32_t begin,
                        std::uint32_t end, std::size_t level)
    {
        const auto self = static_cast<std::uint32_t>(nodes_.size());
        coord lo = points[order[begin]];
        coord hi = lo;
        for (std::uint32_t i = begin + 1; i < end; ++i) {
            const auto& p = points[order[i]];
            for (std::size_t d = 0; d < Dim; ++d) {
                lo[d] = std::min(lo[d], p[d]);
                hi[d] = std::max(hi[d], p[d]);
            }
        }
        nodes_.push_back({begin, end, 0, 0, -1, 0.0, lo, hi});
        depth_ = std::max(depth_, level);
        if (end - begin <= leaf_size_)
            return self;
        std::size_t axis = 0;
        for (std::size_t d = 1; d < Dim; ++d)
            if (hi[d] - lo[d] > hi[axis] - lo[axis])
                axis = d;

        const std::uint32_t mid = begin + (end - begin) / 2;
        std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                         [&](std::uint32_t a, std::uint32_t b) {
                             const double ca = points[a][axis];
                             const double cb = points[b][axis];
                             return ca < cb || (ca == cb && a < b);
                         });
        const double split = points[order[mid]][axis];

        const std::uint32_t left  = build(points, order, begin, mid, level + 1);
        const std::uint32_t right = build(points, order, mid, end, level + 1);
        auto& n = nodes_[self];
        n.axis  = static_cast<std::int32_t>(axis);
        n.split = split;
        n.left  = left;
        n.right = right;
        return self;
    }

    std::vector<neighbor> bounded_knn(const coord& q, std::size_t k, double max_d2) const
    {
        std::vector<candidate> heap;
        heap.reserve(k + 1);
        visit_knn(0, q, k, max_d2, heap);
        std::sort_heap(heap.begin(), heap.end());
        std::vector<neighbor> out;
        out.reserve(heap.size());
        for (const auto& c : heap)
            out.push_back({c.id, std::sqrt(c.d2)});
        return out;
    }

    void visit_knn(std::uint32_t ni, const coord& q, std::size_t k, double max_d2, std::vector<candidate>& heap) const
    {
        const node& n = nodes_[ni];
        if (n.axis < 0) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) {
                const double d2 = sq_dist(q, pts_[i]);
                if (d2 > max_d2)
                    continue;
                const candidate c{d2, ids_[i]};
                if (heap.size() < k) {
                    heap.push_back(c);
                    std::push_heap(heap.begin(), heap.end());
                } else if (c < heap.front()) {
                    std::pop_heap(heap.begin(), heap.end());
                    heap.back() = c;
                    std::push_heap(heap.begin(), heap.end());
                }
            }
            return;
        }
        const double dl = box_sq_dist(nodes_[n.left], q);
        const double dr = box_sq_dist(nodes_[n.right], q);
        const bool   left_first = dl <= dr;
        const std::uint32_t first  = left_first ? n.left : n.right;
        const std::uint32_t second = left_first ? n.right : n.left;
        const double d_first  = left_first ? dl : dr;
        const double d_second = left_first ? dr : dl;
        // equal distances must still be visited: the other side may hold a lower id
        auto worth = [&](double d2) { return d2 <= max_d2 && (heap.size() < k || d2 <= heap.front().d2); };
        if (worth(d_first))
            visit_knn(first, q, k, max_d2, heap);
        if (worth(d_second))
            visit_knn(second, q, k, max_d2, heap);
    }

    template <class Fn>
    void visit_radius(std::uint32_t ni, const coord& q, double r2, Fn& fn) const
    {
        const node& n = nodes_[ni];
        if (box_sq_dist(n, q) > r2)
            return;
        if (n.axis < 0) {
            for (std::uint32_t i = n.begin; i < n.end; ++i)
                if (sq_dist(q, pts_[i]) <= r2)
                    fn(static_cast<std::size_t>(ids_[i]));
            return;
        }
        visit_radius(n.left, q, r2, fn);
        visit_radius(n.right, q, r2, fn);
    }

    void count_radius(std::uint32_t ni, const coord& q, double r2, std::size_t limit, std::size_t& count) const
    {
        if (count >= limit)
            return;
        const node& n = nodes_[ni];
        if (box_sq_dist(n, q) > r2)
            return;
        if (n.axis < 0) {
            for (std::uint32_t i = n.begin; i < n.end && count < limit; ++i)
                if (sq_dist(q, pts_[i]) <= r2)
                    ++count;
            return;
        }
        count_radius(n.left, q, r2, limit, count);
        count_radius(n.right, q, r2, limit, count);
    }

    std::size_t                leaf_size_;
    std::size_t                depth_ = 0;
    std::vector<node>          nodes_;
    std::vector<coord>         pts_;
    std::vector<std::uint32_t> ids_;
};

/// Three-dimensional index over a point cloud.
class kd_index
{
  public:
    explicit kd_index(const point_cloud& cloud, std::size_t leaf_size = basic_kd_tree<3>::default_leaf_size)
        : tree_(to_coords(cloud), leaf_size)
    {
    }

    explicit kd_index(std::span<const point3> points, std::size_t leaf_size = basic_kd_tree<3>::default_leaf_size)
        : tree_(to_coords(points), leaf_size)
    {
    }

    [[nodiscard]] std::size_t size() const noexcept { return tree_.size(); }
    [[nodiscard]] std::size_t depth() const noexcept { return tree_.depth(); }

    [[nodiscard]] std::vector<neighbor> knn(const point3& q, std::size_t k) const { return tree_.knn(key(q), k); }

    [[nodiscard]] std::vector<std::size_t> radius_query(const point3& q, double r) const
    {
        return tree_.radius(key(q), r);
    }

    [[nodiscard]] std::optional<neighbor> nearest_within(const point3& q, double r) const
    {
        return tree_.nearest_within(key(q), r);
    }

    [[nodiscard]] const basic_kd_tree<3>& tree() const noexcept { return tree_; }

  private:
    static basic_kd_tree<3>::coord key(const point3& p) noexcept { return {p.x, p.y, p.z}; }

    static std::vector<basic_kd_tree<3>::coord> to_coords(std::span<const point3> points)
    {
        std::vector<basic_kd_tree<3>::coord> out;
        out.reserve(points.size());
        for (const auto& p : points)
            out.push_back(key(p));
        return out;
    }

    static std::vector<basic_kd_tree<3>::coord> to_coords(const point_cloud& cloud)
    {
        if (cloud.empty())
            throw std::invalid_argument("cannot build a spatial index over an empty cloud");
        return to_coords(std::span<const point3>(cloud.points));
    }

    basic_kd_tree<3> tree_;
};

/// Convenience wrapper matching the pipeline vocabulary.
inline kd_index build_index(const point_cloud& cloud, std::size_t leaf_size = basic_kd_tree<3>::default_leaf_size)
{
    return kd_index(cloud, leaf_size);
}

} // namespace plcseg

#endif // PLCSEG_KDTREE_HPP
