#ifndef PLCSEG_SYNTHGEN_HPP
#define PLCSEG_SYNTHGEN_HPP

#include <plcseg/point_cloud.hpp>
#include <plcseg/random.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace plcseg {

/// Ground-truth label codes of generated scenes.
namespace scene_label {
inline constexpr label_t ground         = 0;
inline constexpr label_t vegetation     = 1;
inline constexpr label_t pylon          = 2;
inline constexpr label_t conductor_base = 100; // + span * n_conductors + conductor

inline bool is_conductor(label_t l) noexcept { return l >= conductor_base; }
} // namespace scene_label

struct tree_spec
{
    double x            = 0.0; // crown centre, scene frame before heading
    double y            = 0.0;
    double height       = 10.0; // top of the crown
    double crown_radius = 2.5;
    double density      = 40.0; // points per cubic metre of crown
};

/// z = a + c * cosh((t - b) / c), t measured from the span midpoint.
struct span_catenary
{
    double a = 0.0;
    double b = 0.0;
    double c = 100.0;

    [[nodiscard]] double operator()(double t) const noexcept { return a + c * std::cosh((t - b) / c); }
};

/**
 * Synthetic power-line scene. Before the heading rotation, conductors run along Y,
 * spans are laid end to end centred on the origin and pylons stand at x = 0 at every
 * span boundary.
 */
struct scene_spec
{
    double area_x = 25.0;  // metres
    double area_y = 165.0; // metres
    double ground_density   = 50.0; // points per square metre, used when ground_fraction is unset
    std::optional<double> ground_fraction;
    double ground_roughness = 0.05; // z-noise sigma

    int    n_conductors      = 3;
    double conductor_spacing = 2.0;
    double span_length       = 80.0;
    int    n_spans           = 2;
    double catenary_c        = 100.0;
    std::vector<span_catenary> catenary; // per span; derived from pylon_height and catenary_c when empty
    double wire_point_spacing = 0.006;   // along y
    double wire_noise         = 0.0001;   // sigma, truncated at 3.5 sigma
    double pylon_gap          = 5.0;     // wire data gap centred on each pylon

    std::vector<tree_spec> trees;
    double pylon_height = 20.0;
    double pylon_radius = 0.3;
    double pylon_point_spacing = 0.1;
    double heading_deg = 0.0;
    std::uint64_t rng_seed = 1;

    [[nodiscard]] double span_mid(int span) const noexcept
    {
        return (static_cast<double>(span) + 0.5 - 0.5 * static_cast<double>(n_spans)) * span_length;
    }

    [[nodiscard]] double conductor_x(int i) const noexcept
    {
        return (static_cast<double>(i) - 0.5 * static_cast<double>(n_conductors - 1)) * conductor_spacing;
    }

    /// Catenary of one span; the derived default attaches at pylon height with b = 0.
    [[nodiscard]] span_catenary span_curve(int span) const
    {
        if (!catenary.empty())
            return catenary.at(static_cast<std::size_t>(span));
        span_catenary cat;
        cat.c = catenary_c;
        cat.b = 0.0;
        cat.a = pylon_height - catenary_c * std::cosh(0.5 * span_length / catenary_c);
        return cat;
    }

    void validate() const
    {
        auto require = [](bool ok, const char* what) {
            if (!ok)
                throw std::invalid_argument(std::string("invalid scene: ") + what);
        };
        require(area_x > 0.0 && area_y > 0.0, "area must be positive");
        require(ground_fraction ? (*ground_fraction > 0.0 && *ground_fraction < 1.0) : ground_density > 0.0,
                "ground density must be positive (or ground_fraction in (0, 1))");
        require(ground_roughness >= 0.0, "ground roughness must be non-negative");
        require(n_conductors >= 0 && n_spans >= 1, "need at least one span");
        require(conductor_spacing > 0.0 && span_length > 0.0, "spacing and span length must be positive");
        require(catenary_c > 0.0, "catenary c must be positive");
        require(catenary.empty() || catenary.size() == static_cast<std::size_t>(n_spans),
                "catenary list must have one entry per span");
        for (const auto& c : catenary)
            require(c.c > 0.0, "catenary c must be positive");
        require(wire_point_spacing > 0.0 && wire_noise >= 0.0, "wire spacing must be positive");
        require(pylon_gap >= 0.0 && pylon_gap < span_length, "pylon gap must be shorter than a span");
        require(pylon_height > 0.0 && pylon_radius >= 0.0 && pylon_point_spacing > 0.0, "pylon dimensions");
        for (const auto& t : trees)
            require(t.crown_radius > 0.0 && t.density > 0.0 && t.height > 0.0, "tree dimensions and density");
    }
};

inline label_t conductor_label(const scene_spec& spec, int span, int conductor)
{
    return scene_label::conductor_base + span * spec.n_conductors + conductor;
}

/// Labeled cloud in generation order: conductors, pylons, trees, then ground.
inline point_cloud generate_scene(const scene_spec& spec)
{
    spec.validate();
    random_source rng(spec.rng_seed);
    point_cloud cloud;
    cloud.labels.emplace();
    auto emit = [&](point3 p, label_t label) {
        cloud.points.push_back(p);
        cloud.labels->push_back(label);
    };
    constexpr double cutoff = 3.5;

    for (int s = 0; s < spec.n_spans; ++s) {
        const auto   curve = spec.span_curve(s);
        const double mid   = spec.span_mid(s);
        const double half  = 0.5 * spec.span_length - 0.5 * spec.pylon_gap;
        const auto   steps = static_cast<long>(std::floor(2.0 * half / spec.wire_point_spacing));
        for (int i = 0; i < spec.n_conductors; ++i) {
            const double x0 = spec.conductor_x(i);
            for (long j = 0; j <= steps; ++j) {
                const double t = -half + static_cast<double>(j) * spec.wire_point_spacing;
                const double dx = rng.truncated_normal(spec.wire_noise, cutoff);
                const double dz = rng.truncated_normal(spec.wire_noise, cutoff);
                emit({x0 + dx, mid + t, curve(t) + dz}, conductor_label(spec, s, i));
            }
        }
    }

    const auto rings = static_cast<long>(std::floor(spec.pylon_height / spec.pylon_point_spacing));
    for (int k = 0; k <= spec.n_spans; ++k) {
        const double y0 = spec.span_mid(0) - 0.5 * spec.span_length + static_cast<double>(k) * spec.span_length;
        for (long j = 0; j <= rings; ++j) {
            const double z = static_cast<double>(j) * spec.pylon_point_spacing;
            for (int a = 0; a < 8; ++a) {
                const double phi = 2.0 * std::numbers::pi * static_cast<double>(a) / 8.0;
                emit({spec.pylon_radius * std::cos(phi), y0 + spec.pylon_radius * std::sin(phi), z},
                     scene_label::pylon);
            }
        }
    }

    for (const auto& tree : spec.trees) {
        const double r = tree.crown_radius;
        const auto count = static_cast<long>(std::llround(tree.density * 4.0 / 3.0 * std::numbers::pi * r * r * r));
        const double cz = tree.height - r;
        for (long n = 0; n < count;) {
            const double x = rng.uniform(-r, r);
            const double y = rng.uniform(-r, r);
            const double z = rng.uniform(-r, r);
            if (x * x + y * y + z * z > r * r)
                continue;
            emit({tree.x + x, tree.y + y, cz + z}, scene_label::vegetation);
            ++n;
        }
    }

    const std::size_t non_ground = cloud.size();
    std::size_t n_ground = 0;
    if (spec.ground_fraction) {
        const double f = *spec.ground_fraction;
        n_ground = static_cast<std::size_t>(std::llround(f / (1.0 - f) * static_cast<double>(non_ground)));
    } else {
        n_ground = static_cast<std::size_t>(std::llround(spec.ground_density * spec.area_x * spec.area_y));
    }
    for (std::size_t n = 0; n < n_ground; ++n) {
        const double x = rng.uniform(-0.5 * spec.area_x, 0.5 * spec.area_x);
        const double y = rng.uniform(-0.5 * spec.area_y, 0.5 * spec.area_y);
        emit({x, y, rng.truncated_normal(spec.ground_roughness, cutoff)}, scene_label::ground);
    }

    if (spec.heading_deg != 0.0) {
        const double h = spec.heading_deg * std::numbers::pi / 180.0;
        const double c = std::cos(h);
        const double s = std::sin(h);
        for (auto& p : cloud.points)
            p = {c * p.x - s * p.y, s * p.x + c * p.y, p.z};
    }
    return cloud;
}

/// The reference "3x2" scene: 3 conductors, 2 spans of 80 m, c = 100 m, 2 m spacing,
/// 50% ground, 6 trees (one 1.5 m under a conductor), heading 30 degrees.
inline scene_spec reference_scene_3x2()
{
    scene_spec spec;
    spec.ground_fraction = 0.5;
    spec.heading_deg     = 30.0;
    spec.rng_seed        = 20240601;
    const double vertex_z = spec.span_curve(0)(0.0);
    spec.trees = {
        {spec.conductor_x(0), spec.span_mid(0), vertex_z - 1.5, 2.5, 40.0},
        {-9.0, -55.0, 11.0, 3.0, 40.0},
        {9.5, -20.0, 9.5, 2.5, 40.0},
        {-8.5, 15.0, 12.0, 3.0, 40.0},
        {10.0, 45.0, 10.5, 2.5, 40.0},
        {-10.0, 70.0, 9.0, 2.5, 40.0},
    };
    return spec;
}

/// Roughly one million points over about 4000 m^2: the reference layout with dense
/// crowns, unrotated so the XY bounding box is the 24 x 166 m footprint.
inline scene_spec reference_scene_large()
{
    scene_spec spec = reference_scene_3x2();
    spec.area_x = 24.0;
    spec.area_y = 166.0;
    spec.heading_deg = 0.0;
    for (auto& t : spec.trees)
        t.density = 850.0;
    spec.rng_seed = 20240602;
    return spec;
}

} // namespace plcseg

#endif // PLCSEG_SYNTHGEN_HPP
