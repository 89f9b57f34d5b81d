#ifndef PLCSEG_CONFIG_HPP
#define PLCSEG_CONFIG_HPP

#include <plcseg/catenary.hpp>
#include <plcseg/corridor.hpp>
#include <plcseg/dbscan.hpp>
#include <plcseg/elevation_filter.hpp>
#include <plcseg/errors.hpp>
#include <plcseg/features.hpp>
#include <plcseg/synthgen.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace plcseg {

using json = nlohmann::json;

struct fit_params
{
    double        inlier_tol      = 0.1;
    int           msac_iterations = 200;
    std::uint64_t seed            = 42;
    double        hazard_tol      = 0.2;
    double        sag_limit       = 10.0;
    std::optional<double> weight; // N/m, enables tension reporting
};

/// Value lists searched by the tuner. An empty list leaves the base config value in place.
struct param_grid
{
    std::vector<int>    nbin;
    std::vector<double> beta;
    std::vector<double> r;
    std::vector<double> ln_thres;
    std::vector<double> alpha_thres;
    std::vector<double> filt_mult;
    std::vector<double> eps;
    std::vector<int>    min_pts;

    [[nodiscard]] bool empty() const noexcept
    {
        return nbin.empty() && beta.empty() && r.empty() && ln_thres.empty() && alpha_thres.empty() &&
               filt_mult.empty() && eps.empty() && min_pts.empty();
    }
};

struct pipeline_config
{
    elevation_filter_params elevation;
    candidate_params        candidates;
    int                     outlier_k = 10;
    dbscan_params           stage1;
    dbscan_params           stage2;
    fit_params              fit;
    corridor_params         corridor;
    param_grid              grid;
};

/**
 * Admissibility checks. Each throws config_error naming the predicate.
 */
namespace constraints {

inline void fail(const std::string& predicate, const std::string& name, double value)
{
    std::ostringstream os;
    os << "constraint " << predicate << " violated (" << name << " = " << value << ")";
    throw config_error(os.str());
}

inline void nbin(int v)
{
    if (!(v < 500))
        fail("nbin < 500", "nbin", v);
    if (!(v >= 2))
        fail("nbin >= 2", "nbin", v);
}
inline void beta(double v)
{
    if (!(v > 3.0))
        fail("beta > 3", "beta", v);
}
inline void r(double v)
{
    if (!(v > 0.0))
        fail("r > 0", "r", v);
}
inline void ln_thres(double v)
{
    if (!(v >= 0.5 && v <= 1.0))
        fail("LN_thres in [0.5, 1]", "ln_thres", v);
}
inline void alpha_thres(double v)
{
    if (!(v >= 0.0 && v <= 20.0))
        fail("alpha_thres in [0, 20]", "alpha_thres", v);
}
inline void filt_mult(double v)
{
    if (!(v > 0.0))
        fail("filt_mult > 0", "filt_mult", v);
}
inline void eps(double v)
{
    if (!(v > 0.1))
        fail("eps > 0.1", "eps", v);
}
inline void min_pts(int v)
{
    if (!(v > 30))
        fail("min_pts > 30", "min_pts", v);
}

} // namespace constraints

inline void validate(const param_grid& g)
{
    for (auto v : g.nbin)
        constraints::nbin(v);
    for (auto v : g.beta)
        constraints::beta(v);
    for (auto v : g.r)
        constraints::r(v);
    for (auto v : g.ln_thres)
        constraints::ln_thres(v);
    for (auto v : g.alpha_thres)
        constraints::alpha_thres(v);
    for (auto v : g.filt_mult)
        constraints::filt_mult(v);
    for (auto v : g.eps)
        constraints::eps(v);
    for (auto v : g.min_pts)
        constraints::min_pts(v);
}

inline void validate(const pipeline_config& c)
{
    constraints::nbin(c.elevation.nbin);
    constraints::beta(c.elevation.beta);
    constraints::ln_thres(c.candidates.ln_thres);
    constraints::alpha_thres(c.candidates.alpha_thres);
    constraints::filt_mult(c.candidates.filt_mult);
    for (const auto* s : {&c.stage1, &c.stage2}) {
        constraints::eps(s->eps);
        constraints::min_pts(s->min_pts);
    }
    if (c.corridor.r_override)
        constraints::r(*c.corridor.r_override);
    if (c.candidates.k_neighbors < 5)
        constraints::fail("k_neighbors >= 5", "k_neighbors", c.candidates.k_neighbors);
    if (c.outlier_k < 1)
        constraints::fail("outlier_k >= 1", "outlier_k", c.outlier_k);
    if (!(c.fit.inlier_tol > 0.0))
        constraints::fail("inlier_tol > 0", "inlier_tol", c.fit.inlier_tol);
    if (c.fit.msac_iterations < 1)
        constraints::fail("msac_iterations >= 1", "msac_iterations", c.fit.msac_iterations);
    if (!(c.fit.hazard_tol > 0.0))
        constraints::fail("hazard_tol > 0", "hazard_tol", c.fit.hazard_tol);
    if (!(c.fit.sag_limit > 0.0))
        constraints::fail("sag_limit > 0", "sag_limit", c.fit.sag_limit);
    if (c.fit.weight && !(*c.fit.weight > 0.0))
        constraints::fail("weight > 0", "weight", *c.fit.weight);
    if (!(c.corridor.clearance > 0.0))
        constraints::fail("clearance > 0", "clearance", c.corridor.clearance);
    validate(c.grid);
}

namespace detail {

/// Reads an object field by field, rejecting keys nobody asked for.
class object_reader
{
  public:
    object_reader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw config_error(path_ + ": expected a JSON object");
    }

    template <class T>
    void get(const char* key, T& out)
    {
        seen_.emplace_back(key);
        const auto it = j_.find(key);
        if (it == j_.end() || it->is_null())
            return;
        try {
            out = it->template get<T>();
        } catch (const json::exception& e) {
            throw config_error(path_ + "." + key + ": " + e.what());
        }
    }

    template <class T>
    void get(const char* key, std::optional<T>& out)
    {
        seen_.emplace_back(key);
        const auto it = j_.find(key);
        if (it == j_.end() || it->is_null())
            return;
        try {
            out = it->template get<T>();
        } catch (const json::exception& e) {
            throw config_error(path_ + "." + key + ": " + e.what());
        }
    }

    [[nodiscard]] const json* child(const char* key)
    {
        seen_.emplace_back(key);
        const auto it = j_.find(key);
        if (it == j_.end() || it->is_null())
            return nullptr;
        return &*it;
    }

    [[nodiscard]] std::string path(const char* key) const { return path_ + "." + key; }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
                throw config_error(path_ + ": unknown key '" + it.key() + "'");
    }

  private:
    const json&              j_;
    std::string              path_;
    std::vector<std::string> seen_;
};

inline void read_dbscan(const json& j, const std::string& path, dbscan_params& p)
{
    object_reader r(j, path);
    r.get("eps", p.eps);
    r.get("min_pts", p.min_pts);
    r.finish();
}

inline json dbscan_json(const dbscan_params& p) { return {{"eps", p.eps}, {"min_pts", p.min_pts}}; }

template <class T>
json optional_json(const std::optional<T>& v)
{
    return v ? json(*v) : json(nullptr);
}

} // namespace detail

inline param_grid param_grid_from_json(const json& j, const std::string& path = "grid")
{
    param_grid g;
    detail::object_reader r(j, path);
    r.get("nbin", g.nbin);
    r.get("beta", g.beta);
    r.get("r", g.r);
    r.get("ln_thres", g.ln_thres);
    r.get("alpha_thres", g.alpha_thres);
    r.get("filt_mult", g.filt_mult);
    r.get("eps", g.eps);
    r.get("min_pts", g.min_pts);
    r.finish();
    return g;
}

inline json to_json(const param_grid& g)
{
    return {{"nbin", g.nbin},         {"beta", g.beta},           {"r", g.r},
            {"ln_thres", g.ln_thres}, {"alpha_thres", g.alpha_thres}, {"filt_mult", g.filt_mult},
            {"eps", g.eps},           {"min_pts", g.min_pts}};
}

/// Parses and validates a pipeline config. Missing keys keep their defaults.
inline pipeline_config config_from_json(const json& j)
{
    pipeline_config c;
    detail::object_reader root(j, "config");
    if (const auto* e = root.child("elevation")) {
        detail::object_reader r(*e, "config.elevation");
        r.get("nbin", c.elevation.nbin);
        r.get("beta", c.elevation.beta);
        r.finish();
    }
    if (const auto* e = root.child("candidates")) {
        detail::object_reader r(*e, "config.candidates");
        r.get("k_neighbors", c.candidates.k_neighbors);
        r.get("ln_thres", c.candidates.ln_thres);
        r.get("alpha_thres", c.candidates.alpha_thres);
        r.get("filt_mult", c.candidates.filt_mult);
        r.get("outlier_k", c.outlier_k);
        r.finish();
    }
    if (const auto* e = root.child("segmentation")) {
        detail::object_reader r(*e, "config.segmentation");
        if (const auto* s = r.child("stage1"))
            detail::read_dbscan(*s, "config.segmentation.stage1", c.stage1);
        if (const auto* s = r.child("stage2"))
            detail::read_dbscan(*s, "config.segmentation.stage2", c.stage2);
        r.finish();
    }
    if (const auto* e = root.child("fit")) {
        detail::object_reader r(*e, "config.fit");
        r.get("inlier_tol", c.fit.inlier_tol);
        r.get("msac_iterations", c.fit.msac_iterations);
        r.get("seed", c.fit.seed);
        r.get("hazard_tol", c.fit.hazard_tol);
        r.get("sag_limit", c.fit.sag_limit);
        r.get("weight", c.fit.weight);
        r.finish();
    }
    if (const auto* e = root.child("corridor")) {
        detail::object_reader r(*e, "config.corridor");
        std::string mode = c.corridor.mode == environment_mode::open ? "open" : "complex";
        r.get("mode", mode);
        if (mode == "open")
            c.corridor.mode = environment_mode::open;
        else if (mode == "complex")
            c.corridor.mode = environment_mode::complex;
        else
            throw config_error("config.corridor.mode: expected 'open' or 'complex', got '" + mode + "'");
        r.get("clearance", c.corridor.clearance);
        r.get("r_override", c.corridor.r_override);
        r.finish();
    }
    if (const auto* e = root.child("grid"))
        c.grid = param_grid_from_json(*e, "config.grid");
    root.finish();
    validate(c);
    return c;
}

inline json to_json(const pipeline_config& c)
{
    return {
        {"elevation", {{"nbin", c.elevation.nbin}, {"beta", c.elevation.beta}}},
        {"candidates",
         {{"k_neighbors", c.candidates.k_neighbors},
          {"ln_thres", c.candidates.ln_thres},
          {"alpha_thres", c.candidates.alpha_thres},
          {"filt_mult", c.candidates.filt_mult},
          {"outlier_k", c.outlier_k}}},
        {"segmentation", {{"stage1", detail::dbscan_json(c.stage1)}, {"stage2", detail::dbscan_json(c.stage2)}}},
        {"fit",
         {{"inlier_tol", c.fit.inlier_tol},
          {"msac_iterations", c.fit.msac_iterations},
          {"seed", c.fit.seed},
          {"hazard_tol", c.fit.hazard_tol},
          {"sag_limit", c.fit.sag_limit},
          {"weight", detail::optional_json(c.fit.weight)}}},
        {"corridor",
         {{"mode", c.corridor.mode == environment_mode::open ? "open" : "complex"},
          {"clearance", c.corridor.clearance},
          {"r_override", detail::optional_json(c.corridor.r_override)}}},
        {"grid", to_json(c.grid)},
    };
}

inline json load_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw config_error(path.string() + ": " + e.what());
    }
}

inline pipeline_config load_config(const std::filesystem::path& path) { return config_from_json(load_json_file(path)); }

/// 3^4 grid over the segmentation-sensitive parameters; the elevation filter, outlier
/// multiplier and r stay at their defaults (r does not enter the tuning score).
inline param_grid default_param_grid()
{
    param_grid g;
    g.nbin        = {100};
    g.beta        = {4.0};
    g.r           = {0.6};
    g.ln_thres    = {0.75, 0.82, 0.9};
    g.alpha_thres = {5.0, 10.0, 15.0};
    g.filt_mult   = {4.0};
    g.eps         = {0.2, 0.3, 0.4};
    g.min_pts     = {35, 50, 80};
    return g;
}

// Scene specs share the strict-key JSON reader.

inline scene_spec scene_from_json(const json& j)
{
    scene_spec s;
    detail::object_reader r(j, "scene");
    std::vector<double> area;
    r.get("area", area);
    if (!area.empty()) {
        if (area.size() != 2)
            throw config_error("scene.area: expected [x, y]");
        s.area_x = area[0];
        s.area_y = area[1];
    }
    r.get("ground_density", s.ground_density);
    r.get("ground_fraction", s.ground_fraction);
    r.get("ground_roughness", s.ground_roughness);
    r.get("n_conductors", s.n_conductors);
    r.get("conductor_spacing", s.conductor_spacing);
    r.get("span_length", s.span_length);
    r.get("n_spans", s.n_spans);
    r.get("catenary_c", s.catenary_c);
    if (const auto* cats = r.child("catenary")) {
        if (!cats->is_array())
            throw config_error("scene.catenary: expected an array of {a, b, c}");
        for (const auto& item : *cats) {
            span_catenary c;
            detail::object_reader cr(item, "scene.catenary[]");
            cr.get("a", c.a);
            cr.get("b", c.b);
            cr.get("c", c.c);
            cr.finish();
            s.catenary.push_back(c);
        }
    }
    r.get("wire_point_spacing", s.wire_point_spacing);
    r.get("wire_noise", s.wire_noise);
    r.get("pylon_gap", s.pylon_gap);
    if (const auto* trees = r.child("trees")) {
        if (!trees->is_array())
            throw config_error("scene.trees: expected an array");
        for (const auto& item : *trees) {
            tree_spec t;
            detail::object_reader tr(item, "scene.trees[]");
            std::vector<double> center;
            tr.get("center", center);
            if (center.size() != 2)
                throw config_error("scene.trees[].center: expected [x, y]");
            t.x = center[0];
            t.y = center[1];
            tr.get("height", t.height);
            tr.get("crown_radius", t.crown_radius);
            tr.get("density", t.density);
            tr.finish();
            s.trees.push_back(t);
        }
    }
    r.get("pylon_height", s.pylon_height);
    r.get("pylon_radius", s.pylon_radius);
    r.get("pylon_point_spacing", s.pylon_point_spacing);
    r.get("heading", s.heading_deg);
    r.get("rng_seed", s.rng_seed);
    r.finish();
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(e.what());
    }
    return s;
}

inline json to_json(const scene_spec& s)
{
    json cats = json::array();
    for (const auto& c : s.catenary)
        cats.push_back({{"a", c.a}, {"b", c.b}, {"c", c.c}});
    json trees = json::array();
    for (const auto& t : s.trees)
        trees.push_back({{"center", {t.x, t.y}},
                         {"height", t.height},
                         {"crown_radius", t.crown_radius},
                         {"density", t.density}});
    return {{"area", {s.area_x, s.area_y}},
            {"ground_density", s.ground_density},
            {"ground_fraction", detail::optional_json(s.ground_fraction)},
            {"ground_roughness", s.ground_roughness},
            {"n_conductors", s.n_conductors},
            {"conductor_spacing", s.conductor_spacing},
            {"span_length", s.span_length},
            {"n_spans", s.n_spans},
            {"catenary_c", s.catenary_c},
            {"catenary", cats},
            {"wire_point_spacing", s.wire_point_spacing},
            {"wire_noise", s.wire_noise},
            {"pylon_gap", s.pylon_gap},
            {"trees", trees},
            {"pylon_height", s.pylon_height},
            {"pylon_radius", s.pylon_radius},
            {"pylon_point_spacing", s.pylon_point_spacing},
            {"heading", s.heading_deg},
            {"rng_seed", s.rng_seed}};
}

} // namespace plcseg

#endif // PLCSEG_CONFIG_HPP
