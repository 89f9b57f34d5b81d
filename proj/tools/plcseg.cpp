// plcseg: command-line front end. Each stage subcommand runs the pipeline up to that
// stage and writes what the stage produced; `pipeline` runs everything.

#include <plcseg/plcseg.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace plcseg;

namespace {

struct common_options
{
    std::string                  input;
    std::string                  output_dir = ".";
    std::string                  config;
    std::optional<std::uint64_t> seed;
    std::string                  format;
    std::string                  stop_stage = "corridor";
    bool                         verbose = false;
};

bool g_verbose = false;

void log(const std::string& msg)
{
    if (g_verbose)
        std::cerr << "plcseg: " << msg << '\n';
}

cloud_format input_format(const common_options& o)
{
    if (!o.format.empty())
        return parse_cloud_format(o.format);
    const auto ext = fs::path(o.input).extension().string();
    return ext == ".bin" ? cloud_format::xyz_binary : cloud_format::xyz_ascii;
}

pipeline_config load_pipeline_config(const common_options& o)
{
    pipeline_config cfg;
    if (!o.config.empty())
        cfg = load_config(o.config);
    if (o.seed)
        cfg.fit.seed = *o.seed;
    validate(cfg);
    return cfg;
}

void write_json(const json& j, const fs::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out)
        throw io_error("write failed for '" + path.string() + "'");
}

point_cloud read_input(const common_options& o)
{
    if (o.input.empty())
        throw config_error("--input is required");
    const auto fmt = input_format(o);
    log("reading " + o.input + " as " + to_string(fmt));
    auto cloud = read_cloud(o.input, fmt);
    log("read " + std::to_string(cloud.size()) + " points");
    return cloud;
}

fs::path output_dir(const common_options& o)
{
    fs::path dir(o.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw io_error("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

/// Writes the stage products that exist in `r` and the JSON report.
void write_outputs(const point_cloud& cloud, const pipeline_result& r, const pipeline_config& cfg,
                   const fs::path& dir)
{
    point_cloud high = subset(cloud, r.high_ids);
    high.labels.reset();
    write_cloud(high, dir / "high_elevation.xyz", cloud_format::xyz_ascii);

    if (r.last_stage >= stage::features) {
        point_cloud cand = subset(cloud, r.regularized_origin);
        cand.labels.reset();
        write_cloud(cand, dir / "candidates.xyz", cloud_format::xyz_ascii);
        point_cloud reg = r.candidates.regularized;
        reg.labels.reset();
        write_cloud(reg, dir / "candidates_regularized.xyz", cloud_format::xyz_ascii);
    }

    if (r.last_stage >= stage::segment) {
        point_cloud segs;
        segs.labels.emplace();
        const auto ids = r.segment_input_ids();
        for (std::size_t s = 0; s < ids.size(); ++s)
            for (auto id : ids[s]) {
                segs.points.push_back(cloud.points[id]);
                segs.labels->push_back(r.segments[s].segment_id);
            }
        write_cloud(segs, dir / "segments.xyz", cloud_format::xyz_ascii);
    }

    if (r.corridor) {
        point_cloud labeled;
        labeled.points = cloud.points;
        labeled.labels.emplace();
        labeled.labels->reserve(cloud.size());
        for (auto c : r.corridor->classes)
            labeled.labels->push_back(static_cast<label_t>(c));
        write_cloud(labeled, dir / "labeled.xyz", cloud_format::xyz_ascii);
    }

    write_json(pipeline_report(cloud, r, cfg), dir / "report.json");
}

int run_stage(const common_options& o, stage stop)
{
    const auto cfg   = load_pipeline_config(o);
    const auto cloud = read_input(o);
    const auto dir   = output_dir(o);
    const auto r     = run_pipeline(cloud, cfg, stop);
    for (const auto& t : r.timings)
        log(t.name + ": " + std::to_string(t.ms) + " ms");
    write_outputs(cloud, r, cfg, dir);
    if (r.corridor)
        for (const auto& w : r.corridor->warnings)
            std::cerr << "plcseg: warning: " << w << '\n';
    std::cout << "wrote " << (dir / "report.json").string() << " (" << r.segments.size() << " segments, "
              << r.ms_per_m2() << " ms/m^2)\n";
    return 0;
}

int run_tune(const common_options& o)
{
    auto cfg = load_pipeline_config(o);
    const auto cloud = read_input(o);
    const auto dir   = output_dir(o);
    const param_grid grid = cfg.grid.empty() ? default_param_grid() : cfg.grid;
    const auto t = tune(cloud, grid, cfg);
    write_json(tune_report(t), dir / "tune.json");
    auto best = t.best_config;
    best.grid = {};
    write_json(to_json(best), dir / "best_config.json");
    std::cout << "best score " << t.score << " over " << t.table.size() << " cells (" << t.evaluated
              << " evaluated); wrote " << (dir / "best_config.json").string() << '\n';
    return 0;
}

int run_synth(const common_options& o, const std::string& preset)
{
    scene_spec spec;
    if (!o.config.empty())
        spec = scene_from_json(load_json_file(o.config));
    else if (preset == "3x2")
        spec = reference_scene_3x2();
    else if (preset == "large")
        spec = reference_scene_large();
    else
        throw config_error("unknown scene preset '" + preset + "' (expected 3x2 or large)");
    if (o.seed)
        spec.rng_seed = *o.seed;
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(e.what());
    }
    const auto cloud = generate_scene(spec);
    const auto dir   = output_dir(o);
    const auto fmt   = o.format.empty() ? cloud_format::xyz_binary : parse_cloud_format(o.format);
    const fs::path cloud_path = dir / (fmt == cloud_format::xyz_binary ? "scene.bin" : "scene.xyz");
    write_cloud(cloud, cloud_path, fmt);
    write_labels(*cloud.labels, dir / "scene.labels");
    write_json(to_json(spec), dir / "scene.json");
    std::cout << "wrote " << cloud.size() << " points to " << cloud_path.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Unsupervised power-line and corridor extraction from LiDAR point clouds"};
    app.require_subcommand(1);

    common_options opts;
    std::string preset = "3x2";

    auto add_common = [&](CLI::App* sub, bool needs_input) {
        auto* in = sub->add_option("--input,-i", opts.input, "input point cloud");
        if (needs_input)
            in->required();
        sub->add_option("--output-dir,-o", opts.output_dir, "directory for outputs")->capture_default_str();
        sub->add_option("--config,-c", opts.config, "JSON config file");
        sub->add_option("--seed", opts.seed, "override the random seed");
        sub->add_option("--format", opts.format, "xyz-ascii or xyz-binary (default: from the extension)");
        sub->add_flag("--verbose,-v", opts.verbose, "log progress to stderr");
    };

    struct entry
    {
        const char* name;
        const char* help;
        stage       stop;
    };
    const entry stages[] = {
        {"filter", "remove ground-level points", stage::filter},
        {"features", "eigen-features, candidates, outlier removal and regularization", stage::features},
        {"segment", "two-stage DBSCAN segmentation", stage::segment},
        {"fit", "per-segment quadratic and catenary fits with sag", stage::fit},
        {"corridor", "corridor and hazard classification", stage::corridor},
    };
    std::vector<std::pair<CLI::App*, stage>> stage_cmds;
    for (const auto& e : stages) {
        auto* sub = app.add_subcommand(e.name, e.help);
        add_common(sub, true);
        stage_cmds.emplace_back(sub, e.stop);
    }

    auto* pipeline = app.add_subcommand("pipeline", "run all stages");
    add_common(pipeline, true);
    pipeline->add_option("--stage", opts.stop_stage, "stop after this stage")
        ->check(CLI::IsMember({"filter", "features", "segment", "fit", "corridor"}))
        ->capture_default_str();

    auto* tune_cmd = app.add_subcommand("tune", "grid search over the config's grid (or the default grid)");
    add_common(tune_cmd, true);

    auto* synth = app.add_subcommand("synth", "generate a labeled synthetic scene");
    add_common(synth, false);
    synth->add_option("--scene", preset, "preset when no --config is given: 3x2 or large")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(error_code::config);
    }
    g_verbose = opts.verbose;

    try {
        for (const auto& [sub, stop] : stage_cmds)
            if (sub->parsed())
                return run_stage(opts, stop);
        if (pipeline->parsed())
            return run_stage(opts, parse_stage(opts.stop_stage));
        if (tune_cmd->parsed())
            return run_tune(opts);
        if (synth->parsed())
            return run_synth(opts, preset);
    } catch (const plcseg::error& e) {
        std::cerr << "plcseg: error: " << e.what() << '\n';
        return static_cast<int>(e.code());
    } catch (const std::invalid_argument& e) {
        std::cerr << "plcseg: error: " << e.what() << '\n';
        return static_cast<int>(error_code::config);
    } catch (const std::exception& e) {
        std::cerr << "plcseg: error: " << e.what() << '\n';
        return static_cast<int>(error_code::stage_failure);
    }
    return static_cast<int>(error_code::stage_failure);
}
