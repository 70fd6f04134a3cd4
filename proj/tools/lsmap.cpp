// lsmap: synth -> compose -> sample -> train -> eval -> map pipeline driver.
//
// Exit codes: 0 success, 1 usage error, 2 data error. Diagnostics go to
// stderr; machine-readable output goes to files only.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "landslide/checkpoint.hpp"
#include "landslide/composite.hpp"
#include "landslide/detect.hpp"
#include "landslide/metrics.hpp"
#include "landslide/sampling.hpp"
#include "landslide/synth.hpp"
#include "landslide/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace landslide;

namespace {

bool g_verbose = false;

void note(const std::string& msg) {
    if (g_verbose) std::cerr << "lsmap: " << msg << "\n";
}

json load_json_file(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "cannot open config file: " + path);
    try {
        json j;
        f >> j;
        return j;
    } catch (const json::exception& e) {
        fail("malformed config file " + path + ": " + e.what());
    }
}

// Config-file merge: a key applies only when the matching flag was not given
// explicitly.
template <typename T>
void merge_key(const json& cfg, const char* key, const CLI::Option* opt, T& value) {
    if (opt != nullptr && opt->count() > 0) return;
    if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

// ---------------------------------------------------------------------------

int run_synth(const std::string& out_dir, const SynthConfig& cfg) {
    const SynthScene scene = generate(cfg);
    write_scene(scene, cfg, out_dir);
    note("scene written to " + out_dir);
    return 0;
}

int run_compose(const std::string& sources_dir, const std::string& recipe_name, bool all,
                const std::string& out) {
    const SourceMap sources = load_scene_sources(sources_dir);
    if (all) {
        fs::create_directories(out);
        for (const auto& recipe : all_recipes()) {
            const Grid composite = compose(recipe, sources);
            write_grid(composite, (fs::path(out) / (recipe.name + ".grid")).string());
            note("composed " + recipe.name);
        }
        return 0;
    }
    const Grid composite = compose(recipe_by_name(recipe_name), sources);
    write_grid(composite, out);
    note("composed " + recipe_name + " -> " + out);
    return 0;
}

int run_sample(const std::string& grid_path, const std::string& polygons_path,
               const std::string& out_dir, const ExtractOptions& opt, double test_fraction,
               uint64_t seed) {
    const Grid raw = read_grid(grid_path);
    auto [normalized, stats] = normalize(raw);
    const auto polygons = load_polygons_geojson(polygons_path);
    const auto patches = extract_patches(normalized, polygons, opt);
    require(!patches.empty(), "no patches extracted; check polygons and stride");
    const PatchSet ps = split_patchset(patches, test_fraction, seed);
    save_patchset(ps, stats, out_dir);
    note("patchset written to " + out_dir + " (train " + std::to_string(ps.train.size()) +
         ", test " + std::to_string(ps.test.size()) + ")");
    return 0;
}

int run_train(const std::string& patches_dir, const std::string& out_path,
              const TrainConfig& cfg, const std::string& report_path,
              const std::string& name) {
    const LoadedPatchSet loaded = load_patchset(patches_dir);
    nn::Model model = nn::build_reference_model(cfg.seed);
    TrainOutcome outcome = train(model, loaded.set, cfg);

    Checkpoint ck;
    ck.model = std::move(model);
    ck.adam = std::move(outcome.adam);
    ck.norm = loaded.norm;
    save_checkpoint(ck, out_path);

    const std::string stem = report_path.empty() ? out_path + ".report" : report_path;
    std::ofstream jf(stem + ".json");
    require(jf.good(), "cannot write report: " + stem + ".json");
    jf << report_to_json(outcome.report, name);
    std::ofstream tf(stem + ".txt");
    require(tf.good(), "cannot write report: " + stem + ".txt");
    tf << report_table({{name.empty() ? "model" : name, outcome.report}});
    note("checkpoint written to " + out_path);
    return 0;
}

int run_eval(const std::string& model_path, const std::string& patches_dir,
             const std::string& split, const std::string& out_path, const std::string& name) {
    const Checkpoint ck = load_checkpoint(model_path);
    const LoadedPatchSet loaded = load_patchset(patches_dir);
    require(split == "test" || split == "train", "--split must be test or train");
    const auto& patches = split == "test" ? loaded.set.test : loaded.set.train;
    const EvalReport report = evaluate(ck.model, patches);

    const std::string stem = out_path.ends_with(".json")
                                 ? out_path.substr(0, out_path.size() - 5)
                                 : out_path;
    std::ofstream jf(stem + ".json");
    require(jf.good(), "cannot write report: " + stem + ".json");
    jf << report_to_json(report, name);
    std::ofstream tf(stem + ".txt");
    require(tf.good(), "cannot write report: " + stem + ".txt");
    tf << report_table({{name.empty() ? "model" : name, report}});
    note("report written to " + stem + ".json");
    return 0;
}

int run_map(const std::string& model_path, const std::string& scene_path,
            const std::string& out_dir, const SlideConfig& cfg) {
    const Checkpoint ck = load_checkpoint(model_path);
    Grid scene = read_grid(scene_path);
    if (ck.norm) {
        scene = normalize(scene, *ck.norm).first;
    } else {
        for (const float v : scene.data) {
            require(scene.is_nodata(v) || (v >= 0.0f && v <= 1.0f),
                    "scene is not normalized and the checkpoint carries no "
                    "normalization ranges");
        }
    }
    const DetectionSet ds = slide(scene, ck.model, cfg);
    export_detections(ds, out_dir);
    note("detections written to " + out_dir + " (" + std::to_string(ds.detections.size()) +
         " landslide centers)");
    return 0;
}

int run_report(const std::vector<std::string>& inputs, const std::string& out_path) {
    std::vector<std::pair<std::string, EvalReport>> rows;
    for (const auto& path : inputs) {
        std::ifstream f(path);
        require(f.good(), "cannot open report: " + path);
        std::string text((std::istreambuf_iterator<char>(f)),
                         std::istreambuf_iterator<char>());
        std::string name;
        const EvalReport r = report_from_json(text, &name);
        if (name.empty()) name = fs::path(path).stem().string();
        rows.emplace_back(name, r);
    }
    std::ofstream f(out_path);
    require(f.good(), "cannot write report table: " + out_path);
    f << report_table(rows);
    require(f.good(), "failed writing report table: " + out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Landslide mapping pipeline: composite rasters, patch sampling, "
                 "CNN training, sliding-window detection"};
    app.require_subcommand(1);
    app.fallthrough();

    uint64_t global_seed = 0;
    CLI::Option* global_seed_opt = app.add_option("--seed", global_seed, "RNG seed");
    int threads = 1;
    CLI::Option* threads_opt =
        app.add_option("--threads", threads, "worker threads for the sliding window");
    app.add_flag("--verbose", g_verbose, "progress notes on stderr");

    // --- synth ---------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic scene");
    std::string synth_out;
    synth_cmd->add_option("--out", synth_out, "scene directory")->required();
    SynthConfig synth_cfg;
    auto* o_landslides =
        synth_cmd->add_option("--landslides", synth_cfg.landslide_count, "landslide count");
    auto* o_nonlandslides = synth_cmd->add_option(
        "--non-landslides", synth_cfg.non_landslide_count, "background polygon count");
    auto* o_width = synth_cmd->add_option("--width", synth_cfg.width, "scene width");
    auto* o_height = synth_cmd->add_option("--height", synth_cfg.height, "scene height");
    auto* o_contrast =
        synth_cmd->add_option("--contrast", synth_cfg.contrast_vv, "VV amplitude contrast");
    auto* o_contrast_vh =
        synth_cmd->add_option("--contrast-vh", synth_cfg.contrast_vh, "VH amplitude contrast");
    auto* o_scale_min =
        synth_cmd->add_option("--scale-min", synth_cfg.shape_scale_min, "min region radius, px");
    auto* o_scale_max =
        synth_cmd->add_option("--scale-max", synth_cfg.shape_scale_max, "max region radius, px");
    auto* o_roughness = synth_cmd->add_option("--roughness", synth_cfg.terrain_roughness,
                                              "DEM octave persistence");
    auto* o_looks = synth_cmd->add_option("--looks", synth_cfg.looks, "speckle looks");
    std::string synth_config_path;
    synth_cmd->add_option("--config", synth_config_path, "JSON config (flags win)");

    // --- compose -------------------------------------------------------
    auto* compose_cmd = app.add_subcommand("compose", "stack a 3-band composite");
    std::string compose_sources, compose_recipe, compose_out;
    bool compose_all = false;
    compose_cmd->add_option("--sources", compose_sources, "scene directory")->required();
    auto* recipe_opt = compose_cmd->add_option(
        "--recipe", compose_recipe, "one of RGB SSD SSS BAD BAS HHH BAA BAC BAH");
    compose_cmd->add_flag("--all", compose_all, "compose every recipe into --out directory");
    compose_cmd->add_option("--out", compose_out, "output grid path (or directory with --all)")
        ->required();
    recipe_opt->excludes("--all");

    // --- sample --------------------------------------------------------
    auto* sample_cmd = app.add_subcommand("sample", "extract labeled patches");
    std::string sample_grid, sample_polygons, sample_out;
    ExtractOptions extract_opt;
    double test_fraction = 0.2;
    sample_cmd->add_option("--grid", sample_grid, "composite grid")->required();
    sample_cmd->add_option("--polygons", sample_polygons, "GeoJSON annotations")->required();
    sample_cmd->add_option("--out", sample_out, "patchset directory")->required();
    auto* o_stride = sample_cmd->add_option("--stride", extract_opt.stride, "window stride, px");
    auto* o_overlap = sample_cmd->add_option("--min-overlap", extract_opt.min_overlap,
                                             "required window/polygon overlap fraction");
    auto* o_fraction =
        sample_cmd->add_option("--test-fraction", test_fraction, "test patch fraction");
    std::string sample_config_path;
    sample_cmd->add_option("--config", sample_config_path, "JSON config (flags win)");

    // --- train ---------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "train the classifier");
    std::string train_patches, train_out, train_report, train_name;
    TrainConfig train_cfg;
    train_cmd->add_option("--patches", train_patches, "patchset directory")->required();
    train_cmd->add_option("--out", train_out, "checkpoint path")->required();
    auto* o_epochs = train_cmd->add_option("--epochs", train_cfg.epochs, "training epochs");
    auto* o_batch = train_cmd->add_option("--batch", train_cfg.batch_size, "batch size");
    auto* o_lr = train_cmd->add_option("--lr", train_cfg.learning_rate, "Adam learning rate");
    int patience = -1;
    auto* o_patience = train_cmd->add_option(
        "--patience", patience, "early stopping patience on test loss (off when unset)");
    auto* o_rotation = train_cmd->add_option("--aug-rotation", train_cfg.augmentation.max_rotation,
                                             "max rotation, degrees");
    auto* o_zoom =
        train_cmd->add_option("--aug-zoom", train_cfg.augmentation.max_zoom, "max zoom fraction");
    auto* o_translation = train_cmd->add_option(
        "--aug-translation", train_cfg.augmentation.max_translation, "max translation fraction");
    std::string flips = "both";
    auto* o_flips = train_cmd->add_option("--aug-flips", flips,
                                          "random flips: both|horizontal|vertical|none");
    train_cmd->add_option("--report", train_report, "report stem (default <out>.report)");
    train_cmd->add_option("--name", train_name, "dataset name recorded in the report");
    std::string train_config_path;
    train_cmd->add_option("--config", train_config_path, "TrainConfig JSON (flags win)");

    // --- eval ----------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a patchset");
    std::string eval_model, eval_patches, eval_split = "test", eval_out, eval_name;
    eval_cmd->add_option("--model", eval_model, "checkpoint path")->required();
    eval_cmd->add_option("--patches", eval_patches, "patchset directory")->required();
    eval_cmd->add_option("--split", eval_split, "test|train");
    eval_cmd->add_option("--out", eval_out, "report path (json)")->required();
    eval_cmd->add_option("--name", eval_name, "dataset name recorded in the report");

    // --- map -----------------------------------------------------------
    auto* map_cmd = app.add_subcommand("map", "sliding-window detection over a scene");
    std::string map_model, map_scene, map_out;
    SlideConfig slide_cfg;
    map_cmd->add_option("--model", map_model, "checkpoint path")->required();
    map_cmd->add_option("--scene", map_scene, "composite grid")->required();
    map_cmd->add_option("--out", map_out, "output directory")->required();
    auto* o_step = map_cmd->add_option("--step", slide_cfg.step, "window step, px");
    auto* o_threshold =
        map_cmd->add_option("--threshold", slide_cfg.threshold, "detection probability threshold");
    auto* o_mbatch = map_cmd->add_option("--batch", slide_cfg.batch, "classification batch size");
    std::string map_config_path;
    map_cmd->add_option("--config", map_config_path, "JSON config (flags win)");

    // --- report --------------------------------------------------------
    auto* report_cmd = app.add_subcommand("report", "aggregate eval reports into one table");
    std::vector<std::string> report_inputs;
    std::string report_out;
    report_cmd->add_option("inputs", report_inputs, "report JSON files")->required();
    report_cmd->add_option("--out", report_out, "output table path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        if (*synth_cmd) {
            if (!synth_config_path.empty()) {
                const json cfg = load_json_file(synth_config_path);
                merge_key(cfg, "landslides", o_landslides, synth_cfg.landslide_count);
                merge_key(cfg, "non_landslides", o_nonlandslides, synth_cfg.non_landslide_count);
                merge_key(cfg, "width", o_width, synth_cfg.width);
                merge_key(cfg, "height", o_height, synth_cfg.height);
                merge_key(cfg, "contrast", o_contrast, synth_cfg.contrast_vv);
                merge_key(cfg, "contrast_vh", o_contrast_vh, synth_cfg.contrast_vh);
                merge_key(cfg, "scale_min", o_scale_min, synth_cfg.shape_scale_min);
                merge_key(cfg, "scale_max", o_scale_max, synth_cfg.shape_scale_max);
                merge_key(cfg, "roughness", o_roughness, synth_cfg.terrain_roughness);
                merge_key(cfg, "looks", o_looks, synth_cfg.looks);
                merge_key(cfg, "seed", global_seed_opt, global_seed);
            }
            synth_cfg.seed = global_seed;
            return run_synth(synth_out, synth_cfg);
        }
        if (*compose_cmd) {
            require(compose_all || !compose_recipe.empty(), "compose needs --recipe or --all");
            return run_compose(compose_sources, compose_recipe, compose_all, compose_out);
        }
        if (*sample_cmd) {
            if (!sample_config_path.empty()) {
                const json cfg = load_json_file(sample_config_path);
                merge_key(cfg, "stride", o_stride, extract_opt.stride);
                merge_key(cfg, "min_overlap", o_overlap, extract_opt.min_overlap);
                merge_key(cfg, "test_fraction", o_fraction, test_fraction);
                merge_key(cfg, "seed", global_seed_opt, global_seed);
            }
            return run_sample(sample_grid, sample_polygons, sample_out, extract_opt,
                              test_fraction, global_seed);
        }
        if (*train_cmd) {
            if (!train_config_path.empty()) {
                // TrainConfig JSON parsed whole, then explicit flags win.
                std::ifstream f(train_config_path);
                require(f.good(), "cannot open config file: " + train_config_path);
                std::string text((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());
                TrainConfig from_file = train_config_from_json(text);
                if (o_epochs->count() > 0) from_file.epochs = train_cfg.epochs;
                if (o_batch->count() > 0) from_file.batch_size = train_cfg.batch_size;
                if (o_lr->count() > 0) from_file.learning_rate = train_cfg.learning_rate;
                if (o_rotation->count() > 0) {
                    from_file.augmentation.max_rotation = train_cfg.augmentation.max_rotation;
                }
                if (o_zoom->count() > 0) {
                    from_file.augmentation.max_zoom = train_cfg.augmentation.max_zoom;
                }
                if (o_translation->count() > 0) {
                    from_file.augmentation.max_translation =
                        train_cfg.augmentation.max_translation;
                }
                train_cfg = from_file;
            }
            if (o_patience->count() > 0) {
                require(patience >= 0, "--patience must be non-negative");
                train_cfg.early_stop_patience = patience;
            }
            if (o_flips->count() > 0) {
                require(flips == "both" || flips == "horizontal" || flips == "vertical" ||
                            flips == "none",
                        "--aug-flips must be both|horizontal|vertical|none");
                train_cfg.augmentation.flip_horizontal = flips == "both" || flips == "horizontal";
                train_cfg.augmentation.flip_vertical = flips == "both" || flips == "vertical";
            }
            if (global_seed_opt->count() > 0 || train_config_path.empty()) {
                train_cfg.seed = global_seed;
                train_cfg.augmentation.seed = global_seed;
            }
            return run_train(train_patches, train_out, train_cfg, train_report, train_name);
        }
        if (*eval_cmd) {
            return run_eval(eval_model, eval_patches, eval_split, eval_out, eval_name);
        }
        if (*map_cmd) {
            if (!map_config_path.empty()) {
                const json cfg = load_json_file(map_config_path);
                merge_key(cfg, "step", o_step, slide_cfg.step);
                merge_key(cfg, "threshold", o_threshold, slide_cfg.threshold);
                merge_key(cfg, "batch", o_mbatch, slide_cfg.batch);
                merge_key(cfg, "threads", threads_opt, threads);
            }
            slide_cfg.threads = threads;
            return run_map(map_model, map_scene, map_out, slide_cfg);
        }
        if (*report_cmd) {
            return run_report(report_inputs, report_out);
        }
    } catch (const DataError& e) {
        std::cerr << "lsmap: error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "lsmap: error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
