#include "landslide/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "landslide/composite.hpp"
#include "landslide/random.hpp"

namespace landslide {

namespace fs = std::filesystem;
using nlohmann::json;

void validate_synth_config(const SynthConfig& cfg) {
    require(cfg.width >= 64 && cfg.height >= 64, "scene dims must be >= 64");
    require(cfg.landslide_count >= 0, "landslide_count must be >= 0");
    require(cfg.contrast_vv > 0.0f && cfg.contrast_vh > 0.0f, "contrast must be positive");
    require(cfg.shape_scale_min > 0.0f && cfg.shape_scale_max >= cfg.shape_scale_min,
            "shape scale range is invalid");
    require(cfg.looks >= 1, "looks must be >= 1");
    require(cfg.backscatter_vv > 0.0f && cfg.backscatter_vh > 0.0f,
            "backscatter means must be positive");
    require(cfg.terrain_roughness > 0.0f && cfg.terrain_roughness < 1.0f,
            "terrain_roughness must lie in (0,1)");
}

namespace {

constexpr std::array<double, 6> kSceneGeotransform = {300000.0, 10.0, 0.0,
                                                      4800000.0, 0.0, -10.0};

Grid blank_band(const SynthConfig& cfg, const std::string& name) {
    Grid g(cfg.width, cfg.height, 1);
    g.geotransform = kSceneGeotransform;
    g.band_names[0] = name;
    return g;
}

// Amoeboid radial polygon: an ellipse whose radius wobbles with two low
// order harmonics. Star-shaped about its center, hence always simple.
AnnotationPolygon amoeboid_polygon(double cx, double cy, double base_radius, double aspect,
                                   double angle, Rng& rng) {
    const int harmonics1 = 2 + static_cast<int>(rng.index(2));  // 2..3
    const int harmonics2 = 4 + static_cast<int>(rng.index(3));  // 4..6
    const double w1 = rng.uniform_double(0.06, 0.14);
    const double w2 = rng.uniform_double(0.03, 0.07);
    const double p1 = rng.uniform_double(0.0, 2.0 * 3.14159265358979323846);
    const double p2 = rng.uniform_double(0.0, 2.0 * 3.14159265358979323846);

    AnnotationPolygon poly;
    constexpr int kVertices = 36;
    const double ca = std::cos(angle), sa = std::sin(angle);
    for (int i = 0; i < kVertices; ++i) {
        const double phi = 2.0 * 3.14159265358979323846 * i / kVertices;
        const double radius =
            base_radius * (1.0 + w1 * std::sin(harmonics1 * phi + p1) +
                           w2 * std::sin(harmonics2 * phi + p2));
        const double ex = radius * std::cos(phi);
        const double ey = radius * aspect * std::sin(phi);
        poly.vertices.emplace_back(cx + ca * ex - sa * ey, cy + sa * ex + ca * ey);
    }
    return poly;
}

bool bbox_clear(const BoundingBox& bb, const std::vector<BoundingBox>& taken, double margin) {
    for (const auto& o : taken) {
        const bool separated = bb.max_x + margin < o.min_x || o.max_x + margin < bb.min_x ||
                               bb.max_y + margin < o.min_y || o.max_y + margin < bb.min_y;
        if (!separated) return false;
    }
    return true;
}

std::vector<AnnotationPolygon> place_regions(const SynthConfig& cfg, int count, Label label,
                                             const char* id_prefix,
                                             std::vector<BoundingBox>& taken, Rng& rng) {
    constexpr int kRetryCap = 500;
    constexpr double kEdgeMargin = 2.0;
    std::vector<AnnotationPolygon> regions;
    for (int i = 0; i < count; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < kRetryCap && !placed; ++attempt) {
            const double base = rng.uniform_double(cfg.shape_scale_min, cfg.shape_scale_max);
            const double aspect = rng.uniform_double(0.75, 1.0);
            const double angle = rng.uniform_double(0.0, 3.14159265358979323846);
            const double reach = base * 1.3;
            const double cx = rng.uniform_double(reach + kEdgeMargin,
                                                 cfg.width - reach - kEdgeMargin);
            const double cy = rng.uniform_double(reach + kEdgeMargin,
                                                 cfg.height - reach - kEdgeMargin);
            AnnotationPolygon poly = amoeboid_polygon(cx, cy, base, aspect, angle, rng);
            const BoundingBox bb = polygon_bbox(poly);
            if (bb.min_x < kEdgeMargin || bb.min_y < kEdgeMargin ||
                bb.max_x > cfg.width - kEdgeMargin || bb.max_y > cfg.height - kEdgeMargin) {
                continue;  // region overflows the scene
            }
            if (!bbox_clear(bb, taken, 4.0)) continue;
            poly.label = label;
            poly.id = std::string(id_prefix) + std::to_string(i);
            taken.push_back(bb);
            regions.push_back(std::move(poly));
            placed = true;
        }
        if (!placed) {
            fail("could not place region " + std::to_string(i) + " of " +
                 std::to_string(count) + " without overflowing the scene; reduce "
                 "landslide_count or shape scale");
        }
    }
    return regions;
}

// Multi-octave value noise in [0,1], bilinear lattice interpolation with a
// smoothstep fade.
std::vector<double> value_noise(int h, int w, double persistence, Rng& rng) {
    std::vector<double> field(static_cast<size_t>(h) * w, 0.0);
    double amp = 1.0;
    for (int cell = 64; cell >= 4; cell /= 2) {
        const int gw = w / cell + 2;
        const int gh = h / cell + 2;
        std::vector<double> lattice(static_cast<size_t>(gw) * gh);
        for (double& v : lattice) v = rng.unit_double();
        for (int r = 0; r < h; ++r) {
            const int gy = r / cell;
            double ty = static_cast<double>(r % cell) / cell;
            ty = ty * ty * (3.0 - 2.0 * ty);
            for (int c = 0; c < w; ++c) {
                const int gx = c / cell;
                double tx = static_cast<double>(c % cell) / cell;
                tx = tx * tx * (3.0 - 2.0 * tx);
                const double v00 = lattice[static_cast<size_t>(gy) * gw + gx];
                const double v01 = lattice[static_cast<size_t>(gy) * gw + gx + 1];
                const double v10 = lattice[static_cast<size_t>(gy + 1) * gw + gx];
                const double v11 = lattice[static_cast<size_t>(gy + 1) * gw + gx + 1];
                const double top = v00 + tx * (v01 - v00);
                const double bot = v10 + tx * (v11 - v10);
                field[static_cast<size_t>(r) * w + c] += amp * (top + ty * (bot - top));
            }
        }
        amp *= persistence;
    }
    const auto [lo, hi] = std::minmax_element(field.begin(), field.end());
    const double range = *hi - *lo;
    for (double& v : field) v = range > 0.0 ? (v - *lo) / range : 0.0;
    return field;
}

// Speckled amplitude band: sqrt(mean_intensity * gamma_L) with the after
// image scaled by the contrast ratio inside the truth mask.
Grid sar_band(const SynthConfig& cfg, const Mask& mask, double mean_intensity,
              double amplitude_contrast, bool after, const std::string& name, Rng& rng) {
    Grid g = blank_band(cfg, name);
    for (int r = 0; r < cfg.height; ++r) {
        for (int c = 0; c < cfg.width; ++c) {
            const double intensity = mean_intensity * rng.gamma_mean1(cfg.looks);
            double amp = std::sqrt(intensity);
            if (after && mask.at(r, c)) amp *= amplitude_contrast;
            g.at(0, r, c) = static_cast<float>(amp);
        }
    }
    return g;
}

}  // namespace

Grid slope_from_dem(const Grid& dem) {
    require(dem.bands == 1, "slope_from_dem expects a single-band DEM");
    require(dem.width >= 3 && dem.height >= 3, "DEM must be at least 3x3");
    const double px = dem.geotransform[1];
    const double py = -dem.geotransform[5];
    Grid slope(dem.width, dem.height, 1);
    slope.geotransform = dem.geotransform;
    slope.band_names[0] = "Slope";
    for (int r = 0; r < dem.height; ++r) {
        for (int c = 0; c < dem.width; ++c) {
            double gx, gy;
            if (c == 0) {
                gx = (dem.at(0, r, 1) - dem.at(0, r, 0)) / px;
            } else if (c == dem.width - 1) {
                gx = (dem.at(0, r, c) - dem.at(0, r, c - 1)) / px;
            } else {
                gx = (dem.at(0, r, c + 1) - dem.at(0, r, c - 1)) / (2.0 * px);
            }
            if (r == 0) {
                gy = (dem.at(0, 1, c) - dem.at(0, 0, c)) / py;
            } else if (r == dem.height - 1) {
                gy = (dem.at(0, r, c) - dem.at(0, r - 1, c)) / py;
            } else {
                gy = (dem.at(0, r + 1, c) - dem.at(0, r - 1, c)) / (2.0 * py);
            }
            const double grade = std::sqrt(gx * gx + gy * gy);
            slope.at(0, r, c) =
                static_cast<float>(std::atan(grade) * (180.0 / 3.14159265358979323846));
        }
    }
    return slope;
}

SynthScene generate(const SynthConfig& cfg) {
    validate_synth_config(cfg);
    Rng rng(cfg.seed);
    SynthScene scene;

    // Regions first: the truth mask drives every band.
    std::vector<BoundingBox> taken;
    scene.truth_polygons =
        place_regions(cfg, cfg.landslide_count, Label::Landslide, "ls_", taken, rng);
    const int background_count =
        cfg.non_landslide_count >= 0 ? cfg.non_landslide_count : cfg.landslide_count;
    scene.background_polygons =
        place_regions(cfg, background_count, Label::NonLandslide, "bg_", taken, rng);

    scene.truth_mask = Mask(cfg.height, cfg.width);
    for (const auto& poly : scene.truth_polygons) {
        const Mask m = rasterize_polygon(poly, cfg.height, cfg.width);
        for (size_t i = 0; i < m.cells.size(); ++i) {
            if (m.cells[i]) scene.truth_mask.cells[i] = 1;
        }
    }

    scene.vv_before = sar_band(cfg, scene.truth_mask, cfg.backscatter_vv, cfg.contrast_vv,
                               false, "VV_before", rng);
    scene.vv_after = sar_band(cfg, scene.truth_mask, cfg.backscatter_vv, cfg.contrast_vv,
                              true, "VV_after", rng);
    scene.vh_before = sar_band(cfg, scene.truth_mask, cfg.backscatter_vh, cfg.contrast_vh,
                               false, "VH_before", rng);
    scene.vh_after = sar_band(cfg, scene.truth_mask, cfg.backscatter_vh, cfg.contrast_vh,
                              true, "VH_after", rng);

    const auto terrain = value_noise(cfg.height, cfg.width, cfg.terrain_roughness, rng);
    scene.dem = blank_band(cfg, "DEM");
    for (int r = 0; r < cfg.height; ++r) {
        for (int c = 0; c < cfg.width; ++c) {
            scene.dem.at(0, r, c) =
                static_cast<float>(40.0 + 260.0 * terrain[static_cast<size_t>(r) * cfg.width + c]);
        }
    }
    scene.slope = slope_from_dem(scene.dem);

    // Optical proxy: green-textured background, brown-toned landslide scars
    // with matched noise. Deliberately the easiest channel.
    scene.rgb = Grid(cfg.width, cfg.height, 3);
    scene.rgb.geotransform = kSceneGeotransform;
    scene.rgb.band_names = {"Red", "Green", "Blue"};
    constexpr float kBackground[3] = {0.27f, 0.52f, 0.21f};
    constexpr float kScar[3] = {0.54f, 0.40f, 0.24f};
    for (int r = 0; r < cfg.height; ++r) {
        for (int c = 0; c < cfg.width; ++c) {
            const bool inside = scene.truth_mask.at(r, c);
            for (int b = 0; b < 3; ++b) {
                const float base = inside ? kScar[b] : kBackground[b];
                const float noise = rng.uniform(-0.04f, 0.04f);
                scene.rgb.at(b, r, c) = std::clamp(base + noise, 0.0f, 1.0f);
            }
        }
    }
    return scene;
}

void write_scene(const SynthScene& scene, const SynthConfig& cfg, const std::string& dir) {
    fs::create_directories(dir);
    const fs::path root(dir);
    write_grid(scene.vv_before, (root / "vv_before.grid").string());
    write_grid(scene.vv_after, (root / "vv_after.grid").string());
    write_grid(scene.vh_before, (root / "vh_before.grid").string());
    write_grid(scene.vh_after, (root / "vh_after.grid").string());
    write_grid(scene.dem, (root / "dem.grid").string());
    write_grid(scene.slope, (root / "slope.grid").string());
    write_grid(scene.rgb, (root / "rgb.grid").string());

    std::vector<AnnotationPolygon> polys = scene.truth_polygons;
    polys.insert(polys.end(), scene.background_polygons.begin(),
                 scene.background_polygons.end());
    write_polygons_geojson(polys, (root / "polygons.geojson").string());

    const json manifest = {
        {"seed", cfg.seed},
        {"config",
         {{"width", cfg.width},
          {"height", cfg.height},
          {"landslide_count", cfg.landslide_count},
          {"non_landslide_count", cfg.non_landslide_count},
          {"shape_scale_min", cfg.shape_scale_min},
          {"shape_scale_max", cfg.shape_scale_max},
          {"backscatter_vv", cfg.backscatter_vv},
          {"backscatter_vh", cfg.backscatter_vh},
          {"looks", cfg.looks},
          {"contrast_vv", cfg.contrast_vv},
          {"contrast_vh", cfg.contrast_vh},
          {"terrain_roughness", cfg.terrain_roughness}}},
        {"bands",
         {{"vv_before", "vv_before.grid"},
          {"vv_after", "vv_after.grid"},
          {"vh_before", "vh_before.grid"},
          {"vh_after", "vh_after.grid"},
          {"dem", "dem.grid"},
          {"slope", "slope.grid"},
          {"rgb", "rgb.grid"}}},
        {"polygons", "polygons.geojson"},
    };
    std::ofstream mf(root / "manifest.json");
    require(mf.good(), "cannot write scene manifest in " + dir);
    mf << manifest.dump(2) << "\n";
    require(mf.good(), "failed writing scene manifest in " + dir);
}

std::map<std::string, Grid> load_scene_sources(const std::string& dir) {
    const fs::path root(dir);
    std::map<std::string, Grid> sources;
    sources["VV_before"] = read_grid((root / "vv_before.grid").string());
    sources["VV_after"] = read_grid((root / "vv_after.grid").string());
    sources["VH_before"] = read_grid((root / "vh_before.grid").string());
    sources["VH_after"] = read_grid((root / "vh_after.grid").string());
    sources["DEM"] = read_grid((root / "dem.grid").string());
    sources["Slope"] = read_grid((root / "slope.grid").string());
    const Grid rgb = read_grid((root / "rgb.grid").string());
    require(rgb.bands == 3, "rgb.grid must hold 3 bands");
    sources["Red"] = extract_band(rgb, 0, "Red");
    sources["Green"] = extract_band(rgb, 1, "Green");
    sources["Blue"] = extract_band(rgb, 2, "Blue");
    return sources;
}

}  // namespace landslide
