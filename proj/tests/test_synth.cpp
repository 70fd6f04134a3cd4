#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "landslide/composite.hpp"
#include "landslide/synth.hpp"

using namespace landslide;

namespace {

SynthConfig small_config(uint64_t seed) {
    SynthConfig cfg;
    cfg.width = 192;
    cfg.height = 192;
    cfg.landslide_count = 4;
    cfg.non_landslide_count = 4;
    cfg.seed = seed;
    return cfg;
}

double mean_in_mask(const Grid& g, const Mask& mask, bool inside) {
    double acc = 0.0;
    size_t count = 0;
    for (int r = 0; r < g.height; ++r) {
        for (int c = 0; c < g.width; ++c) {
            if (mask.at(r, c) == inside) {
                acc += g.at(0, r, c);
                ++count;
            }
        }
    }
    return acc / static_cast<double>(count);
}

}  // namespace

TEST_CASE("zero landslides leave the mask empty and the images alike") {
    SynthConfig cfg = small_config(3);
    cfg.landslide_count = 0;
    cfg.non_landslide_count = 3;
    const SynthScene scene = generate(cfg);
    CHECK(scene.truth_mask.count() == 0);
    CHECK(scene.truth_polygons.empty());
    // Identically distributed before/after: means agree within speckle noise.
    double before = 0.0, after = 0.0;
    for (size_t i = 0; i < scene.vv_before.data.size(); ++i) {
        before += scene.vv_before.data[i];
        after += scene.vv_after.data[i];
    }
    CHECK(after / before == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("generation is deterministic per seed") {
    const SynthScene a = generate(small_config(11));
    const SynthScene b = generate(small_config(11));
    CHECK(testutil::bitwise_equal(a.vv_after.data, b.vv_after.data));
    CHECK(testutil::bitwise_equal(a.rgb.data, b.rgb.data));
    CHECK(testutil::bitwise_equal(a.dem.data, b.dem.data));
    CHECK(a.truth_mask.cells == b.truth_mask.cells);
    REQUIRE(a.truth_polygons.size() == b.truth_polygons.size());
    for (size_t i = 0; i < a.truth_polygons.size(); ++i) {
        CHECK(a.truth_polygons[i].vertices == b.truth_polygons[i].vertices);
    }
    const SynthScene c = generate(small_config(12));
    CHECK(!testutil::bitwise_equal(a.vv_after.data, c.vv_after.data));
}

TEST_CASE("amplitude contrast lands near the configured ratio inside the mask") {
    SynthConfig cfg = small_config(21);
    cfg.contrast_vv = 2.0f;
    const SynthScene scene = generate(cfg);
    REQUIRE(scene.truth_mask.count() > 500);
    const double ratio = mean_in_mask(scene.vv_after, scene.truth_mask, true) /
                         mean_in_mask(scene.vv_before, scene.truth_mask, true);
    CHECK(ratio > 1.8);
    CHECK(ratio < 2.2);
}

TEST_CASE("statistical detectability: separation above one pooled sigma") {
    SynthConfig cfg = small_config(22);
    cfg.contrast_vv = 2.0f;
    const SynthScene scene = generate(cfg);
    double sum_b = 0.0, sum_a = 0.0, sq_b = 0.0, sq_a = 0.0;
    size_t n = 0;
    for (int r = 0; r < cfg.height; ++r) {
        for (int c = 0; c < cfg.width; ++c) {
            if (!scene.truth_mask.at(r, c)) continue;
            const double vb = scene.vv_before.at(0, r, c);
            const double va = scene.vv_after.at(0, r, c);
            sum_b += vb;
            sum_a += va;
            sq_b += vb * vb;
            sq_a += va * va;
            ++n;
        }
    }
    REQUIRE(n > 0);
    const double mean_b = sum_b / n, mean_a = sum_a / n;
    const double var_b = sq_b / n - mean_b * mean_b;
    const double var_a = sq_a / n - mean_a * mean_a;
    const double pooled = std::sqrt(0.5 * (var_b + var_a));
    CHECK((mean_a - mean_b) / pooled > 1.0);
}

TEST_CASE("truth polygons reproduce the truth mask") {
    const SynthScene scene = generate(small_config(23));
    Mask rebuilt(scene.truth_mask.rows, scene.truth_mask.cols);
    for (const auto& poly : scene.truth_polygons) {
        const Mask m = rasterize_polygon(poly, rebuilt.rows, rebuilt.cols);
        for (size_t i = 0; i < m.cells.size(); ++i) {
            if (m.cells[i]) rebuilt.cells[i] = 1;
        }
    }
    size_t inter = 0, uni = 0;
    for (size_t i = 0; i < rebuilt.cells.size(); ++i) {
        const bool a = rebuilt.cells[i] != 0;
        const bool b = scene.truth_mask.cells[i] != 0;
        inter += a && b;
        uni += a || b;
    }
    REQUIRE(uni > 0);
    CHECK(static_cast<double>(inter) / static_cast<double>(uni) >= 0.95);
}

TEST_CASE("every composite recipe over a synthetic scene passes grid validation") {
    const SynthScene scene = generate(small_config(24));
    SourceMap sources;
    sources["VV_before"] = scene.vv_before;
    sources["VV_after"] = scene.vv_after;
    sources["VH_before"] = scene.vh_before;
    sources["VH_after"] = scene.vh_after;
    sources["DEM"] = scene.dem;
    sources["Slope"] = scene.slope;
    sources["Red"] = extract_band(scene.rgb, 0);
    sources["Green"] = extract_band(scene.rgb, 1);
    sources["Blue"] = extract_band(scene.rgb, 2);
    for (const auto& recipe : all_recipes()) {
        const Grid composite = compose(recipe, sources);
        validate_grid(composite);
        CHECK(composite.bands == 3);
    }
}

TEST_CASE("flat DEM has zero slope everywhere") {
    Grid dem(16, 16, 1);
    for (auto& v : dem.data) v = 120.0f;
    const Grid slope = slope_from_dem(dem);
    for (const float v : slope.data) CHECK(v == 0.0f);
}

TEST_CASE("a 45-degree plane has 45-degree interior slope") {
    Grid dem(32, 24, 1);
    dem.geotransform = {0.0, 10.0, 0.0, 0.0, 0.0, -10.0};
    for (int r = 0; r < dem.height; ++r) {
        for (int c = 0; c < dem.width; ++c) {
            dem.at(0, r, c) = 10.0f * static_cast<float>(c);  // gradient 1 in ground units
        }
    }
    const Grid slope = slope_from_dem(dem);
    for (int r = 1; r + 1 < dem.height; ++r) {
        for (int c = 1; c + 1 < dem.width; ++c) {
            CHECK(slope.at(0, r, c) == doctest::Approx(45.0).epsilon(1e-4));
        }
    }
}

TEST_CASE("a symmetric cone has a radially symmetric slope field") {
    Grid dem(33, 33, 1);
    dem.geotransform = {0.0, 1.0, 0.0, 0.0, 0.0, -1.0};
    const double k = 0.5;
    for (int r = 0; r < 33; ++r) {
        for (int c = 0; c < 33; ++c) {
            const double d = std::hypot(r - 16.0, c - 16.0);
            dem.at(0, r, c) = static_cast<float>(100.0 - k * d);
        }
    }
    const Grid slope = slope_from_dem(dem);
    const float expected = static_cast<float>(std::atan(k) * 180.0 / M_PI);
    for (int r = 4; r < 29; ++r) {
        for (int c = 4; c < 29; ++c) {
            if (std::abs(r - 16) < 3 && std::abs(c - 16) < 3) continue;  // apex kink
            CHECK(slope.at(0, r, c) == doctest::Approx(expected).epsilon(0.02));
            // Mirror symmetry across the center.
            CHECK(slope.at(0, r, c) == doctest::Approx(slope.at(0, 32 - r, 32 - c)).epsilon(1e-4));
        }
    }
}

TEST_CASE("slope rejects sub-3x3 DEMs and multi-band input") {
    Grid tiny(2, 2, 1);
    CHECK_THROWS_AS(slope_from_dem(tiny), DataError);
    Grid multi(8, 8, 2);
    CHECK_THROWS_AS(slope_from_dem(multi), DataError);
}

TEST_CASE("overcrowded scenes fail placement after the retry cap") {
    SynthConfig cfg;
    cfg.width = 64;
    cfg.height = 64;
    cfg.landslide_count = 30;
    cfg.non_landslide_count = 0;
    cfg.shape_scale_min = 14.0f;
    cfg.shape_scale_max = 20.0f;
    CHECK_THROWS_AS(generate(cfg), DataError);
}

TEST_CASE("scene directory layout round-trips through the loaders") {
    testutil::TempDir tmp("scene");
    SynthConfig cfg = small_config(31);
    const SynthScene scene = generate(cfg);
    write_scene(scene, cfg, tmp.str());

    const auto sources = load_scene_sources(tmp.str());
    CHECK(sources.size() == 9);
    CHECK(testutil::bitwise_equal(sources.at("VV_before").data, scene.vv_before.data));
    CHECK(testutil::bitwise_equal(sources.at("Red").data,
                                  extract_band(scene.rgb, 0).data));

    const auto polys = load_polygons_geojson(tmp.str("polygons.geojson"));
    CHECK(polys.size() == scene.truth_polygons.size() + scene.background_polygons.size());
    size_t landslides = 0;
    for (const auto& p : polys) landslides += p.label == Label::Landslide;
    CHECK(landslides == scene.truth_polygons.size());

    const auto manifest = nlohmann::json::parse(testutil::slurp(tmp.str("manifest.json")));
    CHECK(manifest.at("seed").get<uint64_t>() == 31);
    CHECK(manifest.at("config").at("landslide_count").get<int>() == 4);
}
