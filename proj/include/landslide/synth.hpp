#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "landslide/grid.hpp"
#include "landslide/polygon.hpp"

namespace landslide {

// Configuration for a synthetic before/after scene with known landslide
// truth. SAR amplitudes carry multi-looked gamma speckle; the after image
// multiplies the amplitude inside landslide regions by the contrast factor.
struct SynthConfig {
    int width = 384;
    int height = 384;
    int landslide_count = 12;
    int non_landslide_count = -1;  // -1: same as landslide_count
    float shape_scale_min = 16.0f;  // region radius range, pixels
    float shape_scale_max = 26.0f;
    float backscatter_vv = 0.35f;  // mean intensity before the event
    float backscatter_vh = 0.12f;
    int looks = 4;
    float contrast_vv = 2.0f;  // amplitude ratio inside landslides, after image
    float contrast_vh = 1.7f;
    float terrain_roughness = 0.55f;  // octave persistence of the fractal DEM
    uint64_t seed = 0;
};

void validate_synth_config(const SynthConfig& cfg);

struct SynthScene {
    Grid vv_before, vv_after, vh_before, vh_after, dem, slope, rgb;
    Mask truth_mask;  // true exactly where amplitude contrast was injected
    std::vector<AnnotationPolygon> truth_polygons;       // landslide regions
    std::vector<AnnotationPolygon> background_polygons;  // non-landslide sampling areas
};

// Deterministic per seed. Landslide regions are amoeboid radial polygons
// placed without mutual overlap; placement failures are retried up to a cap
// and then rejected.
SynthScene generate(const SynthConfig& cfg);

// slope_deg = atan(|grad dem|) with central differences over ground units;
// borders use one-sided differences.
Grid slope_from_dem(const Grid& dem);

// Writes all bands as Grid files, both polygon sets as polygons.geojson, and
// a manifest echoing the config.
void write_scene(const SynthScene& scene, const SynthConfig& cfg, const std::string& dir);

// Loads the per-band grids of a scene directory into composite sources
// keyed by band symbol (VV_before, ..., DEM, Slope, Red, Green, Blue).
std::map<std::string, Grid> load_scene_sources(const std::string& dir);

}  // namespace landslide
