#pragma once

#include <string>
#include <vector>

#include "landslide/grid.hpp"
#include "landslide/nn/model.hpp"
#include "landslide/sampling.hpp"

namespace landslide {

// Corner-aligned bilinear resampling of a channel-last image.
void resample_bilinear(const float* src, int src_h, int src_w, int channels, float* dst,
                       int dst_h, int dst_w);

// 25x25x3 patch pixels -> network input size (32x32x3 by default).
std::vector<float> resample_patch(const std::vector<float>& pixels, int dst_h = 32,
                                  int dst_w = 32);

struct Detection {
    int center_row = 0;
    int center_col = 0;
    float probability = 0.0f;  // Landslide probability
};

struct SlideConfig {
    int step = 2;
    int batch = 64;
    double threshold = 0.5;  // detection iff probability > threshold
    int threads = 1;
};

struct DetectionSet {
    std::vector<Detection> detections;  // row-major by window center
    int window = kPatchSize;
    int step = 2;
    int scene_height = 0;
    int scene_width = 0;
    Grid probability_raster;  // single band; probability at window centers, -1 elsewhere
};

// Exhaustive scene scan: 25x25 windows tiled at the configured step over all
// fully in-bounds positions, each resampled to the model input and
// classified in infer mode. The scene must be 3-band and normalized.
DetectionSet slide(const Grid& scene, const nn::Model& model, const SlideConfig& cfg = {});

// Writes detections.geojson (Points at window centers with a probability
// property), detections.csv ("row,col,probability"), and probability.grid.
void export_detections(const DetectionSet& ds, const std::string& dir);

}  // namespace landslide
