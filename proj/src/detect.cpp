#include "landslide/detect.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"

namespace landslide {

namespace fs = std::filesystem;
using nlohmann::json;
using nn::Tensor4;

namespace {

inline float lerp(float a, float b, float t) { return a + t * (b - a); }

}  // namespace

void resample_bilinear(const float* src, int src_h, int src_w, int channels, float* dst,
                       int dst_h, int dst_w) {
    const float sy = dst_h > 1 ? static_cast<float>(src_h - 1) / (dst_h - 1) : 0.0f;
    const float sx = dst_w > 1 ? static_cast<float>(src_w - 1) / (dst_w - 1) : 0.0f;
    for (int r = 0; r < dst_h; ++r) {
        const float fy = r * sy;
        const int y0 = std::min(static_cast<int>(fy), src_h - 1);
        const int y1 = std::min(y0 + 1, src_h - 1);
        const float ty = fy - y0;
        for (int c = 0; c < dst_w; ++c) {
            const float fx = c * sx;
            const int x0 = std::min(static_cast<int>(fx), src_w - 1);
            const int x1 = std::min(x0 + 1, src_w - 1);
            const float tx = fx - x0;
            const float* p00 = src + (static_cast<size_t>(y0) * src_w + x0) * channels;
            const float* p01 = src + (static_cast<size_t>(y0) * src_w + x1) * channels;
            const float* p10 = src + (static_cast<size_t>(y1) * src_w + x0) * channels;
            const float* p11 = src + (static_cast<size_t>(y1) * src_w + x1) * channels;
            float* out = dst + (static_cast<size_t>(r) * dst_w + c) * channels;
            for (int b = 0; b < channels; ++b) {
                out[b] = lerp(lerp(p00[b], p01[b], tx), lerp(p10[b], p11[b], tx), ty);
            }
        }
    }
}

std::vector<float> resample_patch(const std::vector<float>& pixels, int dst_h, int dst_w) {
    require(pixels.size() == static_cast<size_t>(kPatchSize) * kPatchSize * kPatchBands,
            "resample_patch expects 25x25x3 pixels");
    std::vector<float> out(static_cast<size_t>(dst_h) * dst_w * kPatchBands);
    resample_bilinear(pixels.data(), kPatchSize, kPatchSize, kPatchBands, out.data(), dst_h,
                      dst_w);
    return out;
}

namespace {

// Classifies windows [begin, end) of the row-major position list, writing
// Landslide probabilities into probs[i]. Reads only frozen state, so worker
// threads can share it.
void classify_range(const Grid& scene, const nn::Model& model, const SlideConfig& cfg,
                    const std::vector<std::pair<int, int>>& positions, size_t begin,
                    size_t end, std::vector<float>& probs) {
    const int in_h = model.input.h, in_w = model.input.w;
    std::vector<float> window(static_cast<size_t>(kPatchSize) * kPatchSize * kPatchBands);
    for (size_t start = begin; start < end; start += cfg.batch) {
        const size_t count = std::min(static_cast<size_t>(cfg.batch), end - start);
        Tensor4 batch(static_cast<int>(count), in_h, in_w, kPatchBands);
        for (size_t i = 0; i < count; ++i) {
            const auto [wr, wc] = positions[start + i];
            for (int r = 0; r < kPatchSize; ++r) {
                for (int c = 0; c < kPatchSize; ++c) {
                    for (int b = 0; b < kPatchBands; ++b) {
                        window[(static_cast<size_t>(r) * kPatchSize + c) * kPatchBands + b] =
                            scene.at(b, wr + r, wc + c);
                    }
                }
            }
            resample_bilinear(window.data(), kPatchSize, kPatchSize, kPatchBands,
                              &batch.at(static_cast<int>(i), 0, 0, 0), in_h, in_w);
        }
        const Tensor4 out = model.forward(batch, nn::Mode::Infer);
        for (size_t i = 0; i < count; ++i) {
            probs[start + i] = out.at(static_cast<int>(i), 0, 0, 1);
        }
    }
}

}  // namespace

DetectionSet slide(const Grid& scene, const nn::Model& model, const SlideConfig& cfg) {
    require(scene.bands == kPatchBands, "slide expects a 3-band scene");
    require(scene.height >= kPatchSize && scene.width >= kPatchSize,
            "scene is smaller than the sliding window");
    require(model.input.c == kPatchBands, "model input must have 3 channels");
    require(cfg.step >= 1, "step must be >= 1");
    require(cfg.batch >= 1, "batch must be >= 1");
    require(cfg.threads >= 1, "threads must be >= 1");

    std::vector<std::pair<int, int>> positions;
    for (int r = 0; r + kPatchSize <= scene.height; r += cfg.step) {
        for (int c = 0; c + kPatchSize <= scene.width; c += cfg.step) {
            positions.emplace_back(r, c);
        }
    }

    std::vector<float> probs(positions.size(), 0.0f);
    const int workers = static_cast<int>(
        std::min<size_t>(static_cast<size_t>(cfg.threads), positions.size()));
    if (workers <= 1) {
        classify_range(scene, model, cfg, positions, 0, positions.size(), probs);
    } else {
        // Contiguous chunks with results landing in preassigned slots: the
        // output is identical to the sequential scan regardless of
        // completion order.
        std::vector<std::thread> pool;
        const size_t chunk = (positions.size() + workers - 1) / workers;
        for (int t = 0; t < workers; ++t) {
            const size_t begin = t * chunk;
            const size_t end = std::min(begin + chunk, positions.size());
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                classify_range(scene, model, cfg, positions, begin, end, probs);
            });
        }
        for (auto& th : pool) th.join();
    }

    DetectionSet ds;
    ds.step = cfg.step;
    ds.scene_height = scene.height;
    ds.scene_width = scene.width;
    ds.probability_raster = Grid(scene.width, scene.height, 1);
    ds.probability_raster.geotransform = scene.geotransform;
    ds.probability_raster.nodata = -1.0f;
    ds.probability_raster.band_names[0] = "landslide_probability";
    std::fill(ds.probability_raster.data.begin(), ds.probability_raster.data.end(), -1.0f);

    const int half = kPatchSize / 2;
    for (size_t i = 0; i < positions.size(); ++i) {
        const auto [wr, wc] = positions[i];
        const int cr = wr + half, cc = wc + half;
        ds.probability_raster.at(0, cr, cc) = probs[i];
        if (static_cast<double>(probs[i]) > cfg.threshold) {
            ds.detections.push_back({cr, cc, probs[i]});
        }
    }
    return ds;
}

void export_detections(const DetectionSet& ds, const std::string& dir) {
    fs::create_directories(dir);
    const fs::path root(dir);

    json features = json::array();
    for (const auto& d : ds.detections) {
        const auto [gx, gy] =
            ds.probability_raster.to_geo(d.center_col + 0.5, d.center_row + 0.5);
        features.push_back({
            {"type", "Feature"},
            {"geometry", {{"type", "Point"}, {"coordinates", {gx, gy}}}},
            {"properties",
             {{"row", d.center_row},
              {"col", d.center_col},
              {"probability", static_cast<double>(d.probability)}}},
        });
    }
    const json doc = {{"type", "FeatureCollection"}, {"features", features}};
    std::ofstream gf(root / "detections.geojson");
    require(gf.good(), "cannot write detections.geojson in " + dir);
    gf << doc.dump(2) << "\n";
    require(gf.good(), "failed writing detections.geojson in " + dir);

    std::ofstream cf(root / "detections.csv");
    require(cf.good(), "cannot write detections.csv in " + dir);
    cf << "row,col,probability\n";
    char line[96];
    for (const auto& d : ds.detections) {
        std::snprintf(line, sizeof(line), "%d,%d,%.9g\n", d.center_row, d.center_col,
                      static_cast<double>(d.probability));
        cf << line;
    }
    require(cf.good(), "failed writing detections.csv in " + dir);

    write_grid(ds.probability_raster, (root / "probability.grid").string());
}

}  // namespace landslide
