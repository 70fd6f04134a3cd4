#include "landslide/augment.hpp"

#include <algorithm>
#include <cmath>

namespace landslide {

void validate_augmentation(const AugmentationConfig& cfg) {
    require(cfg.max_rotation >= 0.0f && cfg.max_rotation <= 180.0f,
            "max_rotation must lie in [0,180] degrees");
    require(cfg.max_zoom >= 0.0f && cfg.max_zoom <= 0.5f, "max_zoom must lie in [0,0.5]");
    require(cfg.max_translation >= 0.0f && cfg.max_translation <= 0.5f,
            "max_translation must lie in [0,0.5]");
}

namespace {

constexpr int kN = kPatchSize;
constexpr int kC = kPatchBands;

inline size_t pix(int r, int c, int b) {
    return (static_cast<size_t>(r) * kN + c) * kC + b;
}

inline float lerp(float a, float b, float t) { return a + t * (b - a); }

}  // namespace

Patch warp_patch(const Patch& patch, bool flip_h, bool flip_v, float rotation_deg,
                 float scale, float dx, float dy) {
    require(patch.pixels.size() == static_cast<size_t>(kN) * kN * kC,
            "warp_patch expects a 25x25x3 patch");
    require(scale > 0.0f, "warp scale must be positive");

    Patch flipped = patch;
    if (flip_h || flip_v) {
        for (int r = 0; r < kN; ++r) {
            const int sr = flip_v ? kN - 1 - r : r;
            for (int c = 0; c < kN; ++c) {
                const int sc = flip_h ? kN - 1 - c : c;
                for (int b = 0; b < kC; ++b) {
                    flipped.pixels[pix(r, c, b)] = patch.pixels[pix(sr, sc, b)];
                }
            }
        }
    }

    // Inverse-mapped affine about the patch center: the content is rotated
    // by theta, scaled, then translated, so each output pixel samples
    // rotate(-theta)((out - center - d) / s) + center.
    const float theta = rotation_deg * static_cast<float>(3.14159265358979323846 / 180.0);
    const float ct = std::cos(theta);
    const float st = std::sin(theta);
    const float cx = (kN - 1) / 2.0f;
    const float cy = (kN - 1) / 2.0f;

    Patch out = flipped;
    out.label = patch.label;
    for (int r = 0; r < kN; ++r) {
        for (int c = 0; c < kN; ++c) {
            const float ux = (c - cx - dx) / scale;
            const float uy = (r - cy - dy) / scale;
            float sx = cx + ct * ux + st * uy;
            float sy = cy - st * ux + ct * uy;
            // Edge replication.
            sx = std::clamp(sx, 0.0f, static_cast<float>(kN - 1));
            sy = std::clamp(sy, 0.0f, static_cast<float>(kN - 1));
            const int x0 = static_cast<int>(sx);
            const int y0 = static_cast<int>(sy);
            const int x1 = std::min(x0 + 1, kN - 1);
            const int y1 = std::min(y0 + 1, kN - 1);
            const float fx = sx - x0;
            const float fy = sy - y0;
            for (int b = 0; b < kC; ++b) {
                const float top = lerp(flipped.pixels[pix(y0, x0, b)],
                                       flipped.pixels[pix(y0, x1, b)], fx);
                const float bot = lerp(flipped.pixels[pix(y1, x0, b)],
                                       flipped.pixels[pix(y1, x1, b)], fx);
                out.pixels[pix(r, c, b)] = std::clamp(lerp(top, bot, fy), 0.0f, 1.0f);
            }
        }
    }
    return out;
}

Patch augment(const Patch& patch, const AugmentationConfig& cfg, Rng& draw) {
    validate_augmentation(cfg);
    const bool flip_h = cfg.flip_horizontal && draw.coin();
    const bool flip_v = cfg.flip_vertical && draw.coin();
    const float rotation = draw.uniform(-cfg.max_rotation, cfg.max_rotation);
    const float scale = draw.uniform(1.0f - cfg.max_zoom, 1.0f + cfg.max_zoom);
    const float dx = draw.uniform(-cfg.max_translation, cfg.max_translation) * kN;
    const float dy = draw.uniform(-cfg.max_translation, cfg.max_translation) * kN;
    return warp_patch(patch, flip_h, flip_v, rotation, scale, dx, dy);
}

}  // namespace landslide
