#pragma once

#include <cstdint>

#include "landslide/random.hpp"
#include "landslide/sampling.hpp"

namespace landslide {

struct AugmentationConfig {
    bool flip_horizontal = true;
    bool flip_vertical = true;
    float max_rotation = 15.0f;     // degrees
    float max_zoom = 0.1f;          // fraction of unit scale
    float max_translation = 0.1f;   // fraction of patch size
    uint64_t seed = 0;

    bool is_identity() const {
        return !flip_horizontal && !flip_vertical && max_rotation == 0.0f &&
               max_zoom == 0.0f && max_translation == 0.0f;
    }
};

void validate_augmentation(const AugmentationConfig& cfg);

// Deterministic transform core: flips are exact index remaps, then one
// bilinear warp applies rotation (degrees), scale, and translation (pixels)
// about the patch center, with edge replication outside the frame and the
// result clamped to [0,1]. Label and shape are preserved.
Patch warp_patch(const Patch& patch, bool flip_h, bool flip_v, float rotation_deg,
                 float scale, float dx, float dy);

// Random augmentation: draws, in order, the horizontal flip coin (when
// enabled), the vertical flip coin (when enabled), rotation
// U[-max_rotation, max_rotation], zoom U[1-max_zoom, 1+max_zoom], and
// translation U[-max_translation, max_translation] * 25 per axis, then
// applies warp_patch.
Patch augment(const Patch& patch, const AugmentationConfig& cfg, Rng& draw);

}  // namespace landslide
