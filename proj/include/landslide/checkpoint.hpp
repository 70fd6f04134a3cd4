#pragma once

#include <optional>
#include <string>

#include "landslide/grid.hpp"
#include "landslide/nn/adam.hpp"
#include "landslide/nn/model.hpp"

namespace landslide {

// Checkpoint layout: magic "SSLD", u16 version, u8 flags (bit 0: Adam state
// present), u32 length-prefixed JSON layer-spec block, then per-parameter
// little-endian float32 blobs in layer order (weights then bias per
// parametric layer), then Adam m/v blobs in the same order when flagged.
// The JSON block also carries the normalization ranges used at sampling
// time so inference can replay them.
struct Checkpoint {
    nn::Model model;
    std::optional<nn::AdamState> adam;
    std::optional<NormalizationSpec> norm;
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace landslide
