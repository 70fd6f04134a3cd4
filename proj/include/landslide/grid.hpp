#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "landslide/common.hpp"

namespace landslide {

// Georeferenced float32 raster. Data is band-sequential, row-major within
// each band. Geotransform follows the usual 6-number affine convention
// (origin_x, pixel_w, 0, origin_y, 0, -pixel_h) in ground units (meters).
struct Grid {
    int width = 0;
    int height = 0;
    int bands = 0;
    std::vector<float> data;
    std::array<double, 6> geotransform = {0.0, 1.0, 0.0, 0.0, 0.0, -1.0};
    std::optional<float> nodata;
    std::vector<std::string> band_names;

    Grid() = default;
    Grid(int width_, int height_, int bands_);

    size_t index(int band, int row, int col) const {
        return (static_cast<size_t>(band) * height + row) * width + col;
    }
    float& at(int band, int row, int col) { return data[index(band, row, col)]; }
    float at(int band, int row, int col) const { return data[index(band, row, col)]; }

    size_t pixels_per_band() const { return static_cast<size_t>(width) * height; }

    bool is_nodata(float v) const { return nodata.has_value() && *nodata == v; }

    // Geotransform applied to a pixel-space point (px along columns, py along
    // rows).
    std::pair<double, double> to_geo(double px, double py) const {
        return {geotransform[0] + px * geotransform[1] + py * geotransform[2],
                geotransform[3] + px * geotransform[4] + py * geotransform[5]};
    }

    bool same_footprint(const Grid& other) const;
};

// Throws DataError when any Grid invariant is violated.
void validate_grid(const Grid& g);

// Grid files come as a "<stem>.grid" JSON header plus a "<stem>.bin" raw
// little-endian float32 payload. Both functions accept either the stem or
// the header path.
Grid read_grid(const std::string& path);
void write_grid(const Grid& g, const std::string& path);

// Pixelwise a - b for single-band grids sharing shape and geotransform.
// Nodata in either input propagates.
Grid band_difference(const Grid& a, const Grid& b);

// Copies one band out of a multi-band grid.
Grid extract_band(const Grid& g, int band, std::string name = "");

struct BandRange {
    float lo = 0.0f;
    float hi = 0.0f;
};

struct NormalizationSpec {
    enum class Mode { MinMax, Fixed };
    Mode mode = Mode::MinMax;
    std::vector<BandRange> bands;  // computed stats (MinMax) or given ranges (Fixed)
};

// Per-band affine rescale to [0,1]. MinMax mode computes (min,max) per band
// over non-nodata pixels; Fixed mode replays previously computed ranges and
// clamps. Constant bands map to all zeros. Nodata pixels pass through
// untouched. Returns the rescaled grid plus a Fixed-mode spec holding the
// ranges actually applied, so the identical transform can be replayed on
// inference-time scenes.
std::pair<Grid, NormalizationSpec> normalize(const Grid& g, const NormalizationSpec& spec = {});

}  // namespace landslide
