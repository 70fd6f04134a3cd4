#pragma once

#include <map>
#include <string>
#include <vector>

#include "landslide/grid.hpp"
#include "landslide/polygon.hpp"

namespace landslide {

inline constexpr int kPatchSize = 25;
inline constexpr int kPatchBands = 3;

// A labeled clip of the source composite. Pixels are row-major,
// channel-last, kPatchSize x kPatchSize x kPatchBands, all in [0,1].
struct Patch {
    std::vector<float> pixels;
    Label label = Label::NonLandslide;
    int origin_row = -1;
    int origin_col = -1;
    std::string source_polygon;
};

struct PatchSet {
    std::vector<Patch> train;
    std::vector<Patch> test;
    uint64_t seed = 0;
    std::map<std::string, std::string> split_assignment;  // polygon id -> "train" | "test"
};

size_t count_label(const std::vector<Patch>& patches, Label l);

struct ExtractOptions {
    int stride = 13;          // half-patch default
    double min_overlap = 0.5; // fraction of window pixels inside the polygon mask
};

// Tiles 25x25 windows at the given stride across each polygon's bounding
// box and keeps a window iff the fraction of its pixels inside the polygon
// mask is >= min_overlap. The grid must be 3-band and normalized to [0,1].
// Polygons whose bounding box is smaller than the patch are skipped with a
// warning on stderr; windows touching nodata pixels are skipped likewise.
std::vector<Patch> extract_patches(const Grid& grid,
                                   const std::vector<AnnotationPolygon>& polygons,
                                   const ExtractOptions& opt = {});

// Polygon-disjoint split: whole polygons are assigned to train or test so
// the test split holds roughly test_fraction of the patches per label.
// Deterministic for a fixed seed. Requires at least two patch-bearing
// polygons per label.
PatchSet split_patchset(const std::vector<Patch>& patches, double test_fraction, uint64_t seed);

// On-disk layout: manifest.json plus one float32 payload and one label byte
// file per split.
void save_patchset(const PatchSet& ps, const NormalizationSpec& norm, const std::string& dir);

struct LoadedPatchSet {
    PatchSet set;
    NormalizationSpec norm;
};
LoadedPatchSet load_patchset(const std::string& dir);

}  // namespace landslide
