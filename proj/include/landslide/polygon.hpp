#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "landslide/common.hpp"

namespace landslide {

enum class Label : uint8_t { NonLandslide = 0, Landslide = 1 };

const char* label_text(Label l);
Label label_from_text(const std::string& s);

// Annotation ring in grid pixel coordinates, stored open (first vertex not
// repeated). Must be simple and have nonzero area.
struct AnnotationPolygon {
    std::vector<std::pair<double, double>> vertices;  // (x, y)
    Label label = Label::NonLandslide;
    std::string id;
};

// Signed shoelace area.
double polygon_area(const AnnotationPolygon& p);

struct BoundingBox {
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
};
BoundingBox polygon_bbox(const AnnotationPolygon& p);

// Throws on rings with fewer than 3 vertices, zero area, or
// self-intersections.
void validate_polygon(const AnnotationPolygon& p);

struct Mask {
    int rows = 0, cols = 0;
    std::vector<uint8_t> cells;

    Mask() = default;
    Mask(int rows_, int cols_) : rows(rows_), cols(cols_), cells(size_t(rows_) * cols_, 0) {}
    bool at(int r, int c) const { return cells[static_cast<size_t>(r) * cols + c] != 0; }
    void set(int r, int c, bool v) { cells[static_cast<size_t>(r) * cols + c] = v ? 1 : 0; }
    size_t count() const;
};

// Even-odd rasterization: a cell is set iff its center (c+0.5, r+0.5) lies
// inside the ring.
Mask rasterize_polygon(const AnnotationPolygon& poly, int rows, int cols);

// Even-odd point-in-polygon test (horizontal ray).
bool point_in_polygon(const AnnotationPolygon& poly, double x, double y);

// GeoJSON FeatureCollection of pixel-space Polygons; each feature carries a
// "label" property ("landslide" | "non_landslide").
std::vector<AnnotationPolygon> load_polygons_geojson(const std::string& path);
void write_polygons_geojson(const std::vector<AnnotationPolygon>& polys, const std::string& path);

}  // namespace landslide
