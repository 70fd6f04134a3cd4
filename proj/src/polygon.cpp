#include "landslide/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace landslide {

using nlohmann::json;

const char* label_text(Label l) {
    return l == Label::Landslide ? "landslide" : "non_landslide";
}

Label label_from_text(const std::string& s) {
    if (s == "landslide") return Label::Landslide;
    if (s == "non_landslide") return Label::NonLandslide;
    fail("unknown label '" + s + "' (expected landslide | non_landslide)");
}

double polygon_area(const AnnotationPolygon& p) {
    double acc = 0.0;
    const size_t n = p.vertices.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& [x1, y1] = p.vertices[i];
        const auto& [x2, y2] = p.vertices[(i + 1) % n];
        acc += x1 * y2 - x2 * y1;
    }
    return 0.5 * acc;
}

BoundingBox polygon_bbox(const AnnotationPolygon& p) {
    BoundingBox b{p.vertices[0].first, p.vertices[0].second,
                  p.vertices[0].first, p.vertices[0].second};
    for (const auto& [x, y] : p.vertices) {
        b.min_x = std::min(b.min_x, x);
        b.min_y = std::min(b.min_y, y);
        b.max_x = std::max(b.max_x, x);
        b.max_y = std::max(b.max_y, y);
    }
    return b;
}

namespace {

int orientation(double ax, double ay, double bx, double by, double cx, double cy) {
    const double v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    if (v > 0) return 1;
    if (v < 0) return -1;
    return 0;
}

bool on_segment(double ax, double ay, double bx, double by, double px, double py) {
    return std::min(ax, bx) <= px && px <= std::max(ax, bx) &&
           std::min(ay, by) <= py && py <= std::max(ay, by);
}

bool segments_intersect(double ax, double ay, double bx, double by,
                        double cx, double cy, double dx, double dy) {
    const int o1 = orientation(ax, ay, bx, by, cx, cy);
    const int o2 = orientation(ax, ay, bx, by, dx, dy);
    const int o3 = orientation(cx, cy, dx, dy, ax, ay);
    const int o4 = orientation(cx, cy, dx, dy, bx, by);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(ax, ay, bx, by, cx, cy)) return true;
    if (o2 == 0 && on_segment(ax, ay, bx, by, dx, dy)) return true;
    if (o3 == 0 && on_segment(cx, cy, dx, dy, ax, ay)) return true;
    if (o4 == 0 && on_segment(cx, cy, dx, dy, bx, by)) return true;
    return false;
}

}  // namespace

void validate_polygon(const AnnotationPolygon& p) {
    require(p.vertices.size() >= 3,
            "polygon '" + p.id + "' needs at least 3 vertices");
    if (std::abs(polygon_area(p)) < 1e-12) {
        fail("polygon '" + p.id + "' is degenerate (zero area)");
    }
    const size_t n = p.vertices.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& [ax, ay] = p.vertices[i];
        const auto& [bx, by] = p.vertices[(i + 1) % n];
        for (size_t j = i + 1; j < n; ++j) {
            // Skip edges adjacent to edge i (they share a vertex).
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            const auto& [cx, cy] = p.vertices[j];
            const auto& [dx, dy] = p.vertices[(j + 1) % n];
            if (segments_intersect(ax, ay, bx, by, cx, cy, dx, dy)) {
                fail("polygon '" + p.id + "' is self-intersecting");
            }
        }
    }
}

bool point_in_polygon(const AnnotationPolygon& poly, double x, double y) {
    bool inside = false;
    const size_t n = poly.vertices.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& [x1, y1] = poly.vertices[i];
        const auto& [x2, y2] = poly.vertices[(i + 1) % n];
        if ((y1 > y) != (y2 > y)) {
            const double xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1);
            if (x < xint) inside = !inside;
        }
    }
    return inside;
}

Mask rasterize_polygon(const AnnotationPolygon& poly, int rows, int cols) {
    validate_polygon(poly);
    require(rows >= 1 && cols >= 1, "mask dims must be >= 1");
    Mask mask(rows, cols);

    const BoundingBox bb = polygon_bbox(poly);
    const int r0 = std::max(0, static_cast<int>(std::floor(bb.min_y)));
    const int r1 = std::min(rows - 1, static_cast<int>(std::ceil(bb.max_y)) - 1);
    const int c0 = std::max(0, static_cast<int>(std::floor(bb.min_x)));
    const int c1 = std::min(cols - 1, static_cast<int>(std::ceil(bb.max_x)) - 1);

    for (int r = r0; r <= r1; ++r) {
        const double py = r + 0.5;
        for (int c = c0; c <= c1; ++c) {
            if (point_in_polygon(poly, c + 0.5, py)) mask.set(r, c, true);
        }
    }
    return mask;
}

size_t Mask::count() const {
    return static_cast<size_t>(std::count(cells.begin(), cells.end(), uint8_t(1)));
}

std::vector<AnnotationPolygon> load_polygons_geojson(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "cannot open polygon file: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        fail("malformed GeoJSON " + path + ": " + e.what());
    }

    std::vector<AnnotationPolygon> polys;
    try {
        require(j.at("type") == "FeatureCollection", "GeoJSON root must be a FeatureCollection");
        size_t index = 0;
        for (const auto& feature : j.at("features")) {
            AnnotationPolygon p;
            const auto& props = feature.at("properties");
            p.label = label_from_text(props.at("label").get<std::string>());
            if (props.contains("id")) {
                p.id = props.at("id").is_string() ? props.at("id").get<std::string>()
                                                  : props.at("id").dump();
            } else if (feature.contains("id")) {
                p.id = feature.at("id").is_string() ? feature.at("id").get<std::string>()
                                                    : feature.at("id").dump();
            } else {
                p.id = "feature_" + std::to_string(index);
            }
            const auto& geom = feature.at("geometry");
            require(geom.at("type") == "Polygon",
                    "feature '" + p.id + "' must carry Polygon geometry");
            const auto& rings = geom.at("coordinates");
            require(rings.is_array() && !rings.empty(),
                    "feature '" + p.id + "' has no rings");
            const auto& ring = rings[0];
            for (const auto& v : ring) {
                p.vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
            }
            // GeoJSON rings repeat the first vertex; store open.
            if (p.vertices.size() >= 2 && p.vertices.front() == p.vertices.back()) {
                p.vertices.pop_back();
            }
            validate_polygon(p);
            polys.push_back(std::move(p));
            ++index;
        }
    } catch (const json::exception& e) {
        fail("malformed GeoJSON " + path + ": " + e.what());
    }
    return polys;
}

void write_polygons_geojson(const std::vector<AnnotationPolygon>& polys, const std::string& path) {
    json features = json::array();
    for (const auto& p : polys) {
        json ring = json::array();
        for (const auto& [x, y] : p.vertices) ring.push_back({x, y});
        if (!p.vertices.empty()) {
            ring.push_back({p.vertices.front().first, p.vertices.front().second});
        }
        features.push_back({
            {"type", "Feature"},
            {"properties", {{"label", label_text(p.label)}, {"id", p.id}}},
            {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring})}}},
        });
    }
    const json doc = {{"type", "FeatureCollection"}, {"features", features}};
    std::ofstream f(path);
    require(f.good(), "cannot write polygon file: " + path);
    f << doc.dump(2) << "\n";
    require(f.good(), "failed writing polygon file: " + path);
}

}  // namespace landslide
