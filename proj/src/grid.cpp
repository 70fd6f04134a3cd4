#include "landslide/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace landslide {

using nlohmann::json;

Grid::Grid(int width_, int height_, int bands_)
    : width(width_), height(height_), bands(bands_) {
    require(width >= 1 && height >= 1 && bands >= 1, "grid dims must be >= 1");
    data.assign(static_cast<size_t>(width) * height * bands, 0.0f);
    band_names.assign(bands, "");
}

bool Grid::same_footprint(const Grid& other) const {
    return width == other.width && height == other.height &&
           geotransform == other.geotransform;
}

void validate_grid(const Grid& g) {
    require(g.width >= 1, "grid width must be >= 1");
    require(g.height >= 1, "grid height must be >= 1");
    require(g.bands >= 1, "grid must have at least one band");
    require(g.data.size() == static_cast<size_t>(g.width) * g.height * g.bands,
            "grid data length must equal width*height*bands");
    require(g.geotransform[1] > 0.0, "pixel_w must be positive");
    require(g.geotransform[5] < 0.0, "pixel_h must be positive (geotransform[5] < 0)");
    for (size_t i = 0; i < g.data.size(); ++i) {
        const float v = g.data[i];
        if (!std::isfinite(v) && !g.is_nodata(v)) {
            fail("grid holds a non-finite value at flat index " + std::to_string(i));
        }
    }
}

namespace {

std::string strip_suffix(const std::string& path, const std::string& suffix) {
    if (path.size() > suffix.size() &&
        path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return path.substr(0, path.size() - suffix.size());
    }
    return path;
}

std::string grid_stem(const std::string& path) { return strip_suffix(path, ".grid"); }

void write_f32le(std::ofstream& out, const float* data, size_t count) {
    std::vector<unsigned char> buf(count * 4);
    for (size_t i = 0; i < count; ++i) {
        const uint32_t u = std::bit_cast<uint32_t>(data[i]);
        buf[4 * i + 0] = static_cast<unsigned char>(u & 0xff);
        buf[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
        buf[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xff);
        buf[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

void read_f32le(std::ifstream& in, float* data, size_t count) {
    std::vector<unsigned char> buf(count * 4);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    for (size_t i = 0; i < count; ++i) {
        const uint32_t u = static_cast<uint32_t>(buf[4 * i + 0]) |
                           (static_cast<uint32_t>(buf[4 * i + 1]) << 8) |
                           (static_cast<uint32_t>(buf[4 * i + 2]) << 16) |
                           (static_cast<uint32_t>(buf[4 * i + 3]) << 24);
        data[i] = std::bit_cast<float>(u);
    }
}

}  // namespace

Grid read_grid(const std::string& path) {
    const std::string stem = grid_stem(path);
    const std::string header_path = stem + ".grid";
    const std::string bin_path = stem + ".bin";

    std::ifstream hf(header_path);
    require(hf.good(), "cannot open grid header: " + header_path);
    json j;
    try {
        hf >> j;
    } catch (const json::exception& e) {
        fail("malformed grid header " + header_path + ": " + e.what());
    }

    Grid g;
    try {
        g.width = j.at("width").get<int>();
        g.height = j.at("height").get<int>();
        g.bands = j.at("bands").get<int>();
        const std::string dtype = j.at("dtype").get<std::string>();
        require(dtype == "f32le", "unsupported dtype '" + dtype + "' (expected f32le)");
        const auto gt = j.at("geotransform");
        require(gt.is_array() && gt.size() == 6, "geotransform must hold 6 numbers");
        for (int i = 0; i < 6; ++i) g.geotransform[i] = gt[i].get<double>();
        const auto& nd = j.at("nodata");
        if (!nd.is_null()) g.nodata = nd.get<float>();
        for (const auto& name : j.at("band_names")) {
            g.band_names.push_back(name.get<std::string>());
        }
    } catch (const json::exception& e) {
        fail("malformed grid header " + header_path + ": " + e.what());
    }
    require(g.width >= 1 && g.height >= 1 && g.bands >= 1,
            "grid header declares non-positive dimensions");
    require(g.band_names.size() == static_cast<size_t>(g.bands),
            "band_names length does not match band count");

    std::ifstream bf(bin_path, std::ios::binary | std::ios::ate);
    require(bf.good(), "cannot open grid payload: " + bin_path);
    const auto file_size = static_cast<size_t>(bf.tellg());
    const size_t expected = static_cast<size_t>(g.width) * g.height * g.bands * 4;
    if (file_size != expected) {
        fail("grid payload size mismatch for " + bin_path + ": header implies " +
             std::to_string(expected) + " bytes, file holds " + std::to_string(file_size));
    }
    bf.seekg(0);
    g.data.resize(expected / 4);
    read_f32le(bf, g.data.data(), g.data.size());
    require(bf.good(), "short read on grid payload: " + bin_path);

    validate_grid(g);
    return g;
}

void write_grid(const Grid& g, const std::string& path) {
    validate_grid(g);
    const std::string stem = grid_stem(path);
    const std::string header_path = stem + ".grid";
    const std::string bin_path = stem + ".bin";

    json j;
    j["width"] = g.width;
    j["height"] = g.height;
    j["bands"] = g.bands;
    j["dtype"] = "f32le";
    j["geotransform"] = g.geotransform;
    if (g.nodata) {
        j["nodata"] = *g.nodata;
    } else {
        j["nodata"] = nullptr;
    }
    j["band_names"] = g.band_names;

    std::ofstream hf(header_path);
    require(hf.good(), "cannot write grid header: " + header_path);
    hf << j.dump(2) << "\n";
    require(hf.good(), "failed writing grid header: " + header_path);

    std::ofstream bf(bin_path, std::ios::binary);
    require(bf.good(), "cannot write grid payload: " + bin_path);
    write_f32le(bf, g.data.data(), g.data.size());
    require(bf.good(), "failed writing grid payload: " + bin_path);
}

Grid band_difference(const Grid& a, const Grid& b) {
    require(a.bands == 1 && b.bands == 1, "band_difference expects single-band grids");
    require(a.same_footprint(b), "band_difference inputs must share shape and geotransform");
    Grid out(a.width, a.height, 1);
    out.geotransform = a.geotransform;
    out.nodata = a.nodata ? a.nodata : b.nodata;
    const std::string an = a.band_names.empty() ? "a" : a.band_names[0];
    const std::string bn = b.band_names.empty() ? "b" : b.band_names[0];
    out.band_names[0] = an + "-" + bn;
    for (size_t i = 0; i < out.data.size(); ++i) {
        if (a.is_nodata(a.data[i]) || b.is_nodata(b.data[i])) {
            require(out.nodata.has_value(), "nodata propagation without a sentinel");
            out.data[i] = *out.nodata;
        } else {
            out.data[i] = a.data[i] - b.data[i];
        }
    }
    return out;
}

Grid extract_band(const Grid& g, int band, std::string name) {
    require(band >= 0 && band < g.bands, "band index out of range");
    Grid out(g.width, g.height, 1);
    out.geotransform = g.geotransform;
    out.nodata = g.nodata;
    out.band_names[0] = name.empty() ? g.band_names[band] : std::move(name);
    std::copy_n(g.data.begin() + static_cast<std::ptrdiff_t>(g.index(band, 0, 0)),
                g.pixels_per_band(), out.data.begin());
    return out;
}

std::pair<Grid, NormalizationSpec> normalize(const Grid& g, const NormalizationSpec& spec) {
    validate_grid(g);
    if (spec.mode == NormalizationSpec::Mode::Fixed) {
        require(spec.bands.size() == static_cast<size_t>(g.bands),
                "fixed normalization needs one (lo,hi) range per band");
    }

    Grid out = g;
    NormalizationSpec applied;
    applied.mode = NormalizationSpec::Mode::Fixed;
    applied.bands.resize(g.bands);

    for (int b = 0; b < g.bands; ++b) {
        float lo, hi;
        if (spec.mode == NormalizationSpec::Mode::Fixed) {
            lo = spec.bands[b].lo;
            hi = spec.bands[b].hi;
        } else {
            lo = std::numeric_limits<float>::max();
            hi = std::numeric_limits<float>::lowest();
            bool seen = false;
            for (size_t i = 0; i < g.pixels_per_band(); ++i) {
                const float v = g.data[g.index(b, 0, 0) + i];
                if (g.is_nodata(v)) continue;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                seen = true;
            }
            if (!seen) {
                lo = 0.0f;
                hi = 0.0f;
            }
        }
        applied.bands[b] = {lo, hi};
        const float range = hi - lo;
        for (size_t i = 0; i < g.pixels_per_band(); ++i) {
            float& v = out.data[g.index(b, 0, 0) + i];
            if (g.is_nodata(v)) continue;
            if (range <= 0.0f) {
                v = 0.0f;
            } else {
                v = std::clamp((v - lo) / range, 0.0f, 1.0f);
            }
        }
    }
    return {std::move(out), std::move(applied)};
}

}  // namespace landslide
