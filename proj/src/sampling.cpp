#include "landslide/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "landslide/random.hpp"

namespace landslide {

namespace fs = std::filesystem;
using nlohmann::json;

size_t count_label(const std::vector<Patch>& patches, Label l) {
    return static_cast<size_t>(
        std::count_if(patches.begin(), patches.end(),
                      [l](const Patch& p) { return p.label == l; }));
}

std::vector<Patch> extract_patches(const Grid& grid,
                                   const std::vector<AnnotationPolygon>& polygons,
                                   const ExtractOptions& opt) {
    require(grid.bands == kPatchBands, "patch extraction expects a 3-band composite");
    require(opt.stride >= 1, "stride must be >= 1");
    require(opt.min_overlap >= 0.0 && opt.min_overlap <= 1.0,
            "min_overlap must lie in [0,1]");

    std::vector<Patch> out;
    for (const auto& poly : polygons) {
        validate_polygon(poly);
        const BoundingBox bb = polygon_bbox(poly);
        require(bb.min_x >= 0.0 && bb.min_y >= 0.0 &&
                    bb.max_x <= static_cast<double>(grid.width) &&
                    bb.max_y <= static_cast<double>(grid.height),
                "polygon '" + poly.id + "' has vertices outside the grid");

        const int r0 = std::max(0, static_cast<int>(std::floor(bb.min_y)));
        const int r1 = std::min(grid.height - 1, static_cast<int>(std::ceil(bb.max_y)) - 1);
        const int c0 = std::max(0, static_cast<int>(std::floor(bb.min_x)));
        const int c1 = std::min(grid.width - 1, static_cast<int>(std::ceil(bb.max_x)) - 1);
        const int extent_r = r1 - r0 + 1;
        const int extent_c = c1 - c0 + 1;
        if (extent_r < kPatchSize || extent_c < kPatchSize) {
            std::cerr << "warning: polygon '" << poly.id
                      << "' bounding box is smaller than " << kPatchSize << "x"
                      << kPatchSize << " px, skipped\n";
            continue;
        }

        const Mask mask = rasterize_polygon(poly, grid.height, grid.width);
        constexpr int windowPixels = kPatchSize * kPatchSize;

        for (int wr = r0; wr + kPatchSize <= r0 + extent_r; wr += opt.stride) {
            for (int wc = c0; wc + kPatchSize <= c0 + extent_c; wc += opt.stride) {
                int inside = 0;
                for (int r = wr; r < wr + kPatchSize; ++r) {
                    for (int c = wc; c < wc + kPatchSize; ++c) {
                        if (mask.at(r, c)) ++inside;
                    }
                }
                if (static_cast<double>(inside) / windowPixels < opt.min_overlap) continue;

                Patch patch;
                patch.pixels.resize(static_cast<size_t>(windowPixels) * kPatchBands);
                patch.label = poly.label;
                patch.origin_row = wr;
                patch.origin_col = wc;
                patch.source_polygon = poly.id;
                bool has_nodata = false;
                for (int r = 0; r < kPatchSize && !has_nodata; ++r) {
                    for (int c = 0; c < kPatchSize; ++c) {
                        for (int b = 0; b < kPatchBands; ++b) {
                            const float v = grid.at(b, wr + r, wc + c);
                            if (grid.is_nodata(v)) {
                                has_nodata = true;
                                break;
                            }
                            require(v >= 0.0f && v <= 1.0f && std::isfinite(v),
                                    "grid is not normalized to [0,1]; normalize before "
                                    "extraction");
                            patch.pixels[(static_cast<size_t>(r) * kPatchSize + c) *
                                             kPatchBands +
                                         b] = v;
                        }
                        if (has_nodata) break;
                    }
                }
                if (has_nodata) {
                    std::cerr << "warning: window at (" << wr << "," << wc
                              << ") touches nodata, skipped\n";
                    continue;
                }
                out.push_back(std::move(patch));
            }
        }
    }
    return out;
}

PatchSet split_patchset(const std::vector<Patch>& patches, double test_fraction, uint64_t seed) {
    require(test_fraction > 0.0 && test_fraction < 1.0,
            "test_fraction must lie strictly between 0 and 1");

    // Group patch counts by polygon, preserving a deterministic id order.
    std::map<std::string, size_t> patch_count;
    std::map<std::string, Label> poly_label;
    for (const auto& p : patches) {
        patch_count[p.source_polygon] += 1;
        poly_label[p.source_polygon] = p.label;
    }

    std::map<std::string, std::string> assignment;
    Rng rng(seed);
    for (const Label label : {Label::Landslide, Label::NonLandslide}) {
        std::vector<std::string> ids;
        size_t label_total = 0;
        for (const auto& [id, count] : patch_count) {
            if (poly_label[id] != label) continue;
            ids.push_back(id);
            label_total += count;
        }
        if (ids.size() < 2) {
            fail(std::string("cannot split: label '") + label_text(label) +
                 "' has fewer than two patch-bearing polygons");
        }
        rng.shuffle(ids);

        const double target = test_fraction * static_cast<double>(label_total);
        size_t taken = 0;
        size_t taken_patches = 0;
        for (const auto& id : ids) {
            if (taken >= ids.size() - 1) break;
            if (taken > 0 && static_cast<double>(taken_patches) >= target) break;
            assignment[id] = "test";
            ++taken;
            taken_patches += patch_count[id];
        }
        for (const auto& id : ids) {
            if (!assignment.count(id)) assignment[id] = "train";
        }
    }

    PatchSet ps;
    ps.seed = seed;
    ps.split_assignment = assignment;
    for (const auto& p : patches) {
        if (assignment.at(p.source_polygon) == "test") {
            ps.test.push_back(p);
        } else {
            ps.train.push_back(p);
        }
    }
    for (const Label label : {Label::Landslide, Label::NonLandslide}) {
        require(count_label(ps.train, label) > 0 && count_label(ps.test, label) > 0,
                "split failed to place both labels in both splits");
    }
    return ps;
}

namespace {

constexpr size_t kPatchFloats = static_cast<size_t>(kPatchSize) * kPatchSize * kPatchBands;

void write_split(const std::vector<Patch>& patches, const fs::path& payload,
                 const fs::path& labels) {
    std::ofstream pf(payload, std::ios::binary);
    require(pf.good(), "cannot write patch payload: " + payload.string());
    std::ofstream lf(labels, std::ios::binary);
    require(lf.good(), "cannot write patch labels: " + labels.string());
    std::vector<unsigned char> buf(kPatchFloats * 4);
    for (const auto& p : patches) {
        require(p.pixels.size() == kPatchFloats, "patch has wrong pixel count");
        for (size_t i = 0; i < kPatchFloats; ++i) {
            uint32_t u;
            std::memcpy(&u, &p.pixels[i], 4);
            buf[4 * i + 0] = static_cast<unsigned char>(u & 0xff);
            buf[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
            buf[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xff);
            buf[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xff);
        }
        pf.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        const char lb = p.label == Label::Landslide ? 1 : 0;
        lf.write(&lb, 1);
    }
    require(pf.good() && lf.good(), "failed writing patch split files");
}

std::vector<Patch> read_split(const fs::path& payload, const fs::path& labels) {
    std::ifstream pf(payload, std::ios::binary | std::ios::ate);
    require(pf.good(), "cannot open patch payload: " + payload.string());
    const size_t bytes = static_cast<size_t>(pf.tellg());
    require(bytes % (kPatchFloats * 4) == 0,
            "patch payload size is not a whole number of patches: " + payload.string());
    const size_t n = bytes / (kPatchFloats * 4);
    pf.seekg(0);

    std::ifstream lf(labels, std::ios::binary | std::ios::ate);
    require(lf.good(), "cannot open patch labels: " + labels.string());
    require(static_cast<size_t>(lf.tellg()) == n,
            "label file length does not match patch count: " + labels.string());
    lf.seekg(0);

    std::vector<Patch> out(n);
    std::vector<unsigned char> buf(kPatchFloats * 4);
    for (size_t i = 0; i < n; ++i) {
        pf.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        out[i].pixels.resize(kPatchFloats);
        for (size_t k = 0; k < kPatchFloats; ++k) {
            const uint32_t u = static_cast<uint32_t>(buf[4 * k + 0]) |
                               (static_cast<uint32_t>(buf[4 * k + 1]) << 8) |
                               (static_cast<uint32_t>(buf[4 * k + 2]) << 16) |
                               (static_cast<uint32_t>(buf[4 * k + 3]) << 24);
            float v;
            std::memcpy(&v, &u, 4);
            out[i].pixels[k] = v;
        }
        char lb = 0;
        lf.read(&lb, 1);
        out[i].label = lb ? Label::Landslide : Label::NonLandslide;
    }
    require(pf.good() && lf.good(), "short read on patch split files");
    return out;
}

json norm_to_json(const NormalizationSpec& norm) {
    json bands = json::array();
    for (const auto& b : norm.bands) bands.push_back({{"min", b.lo}, {"max", b.hi}});
    return {{"mode", norm.mode == NormalizationSpec::Mode::Fixed ? "fixed" : "minmax"},
            {"bands", bands}};
}

NormalizationSpec norm_from_json(const json& j) {
    NormalizationSpec norm;
    norm.mode = j.at("mode") == "fixed" ? NormalizationSpec::Mode::Fixed
                                        : NormalizationSpec::Mode::MinMax;
    for (const auto& b : j.at("bands")) {
        norm.bands.push_back({b.at("min").get<float>(), b.at("max").get<float>()});
    }
    return norm;
}

}  // namespace

void save_patchset(const PatchSet& ps, const NormalizationSpec& norm, const std::string& dir) {
    fs::create_directories(dir);
    const fs::path root(dir);

    json counts;
    for (const char* split : {"train", "test"}) {
        const auto& patches = std::string(split) == "train" ? ps.train : ps.test;
        counts[split] = {{"landslide", count_label(patches, Label::Landslide)},
                         {"non_landslide", count_label(patches, Label::NonLandslide)}};
    }
    const json manifest = {
        {"patch", kPatchSize},
        {"bands", kPatchBands},
        {"seed", ps.seed},
        {"counts", counts},
        {"split_assignment", ps.split_assignment},
        {"normalization", norm_to_json(norm)},
    };
    std::ofstream mf(root / "manifest.json");
    require(mf.good(), "cannot write patchset manifest in " + dir);
    mf << manifest.dump(2) << "\n";
    require(mf.good(), "failed writing patchset manifest in " + dir);

    write_split(ps.train, root / "train.bin", root / "train.labels");
    write_split(ps.test, root / "test.bin", root / "test.labels");
}

LoadedPatchSet load_patchset(const std::string& dir) {
    const fs::path root(dir);
    std::ifstream mf(root / "manifest.json");
    require(mf.good(), "cannot open patchset manifest in " + dir);
    json manifest;
    try {
        mf >> manifest;
    } catch (const json::exception& e) {
        fail("malformed patchset manifest in " + dir + ": " + e.what());
    }

    LoadedPatchSet loaded;
    try {
        require(manifest.at("patch").get<int>() == kPatchSize &&
                    manifest.at("bands").get<int>() == kPatchBands,
                "patchset geometry mismatch (expected 25x25x3)");
        loaded.set.seed = manifest.at("seed").get<uint64_t>();
        if (manifest.contains("split_assignment")) {
            for (const auto& [id, split] : manifest.at("split_assignment").items()) {
                loaded.set.split_assignment[id] = split.get<std::string>();
            }
        }
        loaded.norm = norm_from_json(manifest.at("normalization"));
    } catch (const json::exception& e) {
        fail("malformed patchset manifest in " + dir + ": " + e.what());
    }
    loaded.set.train = read_split(root / "train.bin", root / "train.labels");
    loaded.set.test = read_split(root / "test.bin", root / "test.labels");

    const json& counts = manifest.at("counts");
    require(counts.at("train").at("landslide").get<size_t>() ==
                    count_label(loaded.set.train, Label::Landslide) &&
                counts.at("test").at("landslide").get<size_t>() ==
                    count_label(loaded.set.test, Label::Landslide),
            "patchset manifest counts disagree with payload");
    return loaded;
}

}  // namespace landslide
