#include "landslide/composite.hpp"

#include <algorithm>

namespace landslide {

namespace {

BandExpr sel(const char* band) {
    BandExpr e;
    e.kind = BandExpr::Kind::Select;
    e.band = band;
    return e;
}

BandExpr diff(const char* after, const char* before) {
    BandExpr e;
    e.kind = BandExpr::Kind::Difference;
    e.after = after;
    e.before = before;
    return e;
}

std::vector<CompositeRecipe> make_recipes() {
    return {
        {"RGB", {sel("Red"), sel("Green"), sel("Blue")}},
        {"SSD", {sel("VV_after"), sel("VH_after"), sel("DEM")}},
        {"SSS", {sel("VV_after"), sel("VH_after"), sel("Slope")}},
        {"BAD", {sel("VV_before"), sel("VV_after"), sel("DEM")}},
        {"BAS", {sel("VV_before"), sel("VV_after"), sel("Slope")}},
        {"HHH", {sel("VH_before"), sel("VH_after"), sel("VH_after")}},
        {"BAA", {sel("VV_before"), sel("VV_after"), sel("VV_after")}},
        {"BAC", {sel("VV_before"), sel("VV_after"), diff("VV_after", "VV_before")}},
        {"BAH", {sel("VV_before"), sel("VV_after"), sel("VH_after")}},
    };
}

const Grid& source_band(const SourceMap& sources, const std::string& name) {
    const auto it = sources.find(name);
    if (it == sources.end()) fail("composite source band missing: " + name);
    require(it->second.bands == 1, "composite source '" + name + "' must be single-band");
    return it->second;
}

}  // namespace

const std::vector<CompositeRecipe>& all_recipes() {
    static const std::vector<CompositeRecipe> recipes = make_recipes();
    return recipes;
}

const CompositeRecipe& recipe_by_name(const std::string& name) {
    for (const auto& r : all_recipes()) {
        if (r.name == name) return r;
    }
    fail("unknown composite recipe: " + name);
}

Grid compose(const CompositeRecipe& recipe, const SourceMap& sources) {
    // Collect every referenced source up front so shape checks run before
    // any work.
    std::vector<const Grid*> referenced;
    for (const auto& expr : recipe.bands) {
        if (expr.kind == BandExpr::Kind::Select) {
            referenced.push_back(&source_band(sources, expr.band));
        } else {
            referenced.push_back(&source_band(sources, expr.after));
            referenced.push_back(&source_band(sources, expr.before));
        }
    }
    const Grid& first = *referenced.front();
    for (const Grid* g : referenced) {
        require(g->same_footprint(first),
                "composite sources must share shape and geotransform (recipe " +
                    recipe.name + ")");
    }

    Grid out(first.width, first.height, 3);
    out.geotransform = first.geotransform;
    for (const Grid* g : referenced) {
        if (!g->nodata) continue;
        require(!out.nodata || *out.nodata == *g->nodata,
                "composite sources must agree on the nodata sentinel");
        out.nodata = g->nodata;
    }

    const size_t npx = out.pixels_per_band();
    for (int b = 0; b < 3; ++b) {
        const BandExpr& expr = recipe.bands[b];
        out.band_names[b] = expr.name();
        float* dst = &out.data[out.index(b, 0, 0)];
        if (expr.kind == BandExpr::Kind::Select) {
            // Pure selection: the output band is a verbatim copy.
            const Grid& src = source_band(sources, expr.band);
            std::copy_n(src.data.begin(), npx, dst);
        } else {
            const Grid& after = source_band(sources, expr.after);
            const Grid& before = source_band(sources, expr.before);
            for (size_t i = 0; i < npx; ++i) {
                if (after.is_nodata(after.data[i]) || before.is_nodata(before.data[i])) {
                    dst[i] = *out.nodata;
                } else {
                    dst[i] = after.data[i] - before.data[i];
                }
            }
        }
    }
    return out;
}

}  // namespace landslide
