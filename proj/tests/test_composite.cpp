#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "landslide/composite.hpp"

using namespace landslide;

namespace {

SourceMap random_sources(uint32_t seed) {
    SourceMap sources;
    uint32_t salt = 0;
    for (const char* name : {"VV_before", "VV_after", "VH_before", "VH_after", "DEM",
                             "Slope", "Red", "Green", "Blue"}) {
        Grid g = testutil::random_grid(6, 4, 1, seed + salt++);
        g.band_names[0] = name;
        sources[name] = std::move(g);
    }
    return sources;
}

std::vector<float> band_of(const Grid& g, int b) {
    const auto begin = g.data.begin() + static_cast<std::ptrdiff_t>(g.index(b, 0, 0));
    return {begin, begin + static_cast<std::ptrdiff_t>(g.pixels_per_band())};
}

}  // namespace

TEST_CASE("BAA stacks before/after/after VV") {
    const SourceMap sources = random_sources(21);
    const Grid out = compose(recipe_by_name("BAA"), sources);
    CHECK(testutil::bitwise_equal(band_of(out, 0), sources.at("VV_before").data));
    CHECK(testutil::bitwise_equal(band_of(out, 1), sources.at("VV_after").data));
    CHECK(testutil::bitwise_equal(band_of(out, 2), sources.at("VV_after").data));
    CHECK(out.band_names[0] == "VV_before");
    CHECK(out.band_names[2] == "VV_after");
}

TEST_CASE("SSD stacks VV_after/VH_after/DEM") {
    const SourceMap sources = random_sources(22);
    const Grid out = compose(recipe_by_name("SSD"), sources);
    CHECK(testutil::bitwise_equal(band_of(out, 0), sources.at("VV_after").data));
    CHECK(testutil::bitwise_equal(band_of(out, 1), sources.at("VH_after").data));
    CHECK(testutil::bitwise_equal(band_of(out, 2), sources.at("DEM").data));
}

TEST_CASE("BAC third band is the pixelwise after-minus-before difference") {
    SourceMap sources;
    Grid before(2, 1, 1), after(2, 1, 1);
    before.data = {1.0f, 4.0f};
    after.data = {3.0f, 2.0f};
    sources["VV_before"] = before;
    sources["VV_after"] = after;
    const Grid out = compose(recipe_by_name("BAC"), sources);
    CHECK(band_of(out, 2) == std::vector<float>{2.0f, -2.0f});
    CHECK(out.band_names[2] == "VV_after-VV_before");
}

TEST_CASE("every recipe matches the table on random sources") {
    const SourceMap sources = random_sources(23);
    const std::map<std::string, std::array<std::string, 3>> expected = {
        {"RGB", {"Red", "Green", "Blue"}},
        {"SSD", {"VV_after", "VH_after", "DEM"}},
        {"SSS", {"VV_after", "VH_after", "Slope"}},
        {"BAD", {"VV_before", "VV_after", "DEM"}},
        {"BAS", {"VV_before", "VV_after", "Slope"}},
        {"HHH", {"VH_before", "VH_after", "VH_after"}},
        {"BAA", {"VV_before", "VV_after", "VV_after"}},
        {"BAC", {"VV_before", "VV_after", ""}},
        {"BAH", {"VV_before", "VV_after", "VH_after"}},
    };
    CHECK(all_recipes().size() == 9);
    for (const auto& recipe : all_recipes()) {
        const Grid out = compose(recipe, sources);
        CHECK(out.bands == 3);
        const auto& row = expected.at(recipe.name);
        for (int b = 0; b < 3; ++b) {
            if (row[b].empty()) {
                // BAC band 3: exact subtraction of the selected bands.
                const auto& after = sources.at("VV_after").data;
                const auto& before = sources.at("VV_before").data;
                const auto got = band_of(out, b);
                for (size_t i = 0; i < got.size(); ++i) {
                    CHECK(got[i] == after[i] - before[i]);
                }
            } else {
                CHECK(testutil::bitwise_equal(band_of(out, b), sources.at(row[b]).data));
            }
        }
    }
}

TEST_CASE("missing source band is an error") {
    SourceMap sources;
    sources["VV_before"] = testutil::random_grid(3, 3, 1, 1);
    CHECK_THROWS_AS(compose(recipe_by_name("BAA"), sources), DataError);
}

TEST_CASE("shape mismatch between sources is an error") {
    SourceMap sources;
    sources["VV_before"] = testutil::random_grid(3, 3, 1, 1);
    sources["VV_after"] = testutil::random_grid(3, 4, 1, 2);
    CHECK_THROWS_AS(compose(recipe_by_name("BAA"), sources), DataError);
}

TEST_CASE("unknown recipe name is an error") {
    CHECK_THROWS_AS(recipe_by_name("XYZ"), DataError);
}

TEST_CASE("compose is pixelwise: permuting pixels commutes with composition") {
    SourceMap sources = random_sources(29);
    const Grid direct = compose(recipe_by_name("BAC"), sources);

    // Permute every source with the same pixel shuffle.
    const size_t npx = sources.begin()->second.pixels_per_band();
    std::vector<size_t> perm(npx);
    for (size_t i = 0; i < npx; ++i) perm[i] = i;
    std::mt19937 rng(99);
    std::shuffle(perm.begin(), perm.end(), rng);

    SourceMap permuted = sources;
    for (auto& [name, g] : permuted) {
        for (size_t i = 0; i < npx; ++i) g.data[perm[i]] = sources[name].data[i];
    }
    const Grid out = compose(recipe_by_name("BAC"), permuted);
    for (int b = 0; b < 3; ++b) {
        for (size_t i = 0; i < npx; ++i) {
            CHECK(out.data[out.index(b, 0, 0) + perm[i]] ==
                  direct.data[direct.index(b, 0, 0) + i]);
        }
    }
}
