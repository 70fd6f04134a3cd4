#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "landslide/grid.hpp"

using namespace landslide;
using testutil::TempDir;

TEST_CASE("write/read round-trips a grid of zeros") {
    TempDir tmp("grid");
    Grid g(4, 3, 1);
    g.band_names[0] = "z";
    write_grid(g, tmp.str("zeros.grid"));
    const Grid back = read_grid(tmp.str("zeros.grid"));
    CHECK(back.width == 4);
    CHECK(back.height == 3);
    CHECK(back.bands == 1);
    CHECK(testutil::bitwise_equal(back.data, g.data));
}

TEST_CASE("round-trip is bitwise stable for random grids") {
    TempDir tmp("grid");
    for (uint32_t seed : {1u, 2u, 3u, 4u}) {
        const Grid g = testutil::random_grid(7, 5, 3, seed);
        write_grid(g, tmp.str("r.grid"));
        const Grid back = read_grid(tmp.str("r.grid"));
        CHECK(testutil::bitwise_equal(back.data, g.data));
        CHECK(back.geotransform == g.geotransform);
        CHECK(back.band_names == g.band_names);
        CHECK(back.nodata == g.nodata);
    }
}

TEST_CASE("header declaring more bands than the payload holds is rejected") {
    TempDir tmp("grid");
    Grid g(3, 3, 1);
    write_grid(g, tmp.str("bad.grid"));
    // Rewrite the header claiming two bands over the one-band payload.
    std::ofstream h(tmp.str("bad.grid"));
    h << R"({"width":3,"height":3,"bands":2,"dtype":"f32le",)"
      << R"("geotransform":[0,1,0,0,0,-1],"nodata":null,"band_names":["a","b"]})";
    h.close();
    CHECK_THROWS_AS(read_grid(tmp.str("bad.grid")), DataError);
}

TEST_CASE("malformed header is rejected with a diagnostic") {
    TempDir tmp("grid");
    std::ofstream h(tmp.str("junk.grid"));
    h << "{not json";
    h.close();
    std::ofstream(tmp.str("junk.bin"), std::ios::binary).put(0);
    CHECK_THROWS_AS(read_grid(tmp.str("junk.grid")), DataError);
}

TEST_CASE("non-finite payload values outside nodata are rejected") {
    TempDir tmp("grid");
    Grid g(2, 1, 1);
    write_grid(g, tmp.str("nan.grid"));
    // Patch a NaN into the payload.
    const uint32_t nan_bits = 0x7fc00000u;
    std::fstream b(tmp.str("nan.bin"), std::ios::binary | std::ios::in | std::ios::out);
    b.write(reinterpret_cast<const char*>(&nan_bits), 4);
    b.close();
    CHECK_THROWS_AS(read_grid(tmp.str("nan.grid")), DataError);
}

TEST_CASE("nodata sentinel survives a round trip and stays out of statistics") {
    TempDir tmp("grid");
    // Hand-written reference pair: 3x1 band [-9999, 2, 6] with nodata -9999.
    {
        std::ofstream h(tmp.str("nd.grid"));
        h << R"({"width":3,"height":1,"bands":1,"dtype":"f32le",)"
          << R"("geotransform":[0,1,0,0,0,-1],"nodata":-9999.0,"band_names":["vv"]})";
    }
    {
        const float vals[3] = {-9999.0f, 2.0f, 6.0f};
        std::ofstream b(tmp.str("nd.bin"), std::ios::binary);
        b.write(reinterpret_cast<const char*>(vals), sizeof(vals));
    }
    const Grid g = read_grid(tmp.str("nd.grid"));
    CHECK(g.nodata == -9999.0f);
    CHECK(g.data[0] == -9999.0f);

    const auto [normalized, stats] = normalize(g);
    CHECK(stats.bands[0].lo == 2.0f);  // sentinel excluded from min/max
    CHECK(stats.bands[0].hi == 6.0f);
    CHECK(normalized.data[0] == -9999.0f);  // sentinel untouched
    CHECK(normalized.data[1] == 0.0f);
    CHECK(normalized.data[2] == 1.0f);
}

TEST_CASE("1x1 grid payload is exactly the little-endian bytes of the value") {
    TempDir tmp("grid");
    Grid g(1, 1, 1);
    g.data[0] = 3.25f;
    write_grid(g, tmp.str("one.grid"));
    const std::string payload = testutil::slurp(tmp.str("one.bin"));
    REQUIRE(payload.size() == 4);
    // 3.25f = 0x40500000
    CHECK(static_cast<unsigned char>(payload[0]) == 0x00);
    CHECK(static_cast<unsigned char>(payload[1]) == 0x00);
    CHECK(static_cast<unsigned char>(payload[2]) == 0x50);
    CHECK(static_cast<unsigned char>(payload[3]) == 0x40);
}

TEST_CASE("zero-band grid is rejected") {
    Grid g;
    g.width = 2;
    g.height = 2;
    g.bands = 0;
    CHECK_THROWS_AS(validate_grid(g), DataError);
    TempDir tmp("grid");
    CHECK_THROWS_AS(write_grid(g, tmp.str("zb.grid")), DataError);
}

TEST_CASE("band_difference follows the definition") {
    Grid a(2, 1, 1), b(2, 1, 1);
    a.data = {5.0f, 2.0f};
    b.data = {1.0f, 3.0f};
    const Grid d = band_difference(a, b);
    CHECK(d.data[0] == 4.0f);
    CHECK(d.data[1] == -1.0f);

    const Grid zero = band_difference(a, a);
    CHECK(zero.data[0] == 0.0f);
    CHECK(zero.data[1] == 0.0f);
}

TEST_CASE("band_difference rejects mismatched shapes") {
    Grid a(3, 3, 1), b(3, 4, 1);
    CHECK_THROWS_AS(band_difference(a, b), DataError);

    Grid c(3, 3, 1);
    c.geotransform[0] = 99.0;
    CHECK_THROWS_AS(band_difference(a, c), DataError);
}

TEST_CASE("band_difference propagates nodata from either side") {
    Grid a(2, 1, 1), b(2, 1, 1);
    a.nodata = -1.0f;
    b.nodata = -1.0f;
    a.data = {-1.0f, 5.0f};
    b.data = {2.0f, -1.0f};
    const Grid d = band_difference(a, b);
    CHECK(d.data[0] == -1.0f);
    CHECK(d.data[1] == -1.0f);
}

TEST_CASE("normalize maps min-max to the unit interval") {
    Grid g(3, 1, 1);
    g.data = {2.0f, 4.0f, 6.0f};
    const auto [out, stats] = normalize(g);
    CHECK(out.data[0] == 0.0f);
    CHECK(out.data[1] == 0.5f);
    CHECK(out.data[2] == 1.0f);
    CHECK(stats.mode == NormalizationSpec::Mode::Fixed);
    CHECK(stats.bands[0].lo == 2.0f);
    CHECK(stats.bands[0].hi == 6.0f);
}

TEST_CASE("normalize maps a constant band to zeros") {
    Grid g(3, 1, 1);
    g.data = {7.0f, 7.0f, 7.0f};
    const auto [out, stats] = normalize(g);
    CHECK(out.data == std::vector<float>{0.0f, 0.0f, 0.0f});
    CHECK(stats.bands[0].lo == stats.bands[0].hi);
}

TEST_CASE("replaying fixed stats applies the same affine map") {
    Grid g(1, 1, 1);
    g.data = {5.0f};
    NormalizationSpec replay;
    replay.mode = NormalizationSpec::Mode::Fixed;
    replay.bands = {{0.0f, 10.0f}};
    const auto [out, stats] = normalize(g, replay);
    CHECK(out.data[0] == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(stats.bands[0].lo == 0.0f);
    CHECK(stats.bands[0].hi == 10.0f);
}

TEST_CASE("fixed-mode replay clamps out-of-range values into [0,1]") {
    Grid g(2, 1, 1);
    g.data = {-3.0f, 42.0f};
    NormalizationSpec replay;
    replay.mode = NormalizationSpec::Mode::Fixed;
    replay.bands = {{0.0f, 10.0f}};
    const auto [out, stats] = normalize(g, replay);
    CHECK(out.data[0] == 0.0f);
    CHECK(out.data[1] == 1.0f);
}

TEST_CASE("normalize is idempotent") {
    for (uint32_t seed : {11u, 12u, 13u}) {
        const Grid g = testutil::random_grid(9, 6, 2, seed);
        const auto [once, s1] = normalize(g);
        const auto [twice, s2] = normalize(once);
        REQUIRE(once.data.size() == twice.data.size());
        for (size_t i = 0; i < once.data.size(); ++i) {
            CHECK(std::abs(once.data[i] - twice.data[i]) <= 1e-6f);
        }
        // Replaying the computed stats on the original reproduces the output.
        const auto [replayed, s3] = normalize(g, s1);
        CHECK(testutil::bitwise_equal(replayed.data, once.data));
    }
}

TEST_CASE("header fields round-trip exactly") {
    TempDir tmp("grid");
    Grid g(2, 2, 2);
    g.geotransform = {123456.75, 5.0, 0.0, 987654.125, 0.0, -20.0};
    g.nodata = -9999.0f;
    g.band_names = {"VV_before", "VV_after"};
    write_grid(g, tmp.str("hdr.grid"));
    const Grid back = read_grid(tmp.str("hdr.grid"));
    CHECK(back.geotransform == g.geotransform);
    CHECK(back.nodata == g.nodata);
    CHECK(back.band_names == g.band_names);
}
