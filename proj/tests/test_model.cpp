#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "landslide/nn/model.hpp"

using namespace landslide;
using namespace landslide::nn;

namespace {

Tensor4 random_batch(int n, int h, int w, int c, uint32_t seed) {
    Tensor4 t(n, h, w, c);
    std::mt19937 rng(seed);
    for (auto& v : t.data) v = static_cast<float>(rng() >> 8) * (1.0f / 16777216.0f);
    return t;
}

}  // namespace

TEST_CASE("reference model shape trace") {
    const Model m = build_reference_model(1);
    const auto trace = shape_trace(m.input, m.layers);
    const std::vector<Shape3> expected = {
        {32, 32, 3},  {32, 32, 16}, {32, 32, 16}, {16, 16, 16}, {16, 16, 32},
        {16, 16, 32}, {8, 8, 32},   {8, 8, 64},   {8, 8, 64},   {4, 4, 64},
        {4, 4, 64},   {1, 1, 1024}, {1, 1, 128},  {1, 1, 128},  {1, 1, 2},
        {1, 1, 2},
    };
    REQUIRE(trace.size() == expected.size());
    for (size_t i = 0; i < trace.size(); ++i) CHECK(trace[i] == expected[i]);
}

TEST_CASE("shape trace holds for any batch size") {
    const Model m = build_reference_model(2);
    for (const int n : {1, 3, 7}) {
        const Tensor4 batch = random_batch(n, 32, 32, 3, 50 + n);
        const Tensor4 out = m.forward(batch, Mode::Infer);
        CHECK(out.n == n);
        CHECK(out.c == 2);
        CHECK(out.h == 1);
        CHECK(out.w == 1);
    }
}

TEST_CASE("same seed builds bitwise-identical parameters") {
    const Model a = build_reference_model(77);
    const Model b = build_reference_model(77);
    REQUIRE(a.params.size() == b.params.size());
    for (size_t i = 0; i < a.params.size(); ++i) {
        CHECK(testutil::bitwise_equal(a.params[i].w.data, b.params[i].w.data));
        CHECK(a.params[i].b == b.params[i].b);
    }
    const Model c = build_reference_model(78);
    bool any_diff = false;
    for (size_t i = 0; i < a.params.size(); ++i) {
        any_diff |= !testutil::bitwise_equal(a.params[i].w.data, c.params[i].w.data);
    }
    CHECK(any_diff);
}

TEST_CASE("biases start at zero") {
    const Model m = build_reference_model(3);
    for (const auto& p : m.params) {
        for (const float v : p.b) CHECK(v == 0.0f);
    }
}

TEST_CASE("output rows sum to one for random input") {
    const Model m = build_reference_model(4);
    const Tensor4 batch = random_batch(5, 32, 32, 3, 60);
    const Tensor4 out = m.forward(batch, Mode::Infer);
    for (int n = 0; n < 5; ++n) {
        const double sum = out.at(n, 0, 0, 0) + out.at(n, 0, 0, 1);
        CHECK(std::abs(sum - 1.0) <= 1e-6);
        CHECK(out.at(n, 0, 0, 0) > 0.0f);
        CHECK(out.at(n, 0, 0, 1) > 0.0f);
    }
}

TEST_CASE("infer-mode forward is pure despite dropout in the stack") {
    const Model m = build_reference_model(5);
    const Tensor4 batch = random_batch(2, 32, 32, 3, 61);
    const Tensor4 a = m.forward(batch, Mode::Infer);
    const Tensor4 b = m.forward(batch, Mode::Infer);
    CHECK(testutil::bitwise_equal(a.data, b.data));
}

TEST_CASE("model must end with Dense(2) + Softmax") {
    CHECK_THROWS_AS(build_model<float>({8, 8, 1},
                                       {LayerSpec::flatten(), LayerSpec::dense(4),
                                        LayerSpec::softmax()},
                                       0),
                    DataError);
    CHECK_THROWS_AS(build_model<float>({8, 8, 1}, {LayerSpec::flatten(), LayerSpec::dense(2)}, 0),
                    DataError);
}

TEST_CASE("layer sequence type-checking rejects bad links") {
    // Dense before flatten.
    CHECK_THROWS_AS(shape_trace({8, 8, 1}, {LayerSpec::dense(2), LayerSpec::softmax()}),
                    DataError);
    // Pooling odd dims.
    CHECK_THROWS_AS(shape_trace({5, 8, 1}, {LayerSpec::maxpool()}), DataError);
    // Softmax on spatial data.
    CHECK_THROWS_AS(shape_trace({8, 8, 1}, {LayerSpec::softmax()}), DataError);
}

TEST_CASE("batch shape mismatch is rejected") {
    const Model m = build_reference_model(6);
    const Tensor4 bad = random_batch(1, 25, 25, 3, 62);
    CHECK_THROWS_AS(m.forward(bad, Mode::Infer), DataError);
}

TEST_CASE("train-mode dropout changes activations, infer mode does not") {
    const Model m = build_reference_model(7);
    const Tensor4 batch = random_batch(1, 32, 32, 3, 63);
    Rng rng(1);
    const Tensor4 trained = m.forward(batch, Mode::Train, &rng);
    const Tensor4 infer = m.forward(batch, Mode::Infer);
    CHECK(!testutil::bitwise_equal(trained.data, infer.data));
}

TEST_CASE("backward loss equals forward loss on the same batch") {
    Model m = build_model<float>({8, 8, 3},
                                 {LayerSpec::conv(2), LayerSpec::relu(), LayerSpec::maxpool(),
                                  LayerSpec::flatten(), LayerSpec::dense(2),
                                  LayerSpec::softmax()},
                                 8);
    const Tensor4 batch = random_batch(3, 8, 8, 3, 64);
    const std::vector<int> labels = {0, 1, 0};
    const auto bw = m.backward(batch, labels);
    const double fw = scc_loss(m.forward(batch, Mode::Infer), labels).loss;
    CHECK(bw.loss == doctest::Approx(fw).epsilon(1e-9));
}
