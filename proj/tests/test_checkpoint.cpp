#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "landslide/checkpoint.hpp"

using namespace landslide;
using namespace landslide::nn;

namespace {

Model::Gradients unit_gradients(const Model& m) {
    Model::Gradients g;
    g.layers.resize(m.params.size());
    for (size_t i = 0; i < m.params.size(); ++i) {
        if (m.params[i].w.empty()) continue;
        g.layers[i].w = Tensor4(m.params[i].w.n, m.params[i].w.h, m.params[i].w.w,
                                m.params[i].w.c);
        for (size_t k = 0; k < g.layers[i].w.data.size(); ++k) {
            g.layers[i].w.data[k] = 0.01f * static_cast<float>(k % 13);
        }
        g.layers[i].b.assign(m.params[i].b.size(), 0.02f);
    }
    return g;
}

}  // namespace

TEST_CASE("checkpoint round-trips reference model parameters bitwise") {
    testutil::TempDir tmp("ckpt");
    Checkpoint ck;
    ck.model = build_reference_model(9);
    save_checkpoint(ck, tmp.str("m.ckpt"));
    const Checkpoint back = load_checkpoint(tmp.str("m.ckpt"));
    REQUIRE(back.model.params.size() == ck.model.params.size());
    CHECK(back.model.input == ck.model.input);
    CHECK(back.model.rng_seed == 9);
    for (size_t i = 0; i < ck.model.params.size(); ++i) {
        CHECK(testutil::bitwise_equal(back.model.params[i].w.data, ck.model.params[i].w.data));
        CHECK(back.model.params[i].b == ck.model.params[i].b);
    }
    CHECK(!back.adam.has_value());
    CHECK(!back.norm.has_value());
}

TEST_CASE("corrupt magic bytes are rejected") {
    testutil::TempDir tmp("ckpt");
    Checkpoint ck;
    ck.model = build_reference_model(1);
    save_checkpoint(ck, tmp.str("m.ckpt"));
    std::fstream f(tmp.str("m.ckpt"), std::ios::binary | std::ios::in | std::ios::out);
    f.write("XXXX", 4);
    f.close();
    CHECK_THROWS_AS(load_checkpoint(tmp.str("m.ckpt")), DataError);
}

TEST_CASE("truncated payload is rejected by the size check") {
    testutil::TempDir tmp("ckpt");
    Checkpoint ck;
    ck.model = build_reference_model(2);
    save_checkpoint(ck, tmp.str("m.ckpt"));
    const std::string all = testutil::slurp(tmp.str("m.ckpt"));
    std::ofstream out(tmp.str("m.ckpt"), std::ios::binary);
    out.write(all.data(), static_cast<std::streamsize>(all.size() - 64));
    out.close();
    CHECK_THROWS_AS(load_checkpoint(tmp.str("m.ckpt")), DataError);
}

TEST_CASE("adam state round-trips and resumes with an identical next update") {
    testutil::TempDir tmp("ckpt");
    Model model = build_reference_model(3);
    AdamState st = AdamState::init_for(model, 2e-3);
    const auto grads = unit_gradients(model);
    adam_step(model, grads, st);
    adam_step(model, grads, st);
    CHECK(st.t == 2);

    Checkpoint ck;
    ck.model = model;
    ck.adam = st;
    NormalizationSpec norm;
    norm.mode = NormalizationSpec::Mode::Fixed;
    norm.bands = {{0.1f, 0.9f}, {0.0f, 1.0f}, {0.2f, 0.8f}};
    ck.norm = norm;
    save_checkpoint(ck, tmp.str("m.ckpt"));

    Checkpoint back = load_checkpoint(tmp.str("m.ckpt"));
    REQUIRE(back.adam.has_value());
    CHECK(back.adam->t == 2);
    CHECK(back.adam->lr == 2e-3);
    REQUIRE(back.norm.has_value());
    CHECK(back.norm->bands.size() == 3);
    CHECK(back.norm->bands[0].lo == 0.1f);

    // Resumed state continues from the saved step: applying the same
    // gradient to both copies gives identical parameters.
    adam_step(model, grads, st);
    adam_step(back.model, grads, *back.adam);
    CHECK(back.adam->t == st.t);
    for (size_t i = 0; i < model.params.size(); ++i) {
        CHECK(testutil::bitwise_equal(back.model.params[i].w.data, model.params[i].w.data));
        CHECK(back.model.params[i].b == model.params[i].b);
    }
}

TEST_CASE("checkpoint flags must agree with the spec block") {
    testutil::TempDir tmp("ckpt");
    Checkpoint ck;
    ck.model = build_reference_model(4);
    save_checkpoint(ck, tmp.str("m.ckpt"));
    // Flip the adam flag without adding blobs.
    std::fstream f(tmp.str("m.ckpt"), std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(6);
    const char flag = 1;
    f.write(&flag, 1);
    f.close();
    CHECK_THROWS_AS(load_checkpoint(tmp.str("m.ckpt")), DataError);
}

TEST_CASE("identical saves are byte-identical") {
    testutil::TempDir tmp("ckpt");
    Checkpoint ck;
    ck.model = build_reference_model(5);
    save_checkpoint(ck, tmp.str("a.ckpt"));
    save_checkpoint(ck, tmp.str("b.ckpt"));
    CHECK(testutil::slurp(tmp.str("a.ckpt")) == testutil::slurp(tmp.str("b.ckpt")));
}
