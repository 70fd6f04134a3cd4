#include "landslide/nn/model.hpp"

namespace landslide::nn {

const char* layer_kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Conv3x3: return "conv3x3";
        case LayerKind::ReLU: return "relu";
        case LayerKind::MaxPool2x2: return "maxpool2x2";
        case LayerKind::Dropout: return "dropout";
        case LayerKind::Flatten: return "flatten";
        case LayerKind::Dense: return "dense";
        case LayerKind::Softmax: return "softmax";
    }
    return "?";
}

LayerKind layer_kind_from_name(const std::string& s) {
    for (const LayerKind k : {LayerKind::Conv3x3, LayerKind::ReLU, LayerKind::MaxPool2x2,
                              LayerKind::Dropout, LayerKind::Flatten, LayerKind::Dense,
                              LayerKind::Softmax}) {
        if (s == layer_kind_name(k)) return k;
    }
    fail("unknown layer kind: " + s);
}

std::vector<Shape3> shape_trace(Shape3 input, const std::vector<LayerSpec>& layers) {
    require(input.h >= 1 && input.w >= 1 && input.c >= 1, "model input dims must be >= 1");
    std::vector<Shape3> trace;
    trace.push_back(input);
    Shape3 cur = input;
    for (size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& spec = layers[i];
        const std::string where = "layer " + std::to_string(i) + " (" +
                                  layer_kind_name(spec.kind) + ")";
        switch (spec.kind) {
            case LayerKind::Conv3x3:
                require(spec.units >= 1, where + ": filter count must be >= 1");
                cur.c = spec.units;
                break;
            case LayerKind::ReLU:
                break;
            case LayerKind::MaxPool2x2:
                require(cur.h % 2 == 0 && cur.w % 2 == 0 && cur.h >= 2 && cur.w >= 2,
                        where + ": needs even spatial dims");
                cur.h /= 2;
                cur.w /= 2;
                break;
            case LayerKind::Dropout:
                require(spec.rate >= 0.0f && spec.rate < 1.0f,
                        where + ": rate must lie in [0,1)");
                break;
            case LayerKind::Flatten:
                cur = {1, 1, cur.h * cur.w * cur.c};
                break;
            case LayerKind::Dense:
                require(cur.h == 1 && cur.w == 1, where + ": input must be flattened");
                require(spec.units >= 1, where + ": unit count must be >= 1");
                cur = {1, 1, spec.units};
                break;
            case LayerKind::Softmax:
                require(cur.h == 1 && cur.w == 1, where + ": input must be a logit vector");
                break;
        }
        trace.push_back(cur);
    }
    return trace;
}

Model build_reference_model(uint64_t seed) {
    return build_model<float>(
        {kModelInputSize, kModelInputSize, 3},
        {
            LayerSpec::conv(16), LayerSpec::relu(), LayerSpec::maxpool(),
            LayerSpec::conv(32), LayerSpec::relu(), LayerSpec::maxpool(),
            LayerSpec::conv(64), LayerSpec::relu(), LayerSpec::maxpool(),
            LayerSpec::dropout(0.2f), LayerSpec::flatten(),
            LayerSpec::dense(128), LayerSpec::relu(),
            LayerSpec::dense(2), LayerSpec::softmax(),
        },
        seed);
}

}  // namespace landslide::nn
