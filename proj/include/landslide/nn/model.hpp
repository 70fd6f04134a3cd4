#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "landslide/nn/kernels.hpp"

namespace landslide::nn {

enum class LayerKind { Conv3x3, ReLU, MaxPool2x2, Dropout, Flatten, Dense, Softmax };

const char* layer_kind_name(LayerKind k);
LayerKind layer_kind_from_name(const std::string& s);

struct LayerSpec {
    LayerKind kind = LayerKind::ReLU;
    int units = 0;      // conv filters / dense units
    float rate = 0.0f;  // dropout

    static LayerSpec conv(int filters) { return {LayerKind::Conv3x3, filters, 0.0f}; }
    static LayerSpec relu() { return {LayerKind::ReLU, 0, 0.0f}; }
    static LayerSpec maxpool() { return {LayerKind::MaxPool2x2, 0, 0.0f}; }
    static LayerSpec dropout(float rate) { return {LayerKind::Dropout, 0, rate}; }
    static LayerSpec flatten() { return {LayerKind::Flatten, 0, 0.0f}; }
    static LayerSpec dense(int units) { return {LayerKind::Dense, units, 0.0f}; }
    static LayerSpec softmax() { return {LayerKind::Softmax, 0, 0.0f}; }
};

struct Shape3 {
    int h = 0, w = 0, c = 0;
    bool operator==(const Shape3&) const = default;
};

// Propagates the input shape through the stack, validating every link
// (pool parity, flattened dense input, parameter plumbing). Returns one
// entry per layer input plus the final output shape.
std::vector<Shape3> shape_trace(Shape3 input, const std::vector<LayerSpec>& layers);

template <typename T>
struct ModelT {
    struct Params {
        Tensor4T<T> w;      // conv (3,3,ci,co) or dense (1,1,d,u); empty otherwise
        std::vector<T> b;
    };

    Shape3 input{};
    std::vector<LayerSpec> layers;
    std::vector<Params> params;  // parallel to layers
    uint64_t rng_seed = 0;
    static constexpr int kClassCount = 2;

    struct Gradients {
        std::vector<Params> layers;
    };
    struct BackwardResult {
        double loss = 0.0;
        Gradients grads;
    };

    Tensor4T<T> forward(const Tensor4T<T>& batch, Mode mode, Rng* dropout_rng = nullptr) const;
    BackwardResult backward(const Tensor4T<T>& batch, const std::vector<int>& labels,
                            Rng* dropout_rng = nullptr);
};

// Validates the stack (it must end Dense(2) + Softmax), allocates parameters,
// and He-uniform-initializes weights from the seed; biases start at zero.
template <typename T>
ModelT<T> build_model(Shape3 input, std::vector<LayerSpec> layers, uint64_t seed);

using Model = ModelT<float>;

// The reference classifier: three 3x3 conv blocks (16/32/64 filters) each
// followed by max pooling, dropout 0.2, then a 128-unit hidden layer and a
// 2-way softmax head, for 32x32x3 inputs.
Model build_reference_model(uint64_t seed);
inline constexpr int kModelInputSize = 32;

// --- implementation ---

template <typename T>
Tensor4T<T> ModelT<T>::forward(const Tensor4T<T>& batch, Mode mode, Rng* dropout_rng) const {
    require(batch.h == input.h && batch.w == input.w && batch.c == input.c,
            "batch shape does not match model input");
    Tensor4T<T> cur = batch;
    for (size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& spec = layers[i];
        switch (spec.kind) {
            case LayerKind::Conv3x3:
                cur = conv3x3_forward(cur, params[i].w, params[i].b);
                break;
            case LayerKind::ReLU:
                cur = relu(cur);
                break;
            case LayerKind::MaxPool2x2:
                cur = maxpool2x2_forward(cur).y;
                break;
            case LayerKind::Dropout:
                cur = dropout_forward(cur, spec.rate, mode, dropout_rng).y;
                break;
            case LayerKind::Flatten:
                cur = reshape(cur, cur.n, 1, 1, cur.h * cur.w * cur.c);
                break;
            case LayerKind::Dense:
                cur = dense_forward(cur, params[i].w, params[i].b);
                break;
            case LayerKind::Softmax:
                cur = softmax(cur);
                break;
        }
    }
    return cur;
}

template <typename T>
typename ModelT<T>::BackwardResult ModelT<T>::backward(const Tensor4T<T>& batch,
                                                       const std::vector<int>& labels,
                                                       Rng* dropout_rng) {
    require(batch.h == input.h && batch.w == input.w && batch.c == input.c,
            "batch shape does not match model input");
    const size_t L = layers.size();

    // Train-mode forward pass, caching each layer's input plus pool/dropout
    // bookkeeping.
    std::vector<Tensor4T<T>> inputs(L);
    std::vector<std::vector<uint8_t>> aux(L);
    Tensor4T<T> cur = batch;
    for (size_t i = 0; i < L; ++i) {
        inputs[i] = cur;
        const LayerSpec& spec = layers[i];
        switch (spec.kind) {
            case LayerKind::Conv3x3:
                cur = conv3x3_forward(cur, params[i].w, params[i].b);
                break;
            case LayerKind::ReLU:
                cur = relu(cur);
                break;
            case LayerKind::MaxPool2x2: {
                auto r = maxpool2x2_forward(cur);
                cur = std::move(r.y);
                aux[i] = std::move(r.argmax);
                break;
            }
            case LayerKind::Dropout: {
                auto r = dropout_forward(cur, spec.rate, Mode::Train, dropout_rng);
                cur = std::move(r.y);
                aux[i] = std::move(r.kept);
                break;
            }
            case LayerKind::Flatten:
                cur = reshape(cur, cur.n, 1, 1, cur.h * cur.w * cur.c);
                break;
            case LayerKind::Dense:
                cur = dense_forward(cur, params[i].w, params[i].b);
                break;
            case LayerKind::Softmax:
                cur = softmax(cur);
                break;
        }
    }

    // The loss fuses softmax and cross-entropy, so the walk back starts at
    // the logits (input of the final Softmax layer).
    BackwardResult out;
    out.grads.layers.resize(L);
    auto loss = scc_loss(cur, labels);
    out.loss = loss.loss;
    Tensor4T<T> up = std::move(loss.dlogits);

    for (size_t ri = L - 1; ri + 1 > 0; --ri) {
        const LayerSpec& spec = layers[ri];
        switch (spec.kind) {
            case LayerKind::Softmax:
                // Consumed by the fused loss gradient.
                break;
            case LayerKind::Dense: {
                auto g = dense_backward(inputs[ri], params[ri].w, up);
                out.grads.layers[ri].w = std::move(g.dw);
                out.grads.layers[ri].b = std::move(g.db);
                up = std::move(g.dx);
                break;
            }
            case LayerKind::Flatten: {
                const auto& in = inputs[ri];
                up = reshape(up, in.n, in.h, in.w, in.c);
                break;
            }
            case LayerKind::Dropout:
                up = dropout_backward(aux[ri], spec.rate, up);
                break;
            case LayerKind::MaxPool2x2: {
                const auto& in = inputs[ri];
                up = maxpool2x2_backward(aux[ri], in.n, in.h, in.w, in.c, up);
                break;
            }
            case LayerKind::ReLU:
                up = relu_backward(inputs[ri], up);
                break;
            case LayerKind::Conv3x3: {
                auto g = conv3x3_backward(inputs[ri], params[ri].w, up);
                out.grads.layers[ri].w = std::move(g.dw);
                out.grads.layers[ri].b = std::move(g.db);
                up = std::move(g.dx);
                break;
            }
        }
    }
    return out;
}

template <typename T>
ModelT<T> build_model(Shape3 input, std::vector<LayerSpec> layers, uint64_t seed) {
    const auto trace = shape_trace(input, layers);
    const size_t L = layers.size();
    require(L >= 2, "model needs at least a Dense head and Softmax");
    require(layers[L - 1].kind == LayerKind::Softmax &&
                layers[L - 2].kind == LayerKind::Dense &&
                layers[L - 2].units == ModelT<T>::kClassCount,
            "model must end with Dense(2) followed by Softmax");

    ModelT<T> m;
    m.input = input;
    m.layers = std::move(layers);
    m.params.resize(L);
    m.rng_seed = seed;

    Rng rng(seed);
    for (size_t i = 0; i < L; ++i) {
        const LayerSpec& spec = m.layers[i];
        if (spec.kind == LayerKind::Conv3x3) {
            const int ci = trace[i].c;
            const int co = spec.units;
            const float limit = std::sqrt(6.0f / (9.0f * static_cast<float>(ci)));
            m.params[i].w = Tensor4T<T>(3, 3, ci, co);
            for (T& v : m.params[i].w.data) v = T(rng.uniform(-limit, limit));
            m.params[i].b.assign(co, T(0));
        } else if (spec.kind == LayerKind::Dense) {
            const int d = trace[i].c;
            const int u = spec.units;
            const float limit = std::sqrt(6.0f / static_cast<float>(d));
            m.params[i].w = Tensor4T<T>(1, 1, d, u);
            for (T& v : m.params[i].w.data) v = T(rng.uniform(-limit, limit));
            m.params[i].b.assign(u, T(0));
        }
    }
    return m;
}

}  // namespace landslide::nn
