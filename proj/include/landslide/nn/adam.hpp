#pragma once

#include <cmath>
#include <cstdint>

#include "landslide/nn/model.hpp"

namespace landslide::nn {

// Adam optimizer state: first/second moment tensors mirroring the model
// parameters plus the step counter and hyperparameters.
template <typename T>
struct AdamStateT {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-7;
    int64_t t = 0;
    std::vector<typename ModelT<T>::Params> m;
    std::vector<typename ModelT<T>::Params> v;

    static AdamStateT init_for(const ModelT<T>& model, double lr_ = 1e-3) {
        AdamStateT st;
        st.lr = lr_;
        st.m.resize(model.params.size());
        st.v.resize(model.params.size());
        for (size_t i = 0; i < model.params.size(); ++i) {
            const auto& p = model.params[i];
            if (p.w.empty()) continue;
            st.m[i].w = Tensor4T<T>(p.w.n, p.w.h, p.w.w, p.w.c);
            st.v[i].w = Tensor4T<T>(p.w.n, p.w.h, p.w.w, p.w.c);
            st.m[i].b.assign(p.b.size(), T(0));
            st.v[i].b.assign(p.b.size(), T(0));
        }
        return st;
    }
};

using AdamState = AdamStateT<float>;

namespace detail {

template <typename T>
void adam_update_array(T* theta, const T* grad, T* m, T* v, size_t count,
                       const AdamStateT<T>& st, double c1, double c2) {
    for (size_t i = 0; i < count; ++i) {
        const double g = static_cast<double>(grad[i]);
        const double mi = st.beta1 * static_cast<double>(m[i]) + (1.0 - st.beta1) * g;
        const double vi = st.beta2 * static_cast<double>(v[i]) + (1.0 - st.beta2) * g * g;
        m[i] = static_cast<T>(mi);
        v[i] = static_cast<T>(vi);
        const double mhat = mi / c1;
        const double vhat = vi / c2;
        theta[i] = static_cast<T>(static_cast<double>(theta[i]) -
                                  st.lr * mhat / (std::sqrt(vhat) + st.eps));
    }
}

}  // namespace detail

// One Adam step:
//   t += 1
//   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
//   theta <- theta - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
template <typename T>
void adam_step(ModelT<T>& model, const typename ModelT<T>::Gradients& grads,
               AdamStateT<T>& st) {
    require(grads.layers.size() == model.params.size() &&
                st.m.size() == model.params.size() && st.v.size() == model.params.size(),
            "adam_step: gradient/state layout mismatch");
    st.t += 1;
    const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
    const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
    for (size_t i = 0; i < model.params.size(); ++i) {
        auto& p = model.params[i];
        if (p.w.empty()) continue;
        const auto& g = grads.layers[i];
        require(g.w.same_dims(p.w) && g.b.size() == p.b.size(),
                "adam_step: gradient shape mismatch at layer " + std::to_string(i));
        detail::adam_update_array(p.w.data.data(), g.w.data.data(), st.m[i].w.data.data(),
                                  st.v[i].w.data.data(), p.w.size(), st, c1, c2);
        detail::adam_update_array(p.b.data(), g.b.data(), st.m[i].b.data(),
                                  st.v[i].b.data(), p.b.size(), st, c1, c2);
    }
}

}  // namespace landslide::nn
