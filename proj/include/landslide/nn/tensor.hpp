#pragma once

#include <vector>

#include "landslide/common.hpp"

namespace landslide::nn {

// Dense rank-4 tensor, row-major n -> h -> w -> c (channel-last).
template <typename T>
struct Tensor4T {
    int n = 0, h = 0, w = 0, c = 0;
    std::vector<T> data;

    Tensor4T() = default;
    Tensor4T(int n_, int h_, int w_, int c_) : n(n_), h(h_), w(w_), c(c_) {
        require(n >= 1 && h >= 1 && w >= 1 && c >= 1, "tensor dims must be >= 1");
        data.assign(static_cast<size_t>(n) * h * w * c, T(0));
    }

    size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }

    size_t idx(int i, int y, int x, int k) const {
        return ((static_cast<size_t>(i) * h + y) * w + x) * c + k;
    }
    T& at(int i, int y, int x, int k) { return data[idx(i, y, x, k)]; }
    const T& at(int i, int y, int x, int k) const { return data[idx(i, y, x, k)]; }

    bool same_dims(const Tensor4T& o) const {
        return n == o.n && h == o.h && w == o.w && c == o.c;
    }

    template <typename U>
    Tensor4T<U> cast() const {
        Tensor4T<U> out(n, h, w, c);
        for (size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
        return out;
    }
};

template <typename T>
Tensor4T<T> reshape(const Tensor4T<T>& x, int n, int h, int w, int c) {
    Tensor4T<T> out(n, h, w, c);
    require(out.size() == x.size(), "reshape must preserve element count");
    out.data = x.data;
    return out;
}

using Tensor4 = Tensor4T<float>;
using Tensor4d = Tensor4T<double>;

}  // namespace landslide::nn
