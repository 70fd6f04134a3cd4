#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "landslide/nn/tensor.hpp"
#include "landslide/random.hpp"

// Layer math for the from-scratch network. Everything is templated on the
// scalar type: production runs float32, the finite-difference test oracles
// instantiate double.
namespace landslide::nn {

enum class Mode { Train, Infer };

template <typename T>
Tensor4T<T> relu(const Tensor4T<T>& x) {
    Tensor4T<T> y = x;
    for (T& v : y.data) v = std::max(T(0), v);
    return y;
}

template <typename T>
Tensor4T<T> relu_backward(const Tensor4T<T>& x, const Tensor4T<T>& upstream) {
    require(x.same_dims(upstream), "relu_backward shape mismatch");
    Tensor4T<T> dx = upstream;
    for (size_t i = 0; i < x.data.size(); ++i) {
        if (x.data[i] <= T(0)) dx.data[i] = T(0);
    }
    return dx;
}

// Same-padding 3x3 cross-correlation. Weights are stored in a Tensor4T with
// dims (3, 3, c_in, c_out); bias has c_out entries.
template <typename T>
Tensor4T<T> conv3x3_forward(const Tensor4T<T>& x, const Tensor4T<T>& w,
                            const std::vector<T>& b) {
    require(w.n == 3 && w.h == 3, "conv weights must be 3x3");
    require(w.w == x.c, "conv weight c_in mismatch");
    const int N = x.n, H = x.h, W = x.w, CI = x.c, CO = w.c;
    require(b.size() == static_cast<size_t>(CO), "conv bias size mismatch");

    Tensor4T<T> y(N, H, W, CO);
    for (int n = 0; n < N; ++n) {
        for (int yy = 0; yy < H; ++yy) {
            for (int xx = 0; xx < W; ++xx) {
                T* out = &y.at(n, yy, xx, 0);
                for (int co = 0; co < CO; ++co) out[co] = b[co];
            }
            for (int dy = 0; dy < 3; ++dy) {
                const int iy = yy + dy - 1;
                if (iy < 0 || iy >= H) continue;
                for (int xx = 0; xx < W; ++xx) {
                    T* out = &y.at(n, yy, xx, 0);
                    for (int dx = 0; dx < 3; ++dx) {
                        const int ix = xx + dx - 1;
                        if (ix < 0 || ix >= W) continue;
                        const T* in_px = &x.at(n, iy, ix, 0);
                        const T* wbase = &w.at(dy, dx, 0, 0);
                        for (int ci = 0; ci < CI; ++ci) {
                            const T v = in_px[ci];
                            const T* wr = wbase + static_cast<size_t>(ci) * CO;
                            for (int co = 0; co < CO; ++co) out[co] += v * wr[co];
                        }
                    }
                }
            }
        }
    }
    return y;
}

template <typename T>
struct ConvGrads {
    Tensor4T<T> dx;
    Tensor4T<T> dw;
    std::vector<T> db;
};

template <typename T>
ConvGrads<T> conv3x3_backward(const Tensor4T<T>& x, const Tensor4T<T>& w,
                              const Tensor4T<T>& upstream) {
    require(w.n == 3 && w.h == 3 && w.w == x.c, "conv weight shape mismatch");
    require(upstream.n == x.n && upstream.h == x.h && upstream.w == x.w &&
                upstream.c == w.c,
            "conv upstream shape mismatch");
    const int N = x.n, H = x.h, W = x.w, CI = x.c, CO = w.c;

    ConvGrads<T> g;
    g.dx = Tensor4T<T>(N, H, W, CI);
    g.dw = Tensor4T<T>(3, 3, CI, CO);
    g.db.assign(CO, T(0));

    for (int n = 0; n < N; ++n) {
        for (int yy = 0; yy < H; ++yy) {
            for (int xx = 0; xx < W; ++xx) {
                const T* u = &upstream.at(n, yy, xx, 0);
                for (int co = 0; co < CO; ++co) g.db[co] += u[co];
            }
            for (int dy = 0; dy < 3; ++dy) {
                const int iy = yy + dy - 1;
                if (iy < 0 || iy >= H) continue;
                for (int xx = 0; xx < W; ++xx) {
                    const T* u = &upstream.at(n, yy, xx, 0);
                    for (int dx = 0; dx < 3; ++dx) {
                        const int ix = xx + dx - 1;
                        if (ix < 0 || ix >= W) continue;
                        const T* in_px = &x.at(n, iy, ix, 0);
                        T* dx_px = &g.dx.at(n, iy, ix, 0);
                        const T* wbase = &w.at(dy, dx, 0, 0);
                        T* dwbase = &g.dw.at(dy, dx, 0, 0);
                        for (int ci = 0; ci < CI; ++ci) {
                            const T v = in_px[ci];
                            const T* wr = wbase + static_cast<size_t>(ci) * CO;
                            T* dwr = dwbase + static_cast<size_t>(ci) * CO;
                            T acc = T(0);
                            for (int co = 0; co < CO; ++co) {
                                const T uo = u[co];
                                dwr[co] += v * uo;
                                acc += wr[co] * uo;
                            }
                            dx_px[ci] += acc;
                        }
                    }
                }
            }
        }
    }
    return g;
}

template <typename T>
struct PoolResult {
    Tensor4T<T> y;
    std::vector<uint8_t> argmax;  // 0..3, row-major within the 2x2 window
};

// 2x2 max pooling with stride 2; ties go to the first occurrence in
// row-major window order.
template <typename T>
PoolResult<T> maxpool2x2_forward(const Tensor4T<T>& x) {
    require(x.h % 2 == 0 && x.w % 2 == 0, "maxpool2x2 needs even spatial dims");
    const int N = x.n, H = x.h / 2, W = x.w / 2, C = x.c;
    PoolResult<T> r;
    r.y = Tensor4T<T>(N, H, W, C);
    r.argmax.assign(r.y.size(), 0);
    for (int n = 0; n < N; ++n) {
        for (int yy = 0; yy < H; ++yy) {
            for (int xx = 0; xx < W; ++xx) {
                for (int c = 0; c < C; ++c) {
                    T best = x.at(n, 2 * yy, 2 * xx, c);
                    uint8_t best_k = 0;
                    for (uint8_t k = 1; k < 4; ++k) {
                        const T v = x.at(n, 2 * yy + k / 2, 2 * xx + k % 2, c);
                        if (v > best) {
                            best = v;
                            best_k = k;
                        }
                    }
                    r.y.at(n, yy, xx, c) = best;
                    r.argmax[r.y.idx(n, yy, xx, c)] = best_k;
                }
            }
        }
    }
    return r;
}

template <typename T>
Tensor4T<T> maxpool2x2_backward(const std::vector<uint8_t>& argmax, int in_n, int in_h,
                                int in_w, int in_c, const Tensor4T<T>& upstream) {
    require(upstream.n == in_n && upstream.h == in_h / 2 && upstream.w == in_w / 2 &&
                upstream.c == in_c,
            "maxpool2x2_backward shape mismatch");
    require(argmax.size() == upstream.size(), "maxpool argmax size mismatch");
    Tensor4T<T> dx(in_n, in_h, in_w, in_c);
    for (int n = 0; n < upstream.n; ++n) {
        for (int yy = 0; yy < upstream.h; ++yy) {
            for (int xx = 0; xx < upstream.w; ++xx) {
                for (int c = 0; c < upstream.c; ++c) {
                    const uint8_t k = argmax[upstream.idx(n, yy, xx, c)];
                    dx.at(n, 2 * yy + k / 2, 2 * xx + k % 2, c) +=
                        upstream.at(n, yy, xx, c);
                }
            }
        }
    }
    return dx;
}

template <typename T>
struct DropoutResult {
    Tensor4T<T> y;
    std::vector<uint8_t> kept;  // empty in infer mode or at rate 0
};

// Inverted dropout: units are zeroed with probability rate in train mode and
// survivors scaled by 1/(1-rate); inference is the identity.
template <typename T>
DropoutResult<T> dropout_forward(const Tensor4T<T>& x, double rate, Mode mode, Rng* rng) {
    require(rate >= 0.0 && rate < 1.0, "dropout rate must lie in [0,1)");
    DropoutResult<T> r;
    r.y = x;
    if (mode == Mode::Infer || rate == 0.0) return r;
    require(rng != nullptr, "train-mode dropout needs an RNG");
    const T scale = T(1.0 / (1.0 - rate));
    r.kept.assign(x.size(), 1);
    for (size_t i = 0; i < x.size(); ++i) {
        if (rng->unit_double() < rate) {
            r.kept[i] = 0;
            r.y.data[i] = T(0);
        } else {
            r.y.data[i] *= scale;
        }
    }
    return r;
}

template <typename T>
Tensor4T<T> dropout_backward(const std::vector<uint8_t>& kept, double rate,
                             const Tensor4T<T>& upstream) {
    Tensor4T<T> dx = upstream;
    if (kept.empty()) return dx;  // identity pass
    require(kept.size() == upstream.size(), "dropout mask size mismatch");
    const T scale = T(1.0 / (1.0 - rate));
    for (size_t i = 0; i < dx.data.size(); ++i) {
        dx.data[i] = kept[i] ? dx.data[i] * scale : T(0);
    }
    return dx;
}

// Fully connected layer: x is (n,1,1,d), weights (1,1,d,u), bias u.
template <typename T>
Tensor4T<T> dense_forward(const Tensor4T<T>& x, const Tensor4T<T>& w,
                          const std::vector<T>& b) {
    require(x.h == 1 && x.w == 1, "dense input must be flattened");
    require(w.n == 1 && w.h == 1 && w.w == x.c, "dense weight shape mismatch");
    const int N = x.n, D = x.c, U = w.c;
    require(b.size() == static_cast<size_t>(U), "dense bias size mismatch");
    Tensor4T<T> y(N, 1, 1, U);
    for (int n = 0; n < N; ++n) {
        T* out = &y.at(n, 0, 0, 0);
        for (int j = 0; j < U; ++j) out[j] = b[j];
        const T* in = &x.at(n, 0, 0, 0);
        for (int k = 0; k < D; ++k) {
            const T v = in[k];
            const T* wr = &w.at(0, 0, k, 0);
            for (int j = 0; j < U; ++j) out[j] += v * wr[j];
        }
    }
    return y;
}

template <typename T>
struct DenseGrads {
    Tensor4T<T> dx;
    Tensor4T<T> dw;
    std::vector<T> db;
};

template <typename T>
DenseGrads<T> dense_backward(const Tensor4T<T>& x, const Tensor4T<T>& w,
                             const Tensor4T<T>& upstream) {
    require(upstream.n == x.n && upstream.h == 1 && upstream.w == 1 && upstream.c == w.c,
            "dense upstream shape mismatch");
    const int N = x.n, D = x.c, U = w.c;
    DenseGrads<T> g;
    g.dx = Tensor4T<T>(N, 1, 1, D);
    g.dw = Tensor4T<T>(1, 1, D, U);
    g.db.assign(U, T(0));
    for (int n = 0; n < N; ++n) {
        const T* u = &upstream.at(n, 0, 0, 0);
        const T* in = &x.at(n, 0, 0, 0);
        for (int j = 0; j < U; ++j) g.db[j] += u[j];
        for (int k = 0; k < D; ++k) {
            const T v = in[k];
            const T* wr = &w.at(0, 0, k, 0);
            T* dwr = &g.dw.at(0, 0, k, 0);
            T acc = T(0);
            for (int j = 0; j < U; ++j) {
                dwr[j] += v * u[j];
                acc += wr[j] * u[j];
            }
            g.dx.at(n, 0, 0, k) = acc;
        }
    }
    return g;
}

// Numerically stable softmax over one row of K logits.
template <typename T>
void softmax_row(const T* z, T* p, int k) {
    T m = z[0];
    for (int j = 1; j < k; ++j) m = std::max(m, z[j]);
    T sum = T(0);
    for (int j = 0; j < k; ++j) {
        p[j] = std::exp(z[j] - m);
        sum += p[j];
    }
    for (int j = 0; j < k; ++j) p[j] /= sum;
}

template <typename T>
Tensor4T<T> softmax(const Tensor4T<T>& logits) {
    require(logits.h == 1 && logits.w == 1, "softmax expects (n,1,1,K) logits");
    Tensor4T<T> p = logits;
    for (int n = 0; n < logits.n; ++n) {
        softmax_row(&logits.at(n, 0, 0, 0), &p.at(n, 0, 0, 0), logits.c);
    }
    return p;
}

inline constexpr double kProbClamp = 1e-7;

template <typename T>
struct LossResult {
    double loss = 0.0;
    Tensor4T<T> dlogits;  // gradient of the fused softmax + SCC loss
};

// Sparse categorical cross-entropy over probability rows: mean of
// -log(p[label]) with p clamped to [1e-7, 1]. The returned gradient is with
// respect to the pre-softmax logits: (p - onehot(label)) / N.
template <typename T>
LossResult<T> scc_loss(const Tensor4T<T>& probs, const std::vector<int>& labels) {
    require(probs.h == 1 && probs.w == 1, "scc_loss expects (n,1,1,K) probabilities");
    require(labels.size() == static_cast<size_t>(probs.n),
            "scc_loss needs one label per sample");
    const int N = probs.n, K = probs.c;
    LossResult<T> r;
    r.dlogits = probs;
    double acc = 0.0;
    for (int n = 0; n < N; ++n) {
        const int y = labels[n];
        require(y >= 0 && y < K, "label out of range");
        const double p = std::clamp(static_cast<double>(probs.at(n, 0, 0, y)), kProbClamp, 1.0);
        acc -= std::log(p);
        for (int j = 0; j < K; ++j) {
            const T onehot = j == y ? T(1) : T(0);
            r.dlogits.at(n, 0, 0, j) = (probs.at(n, 0, 0, j) - onehot) / T(N);
        }
    }
    r.loss = acc / N;
    return r;
}

}  // namespace landslide::nn
