#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace landslide {

// Seeded RNG used throughout the pipeline. Every distribution draw is
// hand-rolled on top of mt19937 so runs are bit-reproducible regardless of
// the standard library's distribution internals.
class Rng {
public:
    explicit Rng(uint64_t seed)
        : gen_(static_cast<std::mt19937::result_type>(seed)) {}

    uint32_t next_u32() { return gen_(); }

    // Uniform in [0, 1) with 24 bits of resolution.
    float unit() { return static_cast<float>(gen_() >> 8) * (1.0f / 16777216.0f); }

    // Uniform in [0, 1) with 53 bits.
    double unit_double() {
        const uint64_t hi = gen_() >> 5;  // 27 bits
        const uint64_t lo = gen_() >> 6;  // 26 bits
        return static_cast<double>((hi << 26) | lo) * (1.0 / 9007199254740992.0);
    }

    float uniform(float lo, float hi) { return lo + (hi - lo) * unit(); }

    double uniform_double(double lo, double hi) { return lo + (hi - lo) * unit_double(); }

    size_t index(size_t n) { return static_cast<size_t>(gen_() % n); }

    bool coin() { return (gen_() & 1u) != 0; }

    double normal() {
        double u1 = unit_double();
        const double u2 = unit_double();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Gamma(shape=looks, scale=1/looks): unit mean. Erlang sum of exponentials,
    // valid for integer shape, which is all multi-look speckle needs.
    double gamma_mean1(int looks) {
        double acc = 0.0;
        for (int i = 0; i < looks; ++i) acc += -std::log(1.0 - unit_double());
        return acc / looks;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937 gen_;
};

}  // namespace landslide
