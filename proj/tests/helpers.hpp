#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "landslide/grid.hpp"

namespace testutil {

// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<uint32_t> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("lsmap_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str(const std::string& leaf = "") const {
        return leaf.empty() ? path_.string() : (path_ / leaf).string();
    }

private:
    std::filesystem::path path_;
};

inline bool bitwise_equal(const std::vector<float>& a, const std::vector<float>& b) {
    return a.size() == b.size() &&
           (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
}

inline landslide::Grid random_grid(int w, int h, int bands, uint32_t seed,
                                   float lo = -10.0f, float hi = 10.0f) {
    landslide::Grid g(w, h, bands);
    std::mt19937 rng(seed);
    for (auto& v : g.data) {
        v = lo + (hi - lo) * (static_cast<float>(rng() >> 8) * (1.0f / 16777216.0f));
    }
    for (int b = 0; b < bands; ++b) g.band_names[b] = "band" + std::to_string(b);
    return g;
}

inline std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

}  // namespace testutil
