#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

#include "hodg/frames.hpp"
#include "hodg/rng.hpp"

namespace testutil {

// Scratch directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("hodg_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline hodg::GrayFrame random_gray(hodg::Rng& rng, int w, int h) {
    hodg::GrayFrame g;
    g.width = w;
    g.height = h;
    g.data.resize(static_cast<std::size_t>(w) * h);
    for (auto& v : g.data) v = static_cast<std::uint8_t>(rng() & 0xff);
    return g;
}

inline hodg::DepthFrame random_depth(hodg::Rng& rng, int w, int h, double invalid_fraction = 0.0) {
    hodg::DepthFrame d;
    d.width = w;
    d.height = h;
    d.data.resize(static_cast<std::size_t>(w) * h);
    for (auto& v : d.data) {
        if (invalid_fraction > 0.0 && hodg::uniform_double(rng) < invalid_fraction)
            v = 0;
        else
            v = static_cast<std::uint16_t>(1000 + hodg::uniform_index(rng, 50000));
    }
    return d;
}

inline hodg::RgbFrame random_rgb(hodg::Rng& rng, int w, int h) {
    hodg::RgbFrame f;
    f.width = w;
    f.height = h;
    f.data.resize(static_cast<std::size_t>(w) * h * 3);
    for (auto& v : f.data) v = static_cast<std::uint8_t>(rng() & 0xff);
    return f;
}

}  // namespace testutil
