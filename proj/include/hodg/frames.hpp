#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hodg {

// 8-bit RGB image, row-major, top-left origin, interleaved triples.
struct RgbFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // width*height*3

    std::uint8_t r(int x, int y) const { return data[3 * (static_cast<std::size_t>(y) * width + x)]; }
    std::uint8_t g(int x, int y) const { return data[3 * (static_cast<std::size_t>(y) * width + x) + 1]; }
    std::uint8_t b(int x, int y) const { return data[3 * (static_cast<std::size_t>(y) * width + x) + 2]; }
};

// 16-bit depth image in millimeters; 0 marks an invalid/missing sample.
struct DepthFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> data;  // width*height

    std::uint16_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

// Single-channel 8-bit image used for block matching.
struct GrayFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

// gray = round(0.299 R + 0.587 G + 0.114 B)
GrayFrame to_gray(const RgbFrame& rgb);

struct SequenceManifest {
    int frame_count = 0;
    std::vector<std::string> rgb_paths;    // absolute, resolved against the manifest dir
    std::vector<std::string> depth_paths;
    std::string label;                      // empty when absent
    double fps_nominal = 0.0;               // metadata only
};

}  // namespace hodg
