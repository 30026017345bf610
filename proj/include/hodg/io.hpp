#pragma once

#include <filesystem>
#include <string>

#include "hodg/frames.hpp"

namespace hodg {

// Binary PPM (P6), maxval 255. Errors carry the path and byte offset.
RgbFrame load_rgb_frame(const std::filesystem::path& path);
void write_rgb_frame(const std::filesystem::path& path, const RgbFrame& frame);

// Binary PGM (P5), maxval 65535, big-endian 16-bit samples.
DepthFrame load_depth_frame(const std::filesystem::path& path);
void write_depth_frame(const std::filesystem::path& path, const DepthFrame& frame);

// Manifest JSON: {"frame_count": N, "rgb": [...], "depth": [...],
// "label": "cut", "fps": 30}. Relative frame paths resolve against the
// manifest's directory. Validates list lengths, the 15-frame minimum, that
// every referenced file exists, and that the first RGB/depth pair agrees on
// dimensions (and is large enough for one descriptor window plus a block
// margin, i.e. at least 48x48).
SequenceManifest open_sequence(const std::filesystem::path& manifest_path);
void write_manifest(const std::filesystem::path& path, const SequenceManifest& manifest);

}  // namespace hodg
