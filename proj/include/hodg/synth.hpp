#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "hodg/frames.hpp"

namespace hodg {

// Seeded synthetic RGBD sequence generator for tests and demos. Three motion
// classes over a textured disk on a static background:
//   translate  disk slides laterally (magnitude px/frame, ping-pong at the
//              borders) at constant depth
//   rotate     disk stays put while its texture and a planar depth ramp spin
//              (magnitude degrees/frame)
//   approach   RGB identical to translate, but the disk carries a radial
//              depth cone whose mean depth falls and whose gradient
//              magnitude grows every frame
struct SynthSpec {
    std::string class_id = "translate";  // translate | rotate | approach
    int frames = 40;
    int size = 128;  // square frames, >= 64
    std::uint64_t texture_seed = 0;
    double magnitude = 2.0;  // px/frame (translate, approach) or deg/frame (rotate)
};

// Writes frame_NNNN.ppm / depth_NNNN.pgm plus manifest.json into out_dir and
// returns the manifest (paths resolved absolute). Byte-identical output for
// identical spec and seed. Throws ConfigError on a bad spec, DataError when
// out_dir cannot be written.
SequenceManifest synth_sequence(const SynthSpec& spec, std::uint64_t seed,
                                const std::filesystem::path& out_dir);

}  // namespace hodg
