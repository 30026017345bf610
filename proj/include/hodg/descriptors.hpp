#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hodg/frames.hpp"
#include "hodg/motion.hpp"

namespace hodg {

// Geometry of the trajectory-aligned descriptor volume: a window x window x
// traj_len block split into a grid_x x grid_y x grid_t grid of cells. With the
// defaults this is the 32x32x15 volume cut into 2x2x3 cells of 16x16x5.
struct DescriptorConfig {
    int window = 32;
    int traj_len = 15;
    int grid_x = 2;
    int grid_y = 2;
    int grid_t = 3;
    int orient_bins = 8;
    double epsilon_zero_flow = 0.4;  // flow below this is "no motion" for HOF

    int cell_w() const { return window / grid_x; }
    int cell_h() const { return window / grid_y; }
    int cell_t() const { return traj_len / grid_t; }
    int hof_bins() const { return orient_bins + 1; }  // + zero-motion bin
    int cells() const { return grid_x * grid_y * grid_t; }
    int gradient_length() const { return cells() * orient_bins; }
    int hof_length() const { return cells() * hof_bins(); }

    void validate() const;
    bool operator==(const DescriptorConfig&) const = default;
};

// Which descriptor channels to compute. "rgb-trio" is the HOG/HOF/MBH set,
// "hodg" the depth channel alone, "rgb+hodg" (alias "combined") all five.
struct ChannelSet {
    bool hog = false;
    bool hof = false;
    bool mbhx = false;
    bool mbhy = false;
    bool hodg = false;

    static ChannelSet all() { return {true, true, true, true, true}; }
    static ChannelSet rgb_trio() { return {true, true, true, true, false}; }
    static ChannelSet hodg_only() { return {false, false, false, false, true}; }
    static ChannelSet parse(const std::string& name);

    bool needs_flow() const { return hof || mbhx || mbhy; }
    bool needs_gray() const { return hog; }
    bool needs_depth() const { return hodg; }
    bool operator==(const ChannelSet&) const = default;
};

// Canonical channel order used by dumps and Fisher-vector concatenation.
inline constexpr int kNumChannels = 5;
inline constexpr const char* kChannelNames[kNumChannels] = {"hog", "hof", "mbhx", "mbhy", "hodg"};

struct ScalarImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

ScalarImage gray_to_scalar(const GrayFrame& gray);
// Also fills `invalid` (1 where depth == 0) when a mask pointer is given.
ScalarImage depth_to_scalar(const DepthFrame& depth, std::vector<std::uint8_t>* invalid = nullptr);

// Per-pixel central differences with the 1-D kernel [1, 0, -1] applied along
// each axis. Orientation is atan2(gy, gx) in degrees, mapped to [0, 360).
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> gx, gy;
    std::vector<double> magnitude;
    std::vector<double> orientation;  // degrees, [0, 360); 0 where magnitude == 0
};

// Border pixels (1-pixel frame) get zero gradient. When an invalid mask is
// given, any pixel whose 3x3 neighborhood touches an invalid sample gets zero
// magnitude.
GradientField spatial_gradients(const ScalarImage& image,
                                const std::vector<std::uint8_t>* invalid_mask = nullptr);

struct OrientedSample {
    double magnitude = 0.0;
    double orientation = 0.0;  // degrees in [0, 360)
};

struct FlowSample {
    double dx = 0.0;
    double dy = 0.0;
};

// Hard-assignment magnitude-weighted histogram: bin = floor(orientation /
// (360/bins)); zero-magnitude samples contribute nothing.
std::vector<double> orientation_histogram(std::span<const OrientedSample> samples, int bins);

// Flow histogram with a trailing zero-motion bin: samples below epsilon add
// unit weight to bin `bins-1`, the rest are binned by flow orientation and
// weighted by flow magnitude. `bins` counts the zero bin (default 8 + 1).
std::vector<double> hof_histogram(std::span<const FlowSample> samples, int bins, double epsilon);

// The five per-trajectory feature vectors. Disabled channels stay empty.
// Cell histograms are concatenated t-slice major, then y, then x; each
// temporal slice sub-vector is l2-normalized (zero slices stay zero).
struct TrajectoryDescriptor {
    std::uint32_t start_frame = 0;
    float mean_x = 0.0f;
    float mean_y = 0.0f;
    std::vector<double> hog, hof, mbhx, mbhy, hodg;

    std::vector<double>& channel(int idx);
    const std::vector<double>& channel(int idx) const;
};

// Computes one trajectory's descriptor from scratch. The dense flow for frame
// f is the block field fields[min(f, fields.size()-1)] replicated per pixel.
TrajectoryDescriptor extract_trajectory_descriptor(const Trajectory& traj,
                                                   const std::vector<GrayFrame>& gray,
                                                   const std::vector<DepthFrame>& depth,
                                                   const std::vector<MotionField>& fields,
                                                   const DescriptorConfig& cfg,
                                                   const ChannelSet& channels = ChannelSet::all());

// Frame-major extraction over a whole sequence; per-frame gradient fields are
// computed once and shared by every trajectory covering that frame. Output
// order follows the input trajectory order and matches
// extract_trajectory_descriptor bit for bit.
std::vector<TrajectoryDescriptor> extract_descriptors(const std::vector<Trajectory>& trajectories,
                                                      const std::vector<GrayFrame>& gray,
                                                      const std::vector<DepthFrame>& depth,
                                                      const std::vector<MotionField>& fields,
                                                      const DescriptorConfig& cfg,
                                                      const ChannelSet& channels,
                                                      int workers = 1);

// Binary descriptor dump: "HODG1", u32 record count, five u32 channel lengths
// (hog, hof, mbhx, mbhy, hodg), then per record u32 start_frame, f32 mean_x,
// f32 mean_y and the five channels as f32 arrays. Little-endian throughout.
void write_descriptor_dump(const std::filesystem::path& path,
                           const std::vector<TrajectoryDescriptor>& descriptors,
                           const DescriptorConfig& cfg);
std::vector<TrajectoryDescriptor> read_descriptor_dump(const std::filesystem::path& path);

}  // namespace hodg
