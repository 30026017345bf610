#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hodg/config.hpp"
#include "hodg/frames.hpp"

namespace hodg {

struct StageSeconds {
    double io = 0.0;           // I/O inside the timed region (frames are preloaded, so ~0)
    double motion = 0.0;       // trajectory building
    double descriptors = 0.0;  // descriptor extraction

    double sum() const { return io + motion + descriptors; }
};

struct FpsReport {
    std::string pipeline;  // rgb-trio | hodg | combined
    int frames_processed = 0;
    double wall_seconds = 0.0;  // median timed run
    double fps = 0.0;           // frames_processed / wall_seconds
    StageSeconds stages;        // breakdown of the median run
    int repeats = 0;
    int warmup = 0;
    int workers = 1;
    double load_seconds = 0.0;    // untimed preload: file reads + gray conversion
    double motion_precompute_seconds = 0.0;  // untimed: block matching per frame pair
    std::size_t trajectories = 0;
    std::size_t descriptor_values = 0;  // null-sink checksum of output volume
};

struct RunTiming {
    double wall = 0.0;
    StageSeconds stages;
};

// Median-by-wall run (upper median for even counts) folded into a report.
FpsReport summarize_runs(const std::vector<RunTiming>& runs, const std::string& pipeline,
                         int frames_processed);

// Times descriptor extraction over one sequence: frames are loaded and block
// motion precomputed untimed, then `repeats` timed runs (after `warmup`
// untimed ones) of trajectory building + extraction, outputs discarded.
// The median run is reported.
FpsReport measure_fps(const SequenceManifest& manifest, const std::string& pipeline, int repeats,
                      int warmup, const PipelineConfig& config);

void save_fps_report(const std::filesystem::path& path, const FpsReport& report);
std::string format_fps_table(const FpsReport& report);

}  // namespace hodg
