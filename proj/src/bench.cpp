#include "hodg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "hodg/descriptors.hpp"
#include "hodg/errors.hpp"
#include "hodg/io.hpp"
#include "hodg/motion.hpp"

namespace hodg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

FpsReport summarize_runs(const std::vector<RunTiming>& runs, const std::string& pipeline,
                         int frames_processed) {
    if (runs.empty()) throw ConfigError("summarize_runs: need at least one run");
    std::vector<RunTiming> sorted = runs;
    std::sort(sorted.begin(), sorted.end(),
              [](const RunTiming& a, const RunTiming& b) { return a.wall < b.wall; });
    const RunTiming& median = sorted[sorted.size() / 2];

    FpsReport report;
    report.pipeline = pipeline;
    report.frames_processed = frames_processed;
    report.wall_seconds = median.wall;
    report.fps = median.wall > 0.0 ? frames_processed / median.wall : 0.0;
    report.stages = median.stages;
    report.repeats = static_cast<int>(runs.size());
    return report;
}

FpsReport measure_fps(const SequenceManifest& manifest, const std::string& pipeline, int repeats,
                      int warmup, const PipelineConfig& config) {
    if (repeats < 1) throw ConfigError("bench: repeats must be >= 1");
    if (warmup < 0) throw ConfigError("bench: warmup must be >= 0");
    const ChannelSet channels = ChannelSet::parse(pipeline);

    const Clock::time_point t_load = Clock::now();
    std::vector<GrayFrame> gray;
    std::vector<DepthFrame> depth;
    for (int f = 0; f < manifest.frame_count; ++f) {
        gray.push_back(to_gray(load_rgb_frame(manifest.rgb_paths[f])));
        depth.push_back(load_depth_frame(manifest.depth_paths[f]));
    }
    const double load_seconds = seconds_since(t_load);

    const Clock::time_point t_motion = Clock::now();
    std::vector<MotionField> fields;
    for (int f = 0; f + 1 < manifest.frame_count; ++f)
        fields.push_back(estimate_motion(gray[f], gray[f + 1], config.block_size,
                                         config.search_range));
    const double motion_precompute_seconds = seconds_since(t_motion);

    std::size_t trajectories = 0;
    std::size_t descriptor_values = 0;
    const auto one_run = [&](RunTiming& timing) {
        const Clock::time_point t0 = Clock::now();

        const Clock::time_point t_traj = Clock::now();
        const std::vector<Trajectory> trajs =
            build_trajectories(fields, gray[0].width, gray[0].height, config.stride, config.tau,
                               config.descriptor.traj_len, config.descriptor.window);
        timing.stages.motion = seconds_since(t_traj);

        const Clock::time_point t_desc = Clock::now();
        const std::vector<TrajectoryDescriptor> descs =
            extract_descriptors(trajs, gray, depth, fields, config.descriptor, channels,
                                config.workers);
        timing.stages.descriptors = seconds_since(t_desc);

        // Null sink: tally sizes so the extraction cannot be optimized away,
        // then drop the outputs (serialization stays untimed by design).
        const Clock::time_point t_sink = Clock::now();
        trajectories = trajs.size();
        descriptor_values = 0;
        for (const TrajectoryDescriptor& d : descs)
            descriptor_values +=
                d.hog.size() + d.hof.size() + d.mbhx.size() + d.mbhy.size() + d.hodg.size();
        timing.stages.io = seconds_since(t_sink);

        timing.wall = seconds_since(t0);
    };

    for (int i = 0; i < warmup; ++i) {
        RunTiming scratch;
        one_run(scratch);
    }
    std::vector<RunTiming> runs(repeats);
    for (RunTiming& timing : runs) one_run(timing);

    FpsReport report = summarize_runs(runs, pipeline, manifest.frame_count);
    report.warmup = warmup;
    report.workers = config.workers;
    report.load_seconds = load_seconds;
    report.motion_precompute_seconds = motion_precompute_seconds;
    report.trajectories = trajectories;
    report.descriptor_values = descriptor_values;
    return report;
}

void save_fps_report(const std::filesystem::path& path, const FpsReport& report) {
    nlohmann::ordered_json doc;
    doc["format"] = "hodg-bench";
    doc["version"] = 1;
    doc["pipeline"] = report.pipeline;
    doc["frames_processed"] = report.frames_processed;
    doc["wall_seconds"] = report.wall_seconds;
    doc["fps"] = report.fps;
    doc["stages"] = {{"io", report.stages.io},
                     {"motion", report.stages.motion},
                     {"descriptors", report.stages.descriptors}};
    doc["repeats"] = report.repeats;
    doc["warmup"] = report.warmup;
    doc["workers"] = report.workers;
    doc["load_seconds"] = report.load_seconds;
    doc["motion_precompute_seconds"] = report.motion_precompute_seconds;
    doc["trajectories"] = report.trajectories;
    doc["descriptor_values"] = report.descriptor_values;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw DataError(path.string() + ": write failed");
}

std::string format_fps_table(const FpsReport& report) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    out << "pipeline     " << report.pipeline << '\n';
    out << "frames       " << report.frames_processed << '\n';
    out << "wall (s)     " << std::setprecision(4) << report.wall_seconds << '\n';
    out << "fps          " << std::setprecision(2) << report.fps << '\n';
    out << std::setprecision(4);
    out << "  io         " << report.stages.io << '\n';
    out << "  motion     " << report.stages.motion << '\n';
    out << "  descriptors" << ' ' << report.stages.descriptors << '\n';
    return out.str();
}

}  // namespace hodg
