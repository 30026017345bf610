#include "hodg/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "hodg/binary_io.hpp"
#include "hodg/errors.hpp"

namespace hodg {

void DescriptorConfig::validate() const {
    if (window < 2 || traj_len < 2) throw ConfigError("descriptor config: window and traj_len must be >= 2");
    if (grid_x < 1 || grid_y < 1 || grid_t < 1) throw ConfigError("descriptor config: grid must be >= 1 per axis");
    if (window % grid_x != 0 || window % grid_y != 0)
        throw ConfigError("descriptor config: window must divide evenly into the spatial grid");
    if (traj_len % grid_t != 0)
        throw ConfigError("descriptor config: traj_len must divide evenly into the temporal grid");
    if (orient_bins < 2) throw ConfigError("descriptor config: orient_bins must be >= 2");
    if (epsilon_zero_flow < 0) throw ConfigError("descriptor config: epsilon_zero_flow must be >= 0");
}

ChannelSet ChannelSet::parse(const std::string& name) {
    if (name == "rgb-trio") return rgb_trio();
    if (name == "hodg" || name == "hodg-only") return hodg_only();
    if (name == "rgb+hodg" || name == "combined") return all();
    throw ConfigError("invalid pipeline label \"" + name +
                      "\" (expected rgb-trio, hodg, rgb+hodg or combined)");
}

ScalarImage gray_to_scalar(const GrayFrame& gray) {
    ScalarImage img;
    img.width = gray.width;
    img.height = gray.height;
    img.data.assign(gray.data.begin(), gray.data.end());
    return img;
}

ScalarImage depth_to_scalar(const DepthFrame& depth, std::vector<std::uint8_t>* invalid) {
    ScalarImage img;
    img.width = depth.width;
    img.height = depth.height;
    img.data.assign(depth.data.begin(), depth.data.end());
    if (invalid) {
        invalid->resize(depth.data.size());
        for (std::size_t i = 0; i < depth.data.size(); ++i) (*invalid)[i] = depth.data[i] == 0 ? 1 : 0;
    }
    return img;
}

namespace {

inline double orientation_degrees(double gx, double gy) {
    double deg = std::atan2(gy, gx) * (180.0 / 3.141592653589793238462643383279502884);
    if (deg < 0) deg += 360.0;
    if (deg >= 360.0) deg = 0.0;
    return deg;
}

inline int orientation_bin(double deg, int bins) {
    int b = static_cast<int>(deg / (360.0 / bins));
    if (b >= bins) b -= bins;
    return b;
}

}  // namespace

GradientField spatial_gradients(const ScalarImage& image, const std::vector<std::uint8_t>* invalid_mask) {
    const int w = image.width;
    const int h = image.height;
    if (w < 3 || h < 3) throw DataError("spatial_gradients: image too small, need at least 3x3");
    if (invalid_mask && invalid_mask->size() != image.data.size())
        throw DataError("spatial_gradients: invalid mask size mismatch");

    GradientField field;
    field.width = w;
    field.height = h;
    field.gx.assign(image.data.size(), 0.0);
    field.gy.assign(image.data.size(), 0.0);
    field.magnitude.assign(image.data.size(), 0.0);
    field.orientation.assign(image.data.size(), 0.0);

    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (invalid_mask) {
                bool near_invalid = false;
                for (int ny = y - 1; ny <= y + 1 && !near_invalid; ++ny)
                    for (int nx = x - 1; nx <= x + 1; ++nx)
                        if ((*invalid_mask)[static_cast<std::size_t>(ny) * w + nx]) {
                            near_invalid = true;
                            break;
                        }
                if (near_invalid) continue;
            }
            const double gx = image.at(x + 1, y) - image.at(x - 1, y);
            const double gy = image.at(x, y + 1) - image.at(x, y - 1);
            const double mag = std::sqrt(gx * gx + gy * gy);
            field.gx[i] = gx;
            field.gy[i] = gy;
            field.magnitude[i] = mag;
            if (mag > 0) field.orientation[i] = orientation_degrees(gx, gy);
        }
    }
    return field;
}

std::vector<double> orientation_histogram(std::span<const OrientedSample> samples, int bins) {
    if (bins < 2) throw ConfigError("orientation_histogram: bins must be >= 2");
    std::vector<double> hist(bins, 0.0);
    for (const OrientedSample& s : samples) {
        if (s.magnitude == 0.0) continue;
        hist[orientation_bin(s.orientation, bins)] += s.magnitude;
    }
    return hist;
}

std::vector<double> hof_histogram(std::span<const FlowSample> samples, int bins, double epsilon) {
    if (bins < 3) throw ConfigError("hof_histogram: bins must be >= 3 (orientation bins + zero bin)");
    if (epsilon < 0) throw ConfigError("hof_histogram: epsilon must be >= 0");
    std::vector<double> hist(bins, 0.0);
    const int orient_bins = bins - 1;
    for (const FlowSample& s : samples) {
        const double mag = std::sqrt(s.dx * s.dx + s.dy * s.dy);
        if (mag < epsilon) {
            hist[orient_bins] += 1.0;
        } else {
            hist[orientation_bin(orientation_degrees(s.dx, s.dy), orient_bins)] += mag;
        }
    }
    return hist;
}

std::vector<double>& TrajectoryDescriptor::channel(int idx) {
    switch (idx) {
        case 0: return hog;
        case 1: return hof;
        case 2: return mbhx;
        case 3: return mbhy;
        default: return hodg;
    }
}

const std::vector<double>& TrajectoryDescriptor::channel(int idx) const {
    return const_cast<TrajectoryDescriptor*>(this)->channel(idx);
}

namespace {

// Per-frame inputs shared by every trajectory covering the frame.
struct FrameFeatures {
    GradientField gray_grad;
    GradientField depth_grad;
    ScalarImage flow_dx, flow_dy;  // block vectors replicated per pixel
    GradientField flow_dx_grad, flow_dy_grad;
};

ScalarImage replicate_flow(const MotionField& field, int width, int height, bool x_component) {
    ScalarImage img;
    img.width = width;
    img.height = height;
    img.data.resize(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const MotionVec& v = field.at_pixel(x, y);
            img.data[static_cast<std::size_t>(y) * width + x] = x_component ? v.dx : v.dy;
        }
    return img;
}

FrameFeatures compute_frame_features(const GrayFrame* gray, const DepthFrame* depth,
                                     const MotionField* flow_field, const ChannelSet& channels) {
    FrameFeatures ff;
    if (channels.hog) ff.gray_grad = spatial_gradients(gray_to_scalar(*gray));
    if (channels.hodg) {
        std::vector<std::uint8_t> invalid;
        const ScalarImage img = depth_to_scalar(*depth, &invalid);
        ff.depth_grad = spatial_gradients(img, &invalid);
    }
    if (channels.needs_flow()) {
        const int w = gray ? gray->width : depth->width;
        const int h = gray ? gray->height : depth->height;
        ff.flow_dx = replicate_flow(*flow_field, w, h, true);
        ff.flow_dy = replicate_flow(*flow_field, w, h, false);
        if (channels.mbhx) ff.flow_dx_grad = spatial_gradients(ff.flow_dx);
        if (channels.mbhy) ff.flow_dy_grad = spatial_gradients(ff.flow_dy);
    }
    return ff;
}

void init_descriptor(TrajectoryDescriptor& d, const Trajectory& traj, const DescriptorConfig& cfg,
                     const ChannelSet& channels) {
    d.start_frame = static_cast<std::uint32_t>(traj.start_frame);
    double sx = 0, sy = 0;
    for (const PointI p : traj.points) {
        sx += p.x;
        sy += p.y;
    }
    d.mean_x = static_cast<float>(sx / traj.points.size());
    d.mean_y = static_cast<float>(sy / traj.points.size());
    if (channels.hog) d.hog.assign(cfg.gradient_length(), 0.0);
    if (channels.hof) d.hof.assign(cfg.hof_length(), 0.0);
    if (channels.mbhx) d.mbhx.assign(cfg.gradient_length(), 0.0);
    if (channels.mbhy) d.mbhy.assign(cfg.gradient_length(), 0.0);
    if (channels.hodg) d.hodg.assign(cfg.gradient_length(), 0.0);
}

int frame_width(const FrameFeatures& ff, const ChannelSet& channels) {
    if (channels.hog) return ff.gray_grad.width;
    if (channels.hodg) return ff.depth_grad.width;
    return ff.flow_dx.width;
}

// Adds one frame's window samples into the running cell histograms.
void accumulate_window(TrajectoryDescriptor& d, const Trajectory& traj, int trel,
                       const FrameFeatures& ff, const DescriptorConfig& cfg,
                       const ChannelSet& channels) {
    const PointI center = traj.points[trel];
    const int half = cfg.window / 2;
    const int x0 = center.x - half;
    const int y0 = center.y - half;
    const int ts = trel / cfg.cell_t();
    const int cell_w = cfg.cell_w();
    const int cell_h = cfg.cell_h();
    const int bins = cfg.orient_bins;
    const int hof_bins = cfg.hof_bins();
    const double bin_width = 360.0 / bins;
    const int stride = frame_width(ff, channels);

    for (int wy = 0; wy < cfg.window; ++wy) {
        const int y = y0 + wy;
        const int cy = wy / cell_h;
        for (int wx = 0; wx < cfg.window; ++wx) {
            const int x = x0 + wx;
            const int cx = wx / cell_w;
            const int cell = (ts * cfg.grid_y + cy) * cfg.grid_x + cx;
            const std::size_t i = static_cast<std::size_t>(y) * stride + x;

            if (channels.hog) {
                const double mag = ff.gray_grad.magnitude[i];
                if (mag != 0.0) {
                    int b = static_cast<int>(ff.gray_grad.orientation[i] / bin_width);
                    if (b >= bins) b -= bins;
                    d.hog[cell * bins + b] += mag;
                }
            }
            if (channels.hodg) {
                const double mag = ff.depth_grad.magnitude[i];
                if (mag != 0.0) {
                    int b = static_cast<int>(ff.depth_grad.orientation[i] / bin_width);
                    if (b >= bins) b -= bins;
                    d.hodg[cell * bins + b] += mag;
                }
            }
            if (channels.hof) {
                const double fx = ff.flow_dx.data[i];
                const double fy = ff.flow_dy.data[i];
                const double mag = std::sqrt(fx * fx + fy * fy);
                if (mag < cfg.epsilon_zero_flow) {
                    d.hof[cell * hof_bins + (hof_bins - 1)] += 1.0;
                } else {
                    int b = static_cast<int>(orientation_degrees(fx, fy) / bin_width);
                    if (b >= bins) b -= bins;
                    d.hof[cell * hof_bins + b] += mag;
                }
            }
            if (channels.mbhx) {
                const double mag = ff.flow_dx_grad.magnitude[i];
                if (mag != 0.0) {
                    int b = static_cast<int>(ff.flow_dx_grad.orientation[i] / bin_width);
                    if (b >= bins) b -= bins;
                    d.mbhx[cell * bins + b] += mag;
                }
            }
            if (channels.mbhy) {
                const double mag = ff.flow_dy_grad.magnitude[i];
                if (mag != 0.0) {
                    int b = static_cast<int>(ff.flow_dy_grad.orientation[i] / bin_width);
                    if (b >= bins) b -= bins;
                    d.mbhy[cell * bins + b] += mag;
                }
            }
        }
    }
}

void l2_normalize_slices(std::vector<double>& v, const DescriptorConfig& cfg, int bins) {
    if (v.empty()) return;
    const std::size_t slice_len = static_cast<std::size_t>(cfg.grid_x) * cfg.grid_y * bins;
    for (int ts = 0; ts < cfg.grid_t; ++ts) {
        double norm2 = 0.0;
        const std::size_t off = ts * slice_len;
        for (std::size_t i = 0; i < slice_len; ++i) norm2 += v[off + i] * v[off + i];
        if (norm2 == 0.0) continue;  // zero slices stay zero
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < slice_len; ++i) v[off + i] *= inv;
    }
}

void finalize_descriptor(TrajectoryDescriptor& d, const DescriptorConfig& cfg) {
    l2_normalize_slices(d.hog, cfg, cfg.orient_bins);
    l2_normalize_slices(d.hof, cfg, cfg.hof_bins());
    l2_normalize_slices(d.mbhx, cfg, cfg.orient_bins);
    l2_normalize_slices(d.mbhy, cfg, cfg.orient_bins);
    l2_normalize_slices(d.hodg, cfg, cfg.orient_bins);
}

// Gray frames carry the frame geometry for the flow channels too, so they are
// required whenever any flow-derived channel is on.
void check_extraction_inputs(const std::vector<GrayFrame>& gray, const std::vector<DepthFrame>& depth,
                             const std::vector<MotionField>& fields, const ChannelSet& channels,
                             std::size_t frames_needed) {
    if ((channels.needs_gray() || channels.needs_flow()) && gray.size() < frames_needed)
        throw DataError("descriptor extraction: frame index out of range (have " +
                        std::to_string(gray.size()) + " gray frames, need " +
                        std::to_string(frames_needed) + ")");
    if (channels.needs_depth() && depth.size() < frames_needed)
        throw DataError("descriptor extraction: frame index out of range (have " +
                        std::to_string(depth.size()) + " depth frames, need " +
                        std::to_string(frames_needed) + ")");
    if (channels.needs_flow() && fields.size() + 1 < frames_needed)
        throw DataError("descriptor extraction: not enough motion fields (have " +
                        std::to_string(fields.size()) + ", need " +
                        std::to_string(frames_needed - 1) + ")");
}

}  // namespace

TrajectoryDescriptor extract_trajectory_descriptor(const Trajectory& traj,
                                                   const std::vector<GrayFrame>& gray,
                                                   const std::vector<DepthFrame>& depth,
                                                   const std::vector<MotionField>& fields,
                                                   const DescriptorConfig& cfg,
                                                   const ChannelSet& channels) {
    cfg.validate();
    if (!traj.valid || static_cast<int>(traj.points.size()) != cfg.traj_len)
        throw DataError("extract_trajectory_descriptor: invalid trajectory");
    check_extraction_inputs(gray, depth, fields, channels,
                            static_cast<std::size_t>(traj.start_frame) + cfg.traj_len);

    TrajectoryDescriptor d;
    init_descriptor(d, traj, cfg, channels);
    for (int trel = 0; trel < cfg.traj_len; ++trel) {
        const std::size_t f = static_cast<std::size_t>(traj.start_frame) + trel;
        const MotionField* flow = nullptr;
        if (channels.needs_flow()) flow = &fields[std::min(f, fields.size() - 1)];
        const FrameFeatures ff = compute_frame_features(
            channels.needs_gray() || channels.needs_flow() ? &gray[f] : nullptr,
            channels.needs_depth() ? &depth[f] : nullptr, flow, channels);
        accumulate_window(d, traj, trel, ff, cfg, channels);
    }
    finalize_descriptor(d, cfg);
    return d;
}

std::vector<TrajectoryDescriptor> extract_descriptors(const std::vector<Trajectory>& trajectories,
                                                      const std::vector<GrayFrame>& gray,
                                                      const std::vector<DepthFrame>& depth,
                                                      const std::vector<MotionField>& fields,
                                                      const DescriptorConfig& cfg,
                                                      const ChannelSet& channels, int workers) {
    cfg.validate();
    if (workers < 1) throw ConfigError("extract_descriptors: workers must be >= 1");

    std::vector<TrajectoryDescriptor> out(trajectories.size());
    std::size_t frames_needed = 0;
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const Trajectory& t = trajectories[i];
        if (!t.valid || static_cast<int>(t.points.size()) != cfg.traj_len)
            throw DataError("extract_descriptors: invalid trajectory at index " + std::to_string(i));
        frames_needed = std::max(frames_needed, static_cast<std::size_t>(t.start_frame) + cfg.traj_len);
        init_descriptor(out[i], t, cfg, channels);
    }
    check_extraction_inputs(gray, depth, fields, channels, frames_needed);
    const std::size_t frame_count = frames_needed;

    // Active trajectories per frame; input order is start-frame sorted when it
    // comes from build_trajectories, but nothing below depends on that.
    std::vector<std::size_t> active;
    for (std::size_t f = 0; f < frame_count; ++f) {
        active.clear();
        for (std::size_t i = 0; i < trajectories.size(); ++i) {
            const std::size_t s = static_cast<std::size_t>(trajectories[i].start_frame);
            if (f >= s && f < s + cfg.traj_len) active.push_back(i);
        }
        if (active.empty()) continue;

        const MotionField* flow = nullptr;
        if (channels.needs_flow()) flow = &fields[std::min(f, fields.size() - 1)];
        const FrameFeatures ff = compute_frame_features(
            channels.needs_gray() || channels.needs_flow() ? &gray[f] : nullptr,
            channels.needs_depth() ? &depth[f] : nullptr, flow, channels);

        auto run_chunk = [&](std::size_t lo, std::size_t hi) {
            for (std::size_t k = lo; k < hi; ++k) {
                const std::size_t i = active[k];
                const int trel = static_cast<int>(f) - trajectories[i].start_frame;
                accumulate_window(out[i], trajectories[i], trel, ff, cfg, channels);
            }
        };
        if (workers == 1 || active.size() < 2) {
            run_chunk(0, active.size());
        } else {
            const std::size_t n = active.size();
            const std::size_t nthreads = std::min<std::size_t>(workers, n);
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < nthreads; ++w) {
                const std::size_t lo = n * w / nthreads;
                const std::size_t hi = n * (w + 1) / nthreads;
                pool.emplace_back(run_chunk, lo, hi);
            }
            for (auto& th : pool) th.join();
        }
    }
    for (auto& d : out) finalize_descriptor(d, cfg);
    return out;
}

void write_descriptor_dump(const std::filesystem::path& path,
                           const std::vector<TrajectoryDescriptor>& descriptors,
                           const DescriptorConfig& cfg) {
    const std::uint32_t lengths[5] = {
        static_cast<std::uint32_t>(cfg.gradient_length()), static_cast<std::uint32_t>(cfg.hof_length()),
        static_cast<std::uint32_t>(cfg.gradient_length()), static_cast<std::uint32_t>(cfg.gradient_length()),
        static_cast<std::uint32_t>(cfg.gradient_length())};

    std::string out = "HODG1";
    bin::put_u32(out, static_cast<std::uint32_t>(descriptors.size()));
    for (const std::uint32_t len : lengths) bin::put_u32(out, len);
    for (const TrajectoryDescriptor& d : descriptors) {
        for (int c = 0; c < 5; ++c)
            if (d.channel(c).size() != lengths[c])
                throw DataError(path.string() + ": descriptor channel \"" + kChannelNames[c] +
                                "\" has length " + std::to_string(d.channel(c).size()) + ", expected " +
                                std::to_string(lengths[c]));
        bin::put_u32(out, d.start_frame);
        bin::put_f32(out, d.mean_x);
        bin::put_f32(out, d.mean_y);
        for (int c = 0; c < 5; ++c)
            for (const double v : d.channel(c)) bin::put_f32(out, static_cast<float>(v));
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError(path.string() + ": cannot open for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw DataError(path.string() + ": write failed");
}

std::vector<TrajectoryDescriptor> read_descriptor_dump(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string buf = std::move(ss).str();

    bin::Reader r{buf, 0, path.string()};
    r.expect_magic("HODG1");
    const std::uint32_t count = r.u32("record count");
    std::uint32_t lengths[5];
    for (int c = 0; c < 5; ++c) lengths[c] = r.u32("channel length");

    std::vector<TrajectoryDescriptor> out(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        TrajectoryDescriptor& d = out[i];
        d.start_frame = r.u32("start_frame");
        d.mean_x = r.f32("mean_x");
        d.mean_y = r.f32("mean_y");
        for (int c = 0; c < 5; ++c) {
            auto& ch = d.channel(c);
            ch.resize(lengths[c]);
            for (std::uint32_t j = 0; j < lengths[c]; ++j) ch[j] = r.f32("channel value");
        }
    }
    if (r.pos != buf.size())
        throw DataError(path.string() + ": trailing bytes after last record at byte " +
                        std::to_string(r.pos));
    return out;
}

}  // namespace hodg
