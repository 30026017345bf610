#include "hodg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "hodg/errors.hpp"
#include "hodg/io.hpp"
#include "hodg/rng.hpp"

namespace hodg {

namespace {

constexpr double kDegToRad = 0.017453292519943295;

// Smooth value-noise texture in [0,1]: random lattice, bilinear upsampling.
struct Texture {
    int lattice;
    double cell;
    std::vector<double> values;  // (lattice+1)^2

    Texture(Rng& rng, int lattice_, double extent) : lattice(lattice_), cell(extent / lattice_) {
        values.resize(static_cast<std::size_t>(lattice + 1) * (lattice + 1));
        for (double& v : values) v = uniform_double(rng);
    }

    // Coordinates in [-extent/2, extent/2] map onto the lattice; outside
    // samples clamp to the border cell.
    double sample(double u, double v) const {
        const double fu = std::clamp(u / cell + lattice / 2.0, 0.0, static_cast<double>(lattice) - 1e-9);
        const double fv = std::clamp(v / cell + lattice / 2.0, 0.0, static_cast<double>(lattice) - 1e-9);
        const int iu = static_cast<int>(fu);
        const int iv = static_cast<int>(fv);
        const double au = fu - iu;
        const double av = fv - iv;
        const auto at = [&](int x, int y) {
            return values[static_cast<std::size_t>(y) * (lattice + 1) + x];
        };
        return (1 - au) * (1 - av) * at(iu, iv) + au * (1 - av) * at(iu + 1, iv) +
               (1 - au) * av * at(iu, iv + 1) + au * av * at(iu + 1, iv + 1);
    }
};

std::uint8_t quant8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0), 0L, 255L));
}

}  // namespace

SequenceManifest synth_sequence(const SynthSpec& spec, std::uint64_t seed,
                                const std::filesystem::path& out_dir) {
    if (spec.class_id != "translate" && spec.class_id != "rotate" && spec.class_id != "approach")
        throw ConfigError("synth: unknown class \"" + spec.class_id +
                          "\", expected translate, rotate or approach");
    if (spec.frames < 15)
        throw ConfigError("synth: frames must be >= 15, got " + std::to_string(spec.frames));
    if (spec.size < 64) throw ConfigError("synth: size must be >= 64, got " + std::to_string(spec.size));
    if (spec.magnitude <= 0.0) throw ConfigError("synth: magnitude must be > 0");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError(out_dir.string() + ": cannot create directory: " + ec.message());

    const int w = spec.size;
    const int h = spec.size;
    const double radius = spec.size / 3.0;
    const bool lateral = spec.class_id != "rotate";

    Rng rng(splitmix64(seed ^ splitmix64(spec.texture_seed)));
    // Patch texture is finer than a 16x16 block so SAD matching locks on.
    Texture patch_tex(rng, 24, 2.0 * radius);
    Texture patch_tex2(rng, 12, 2.0 * radius);
    Texture bg_tex(rng, 8, static_cast<double>(spec.size));

    // Lateral classes ping-pong between margins on integer positions so
    // block matching recovers the shift exactly.
    const int step = std::max(1, static_cast<int>(std::lround(spec.magnitude)));
    const int x_min = static_cast<int>(std::ceil(radius)) + 2;
    const int x_max = w - 2 - static_cast<int>(std::ceil(radius));
    if (lateral && x_max <= x_min) throw ConfigError("synth: size too small for the patch to move");

    SequenceManifest manifest;
    manifest.frame_count = spec.frames;
    manifest.label = spec.class_id;
    manifest.fps_nominal = 30.0;

    const int cy = h / 2;
    int cx = lateral ? x_min : w / 2;
    int dir = 1;

    for (int t = 0; t < spec.frames; ++t) {
        const double angle = spec.class_id == "rotate" ? spec.magnitude * t * kDegToRad : 0.0;
        const double ca = std::cos(angle);
        const double sa = std::sin(angle);

        RgbFrame rgb;
        rgb.width = w;
        rgb.height = h;
        rgb.data.resize(static_cast<std::size_t>(w) * h * 3);
        DepthFrame depth;
        depth.width = w;
        depth.height = h;
        depth.data.resize(static_cast<std::size_t>(w) * h);

        const double near_depth = 30000.0 - 400.0 * t;   // approach
        const double cone_slope = 150.0 + 6.0 * t;       // approach, grows
        const double ramp_slope = 250.0;                 // rotate

        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double dx = x - cx;
                const double dy = y - cy;
                const double r = std::sqrt(dx * dx + dy * dy);
                const std::size_t idx = static_cast<std::size_t>(y) * w + x;

                if (r > radius) {
                    const double b = 0.35 + 0.15 * bg_tex.sample(x - w / 2.0, y - h / 2.0);
                    rgb.data[3 * idx] = quant8(b);
                    rgb.data[3 * idx + 1] = quant8(b * 0.9);
                    rgb.data[3 * idx + 2] = quant8(b * 1.1);
                    depth.data[idx] = 45000;
                    continue;
                }

                // Patch-local coordinates, de-rotated for the rotate class.
                const double u = ca * dx + sa * dy;
                const double v = -sa * dx + ca * dy;
                const double t1 = patch_tex.sample(u, v);
                const double t2 = patch_tex2.sample(u, v);
                rgb.data[3 * idx] = quant8(0.15 + 0.7 * t1);
                rgb.data[3 * idx + 1] = quant8(0.15 + 0.7 * t2);
                rgb.data[3 * idx + 2] = quant8(0.15 + 0.35 * (t1 + t2));

                double d;
                if (spec.class_id == "translate")
                    d = 22000.0;
                else if (spec.class_id == "rotate")
                    d = 30000.0 + ramp_slope * u;
                else
                    d = near_depth + cone_slope * r;
                depth.data[idx] = static_cast<std::uint16_t>(std::clamp(d, 1.0, 65535.0));
            }
        }

        char name[32];
        std::snprintf(name, sizeof name, "frame_%04d.ppm", t);
        const std::filesystem::path rgb_path = out_dir / name;
        std::snprintf(name, sizeof name, "depth_%04d.pgm", t);
        const std::filesystem::path depth_path = out_dir / name;
        write_rgb_frame(rgb_path, rgb);
        write_depth_frame(depth_path, depth);
        manifest.rgb_paths.push_back(std::filesystem::absolute(rgb_path).string());
        manifest.depth_paths.push_back(std::filesystem::absolute(depth_path).string());

        if (lateral) {
            cx += dir * step;
            if (cx > x_max) {
                cx = x_max - (cx - x_max);
                dir = -1;
            } else if (cx < x_min) {
                cx = x_min + (x_min - cx);
                dir = 1;
            }
        }
    }

    write_manifest(out_dir / "manifest.json", manifest);
    return manifest;
}

}  // namespace hodg
