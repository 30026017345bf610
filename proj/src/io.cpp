#include "hodg/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hodg/errors.hpp"

namespace hodg {
namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path.string() + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError(path.string() + ": write failed");
}

// PNM header scanner: whitespace- and comment-aware, tracks byte offsets.
struct PnmCursor {
    const std::string& buf;
    const std::string path;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw DataError(path + ": " + what + " at byte " + std::to_string(pos));
    }

    void skip_space_and_comments() {
        while (pos < buf.size()) {
            const char c = buf[pos];
            if (c == '#') {
                while (pos < buf.size() && buf[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos;
            } else {
                break;
            }
        }
    }

    long next_int(const char* what) {
        skip_space_and_comments();
        if (pos >= buf.size() || buf[pos] < '0' || buf[pos] > '9')
            fail(std::string("malformed header: expected ") + what);
        long v = 0;
        while (pos < buf.size() && buf[pos] >= '0' && buf[pos] <= '9') {
            v = v * 10 + (buf[pos] - '0');
            if (v > 1'000'000'000L) fail(std::string("implausible ") + what);
            ++pos;
        }
        return v;
    }

    // Exactly one whitespace byte separates maxval from the payload.
    void expect_single_space() {
        if (pos >= buf.size() || (buf[pos] != ' ' && buf[pos] != '\t' && buf[pos] != '\n' && buf[pos] != '\r'))
            fail("malformed header: expected whitespace before payload");
        ++pos;
    }
};

}  // namespace

GrayFrame to_gray(const RgbFrame& rgb) {
    GrayFrame g;
    g.width = rgb.width;
    g.height = rgb.height;
    g.data.resize(static_cast<std::size_t>(rgb.width) * rgb.height);
    for (std::size_t i = 0; i < g.data.size(); ++i) {
        const double v = 0.299 * rgb.data[3 * i] + 0.587 * rgb.data[3 * i + 1] + 0.114 * rgb.data[3 * i + 2];
        g.data[i] = static_cast<std::uint8_t>(std::lround(v));
    }
    return g;
}

RgbFrame load_rgb_frame(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw DataError(path.string() + ": file does not exist");
    const std::string buf = read_file(path);
    PnmCursor cur{buf, path.string()};

    if (buf.compare(0, 2, "P6") != 0) cur.fail("malformed header: not a binary PPM (P6)");
    cur.pos = 2;
    const long w = cur.next_int("width");
    const long h = cur.next_int("height");
    const std::size_t maxval_pos = cur.pos;
    const long maxval = cur.next_int("maxval");
    if (maxval != 255) {
        cur.pos = maxval_pos;
        cur.fail("maxval must be 255, got " + std::to_string(maxval));
    }
    cur.expect_single_space();
    if (w < 1 || h < 1) cur.fail("invalid dimensions");

    const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
    if (buf.size() - cur.pos < need)
        throw DataError(path.string() + ": truncated payload, need " + std::to_string(need) +
                        " bytes but only " + std::to_string(buf.size() - cur.pos) +
                        " remain at byte " + std::to_string(cur.pos));

    RgbFrame frame;
    frame.width = static_cast<int>(w);
    frame.height = static_cast<int>(h);
    frame.data.assign(buf.begin() + static_cast<std::ptrdiff_t>(cur.pos),
                      buf.begin() + static_cast<std::ptrdiff_t>(cur.pos + need));
    return frame;
}

void write_rgb_frame(const std::filesystem::path& path, const RgbFrame& frame) {
    if (frame.data.size() != static_cast<std::size_t>(frame.width) * frame.height * 3)
        throw DataError(path.string() + ": frame data length does not match dimensions");
    std::string out = "P6\n" + std::to_string(frame.width) + " " + std::to_string(frame.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(frame.data.data()), frame.data.size());
    write_file(path, out);
}

DepthFrame load_depth_frame(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw DataError(path.string() + ": file does not exist");
    const std::string buf = read_file(path);
    PnmCursor cur{buf, path.string()};

    if (buf.compare(0, 2, "P5") != 0) cur.fail("malformed header: not a binary PGM (P5)");
    cur.pos = 2;
    const long w = cur.next_int("width");
    const long h = cur.next_int("height");
    const std::size_t maxval_pos = cur.pos;
    const long maxval = cur.next_int("maxval");
    if (maxval != 65535) {
        cur.pos = maxval_pos;
        cur.fail("maxval must be 65535, got " + std::to_string(maxval));
    }
    cur.expect_single_space();
    if (w < 1 || h < 1) cur.fail("invalid dimensions");

    const std::size_t samples = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (buf.size() - cur.pos < samples * 2)
        throw DataError(path.string() + ": truncated payload, need " + std::to_string(samples * 2) +
                        " bytes but only " + std::to_string(buf.size() - cur.pos) +
                        " remain at byte " + std::to_string(cur.pos));

    DepthFrame frame;
    frame.width = static_cast<int>(w);
    frame.height = static_cast<int>(h);
    frame.data.resize(samples);
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data() + cur.pos);
    for (std::size_t i = 0; i < samples; ++i)
        frame.data[i] = static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]);  // big-endian
    return frame;
}

void write_depth_frame(const std::filesystem::path& path, const DepthFrame& frame) {
    if (frame.data.size() != static_cast<std::size_t>(frame.width) * frame.height)
        throw DataError(path.string() + ": frame data length does not match dimensions");
    std::string out = "P5\n" + std::to_string(frame.width) + " " + std::to_string(frame.height) + "\n65535\n";
    out.reserve(out.size() + frame.data.size() * 2);
    for (const std::uint16_t v : frame.data) {
        out.push_back(static_cast<char>((v >> 8) & 0xff));
        out.push_back(static_cast<char>(v & 0xff));
    }
    write_file(path, out);
}

SequenceManifest open_sequence(const std::filesystem::path& manifest_path) {
    if (!std::filesystem::exists(manifest_path))
        throw DataError(manifest_path.string() + ": file does not exist");

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(manifest_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(manifest_path.string() + ": invalid JSON: " + e.what());
    }
    const std::string ctx = manifest_path.string();
    if (!doc.is_object()) throw DataError(ctx + ": manifest must be a JSON object");
    for (const char* key : {"frame_count", "rgb", "depth"})
        if (!doc.contains(key)) throw DataError(ctx + ": manifest missing field \"" + key + "\"");

    SequenceManifest m;
    m.frame_count = doc["frame_count"].get<int>();
    if (doc.contains("label")) m.label = doc["label"].get<std::string>();
    if (doc.contains("fps")) m.fps_nominal = doc["fps"].get<double>();

    const auto base = manifest_path.parent_path();
    auto resolve = [&](const nlohmann::json& arr, std::vector<std::string>& out, const char* name) {
        if (!arr.is_array()) throw DataError(ctx + ": \"" + name + "\" must be an array");
        for (const auto& p : arr) {
            std::filesystem::path fp = p.get<std::string>();
            if (fp.is_relative()) fp = base / fp;
            out.push_back(fp.string());
        }
    };
    resolve(doc["rgb"], m.rgb_paths, "rgb");
    resolve(doc["depth"], m.depth_paths, "depth");

    if (m.rgb_paths.size() != m.depth_paths.size() ||
        m.rgb_paths.size() != static_cast<std::size_t>(m.frame_count))
        throw DataError(ctx + ": list-length mismatch: frame_count=" + std::to_string(m.frame_count) +
                        ", rgb=" + std::to_string(m.rgb_paths.size()) +
                        ", depth=" + std::to_string(m.depth_paths.size()));
    if (m.frame_count < 15)
        throw DataError(ctx + ": sequence shorter than trajectory length (frame_count=" +
                        std::to_string(m.frame_count) + ", need >= 15)");

    for (const auto& p : m.rgb_paths)
        if (!std::filesystem::exists(p)) throw DataError(ctx + ": referenced file missing: " + p);
    for (const auto& p : m.depth_paths)
        if (!std::filesystem::exists(p)) throw DataError(ctx + ": referenced file missing: " + p);

    const RgbFrame rgb0 = load_rgb_frame(m.rgb_paths[0]);
    const DepthFrame depth0 = load_depth_frame(m.depth_paths[0]);
    if (rgb0.width != depth0.width || rgb0.height != depth0.height)
        throw DataError(ctx + ": dimension mismatch between RGB (" + std::to_string(rgb0.width) + "x" +
                        std::to_string(rgb0.height) + ") and depth (" + std::to_string(depth0.width) +
                        "x" + std::to_string(depth0.height) + ")");
    if (rgb0.width < 48 || rgb0.height < 48)
        throw DataError(ctx + ": frames must be at least 48x48 (one 32x32 window plus a 16-pixel block margin), got " +
                        std::to_string(rgb0.width) + "x" + std::to_string(rgb0.height));
    return m;
}

void write_manifest(const std::filesystem::path& path, const SequenceManifest& manifest) {
    const auto base = path.parent_path();
    auto relativize = [&](const std::string& p) {
        const std::filesystem::path fp(p);
        if (!base.empty() && fp.is_absolute()) {
            std::error_code ec;
            const auto rel = std::filesystem::relative(fp, base, ec);
            if (!ec && !rel.empty()) return rel.generic_string();
        }
        return fp.generic_string();
    };

    nlohmann::ordered_json doc;
    doc["frame_count"] = manifest.frame_count;
    doc["rgb"] = nlohmann::json::array();
    doc["depth"] = nlohmann::json::array();
    for (const auto& p : manifest.rgb_paths) doc["rgb"].push_back(relativize(p));
    for (const auto& p : manifest.depth_paths) doc["depth"].push_back(relativize(p));
    if (!manifest.label.empty()) doc["label"] = manifest.label;
    if (manifest.fps_nominal > 0) doc["fps"] = manifest.fps_nominal;
    write_file(path, doc.dump(2) + "\n");
}

}  // namespace hodg
