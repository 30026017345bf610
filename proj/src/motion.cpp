#include "hodg/motion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hodg/errors.hpp"

namespace hodg {

const MotionVec& MotionField::at_pixel(double x, double y) const {
    int bx = static_cast<int>(std::floor(x / block_size));
    int by = static_cast<int>(std::floor(y / block_size));
    bx = std::clamp(bx, 0, blocks_x - 1);
    by = std::clamp(by, 0, blocks_y - 1);
    return at(bx, by);
}

namespace {

long block_sad(const GrayFrame& prev, const GrayFrame& cur, int px, int py, int cx, int cy,
               int block_size) {
    long sad = 0;
    for (int y = 0; y < block_size; ++y) {
        const std::uint8_t* prow = prev.data.data() + static_cast<std::size_t>(py + y) * prev.width + px;
        const std::uint8_t* crow = cur.data.data() + static_cast<std::size_t>(cy + y) * cur.width + cx;
        for (int x = 0; x < block_size; ++x) sad += std::abs(int(prow[x]) - int(crow[x]));
    }
    return sad;
}

}  // namespace

MotionField estimate_motion(const GrayFrame& prev, const GrayFrame& cur, int block_size,
                            int search_range) {
    if (prev.width != cur.width || prev.height != cur.height)
        throw DataError("estimate_motion: frame size mismatch (" + std::to_string(prev.width) + "x" +
                        std::to_string(prev.height) + " vs " + std::to_string(cur.width) + "x" +
                        std::to_string(cur.height) + ")");
    if (block_size < 1 || search_range < 1)
        throw ConfigError("estimate_motion: block_size and search_range must be >= 1");
    if (prev.width < block_size || prev.height < block_size)
        throw DataError("estimate_motion: frame smaller than one block");

    MotionField field;
    field.block_size = block_size;
    field.blocks_x = prev.width / block_size;
    field.blocks_y = prev.height / block_size;
    field.vectors.resize(static_cast<std::size_t>(field.blocks_x) * field.blocks_y);

    for (int by = 0; by < field.blocks_y; ++by) {
        for (int bx = 0; bx < field.blocks_x; ++bx) {
            const int px = bx * block_size;
            const int py = by * block_size;
            long best_sad = -1;
            int best_l1 = 0;
            MotionVec best{0, 0};
            for (int dy = -search_range; dy <= search_range; ++dy) {
                const int cy = py + dy;
                if (cy < 0 || cy + block_size > cur.height) continue;
                for (int dx = -search_range; dx <= search_range; ++dx) {
                    const int cx = px + dx;
                    if (cx < 0 || cx + block_size > cur.width) continue;
                    const long sad = block_sad(prev, cur, px, py, cx, cy, block_size);
                    const int l1 = std::abs(dx) + std::abs(dy);
                    if (best_sad < 0 || sad < best_sad || (sad == best_sad && l1 < best_l1)) {
                        best_sad = sad;
                        best_l1 = l1;
                        best = {dx, dy};
                    }
                }
            }
            field.at(bx, by) = best;
        }
    }
    return field;
}

std::vector<MotionField> parse_motion_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open file");

    std::vector<MotionField> fields;
    std::string line;
    long line_no = 0;
    const std::string ctx = path.string();

    auto fail = [&](const std::string& what) -> void {
        throw DataError(ctx + ":" + std::to_string(line_no) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream hdr(line);
        std::string tag;
        long t = -1, blocks_x = 0, blocks_y = 0, block_size = 0;
        if (!(hdr >> tag >> t >> blocks_x >> blocks_y >> block_size) || tag != "MF")
            fail("malformed header, expected \"MF t blocks_x blocks_y block_size\"");
        std::string extra;
        if (hdr >> extra) fail("malformed header, trailing content \"" + extra + "\"");
        if (blocks_x < 1 || blocks_y < 1 || block_size < 1) fail("malformed header, non-positive geometry");
        if (t != static_cast<long>(fields.size()))
            fail("non-contiguous frame index " + std::to_string(t) + ", expected " +
                 std::to_string(fields.size()));

        MotionField field;
        field.blocks_x = static_cast<int>(blocks_x);
        field.blocks_y = static_cast<int>(blocks_y);
        field.block_size = static_cast<int>(block_size);
        field.vectors.reserve(static_cast<std::size_t>(blocks_x) * blocks_y);

        for (long row = 0; row < blocks_y; ++row) {
            if (!std::getline(in, line)) {
                ++line_no;
                fail("unexpected end of file, expected vector row " + std::to_string(row));
            }
            ++line_no;
            std::istringstream cells(line);
            std::string cell;
            long col = 0;
            while (cells >> cell) {
                if (col >= blocks_x) fail("too many entries in row, expected " + std::to_string(blocks_x));
                const auto comma = cell.find(',');
                if (comma == std::string::npos) fail("malformed vector \"" + cell + "\", expected dx,dy");
                MotionVec v;
                try {
                    std::size_t used = 0;
                    v.dx = std::stoi(cell.substr(0, comma), &used);
                    if (used != comma) throw std::invalid_argument(cell);
                    const std::string dy_str = cell.substr(comma + 1);
                    v.dy = std::stoi(dy_str, &used);
                    if (used != dy_str.size()) throw std::invalid_argument(cell);
                } catch (const std::exception&) {
                    fail("non-integer vector \"" + cell + "\"");
                }
                field.vectors.push_back(v);
                ++col;
            }
            if (col != blocks_x)
                fail("wrong entry count in row: got " + std::to_string(col) + ", expected " +
                     std::to_string(blocks_x));
        }
        fields.push_back(std::move(field));
    }
    return fields;
}

void write_motion_sidecar(const std::filesystem::path& path, const std::vector<MotionField>& fields) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    for (std::size_t t = 0; t < fields.size(); ++t) {
        const MotionField& f = fields[t];
        out << "MF " << t << ' ' << f.blocks_x << ' ' << f.blocks_y << ' ' << f.block_size << '\n';
        for (int by = 0; by < f.blocks_y; ++by) {
            for (int bx = 0; bx < f.blocks_x; ++bx) {
                if (bx) out << ' ';
                const MotionVec& v = f.at(bx, by);
                out << v.dx << ',' << v.dy;
            }
            out << '\n';
        }
    }
    if (!out) throw DataError(path.string() + ": write failed");
}

std::vector<PointI> select_interest_points(const MotionField& field, double tau) {
    if (tau < 0) throw ConfigError("select_interest_points: tau must be >= 0");
    std::vector<PointI> points;
    const double tau2 = tau * tau;
    const int half = field.block_size / 2;
    for (int by = 0; by < field.blocks_y; ++by) {
        for (int bx = 0; bx < field.blocks_x; ++bx) {
            const MotionVec& v = field.at(bx, by);
            const double mag2 = double(v.dx) * v.dx + double(v.dy) * v.dy;
            if (mag2 >= tau2)
                points.push_back({bx * field.block_size + half, by * field.block_size + half});
        }
    }
    return points;
}

namespace {

bool window_in_bounds(int x, int y, int width, int height, int window) {
    const int half = window / 2;
    return x - half >= 0 && y - half >= 0 && x + half <= width && y + half <= height;
}

}  // namespace

std::vector<Trajectory> build_trajectories(const std::vector<MotionField>& fields, int frame_width,
                                           int frame_height, int stride, double tau, int traj_len,
                                           int window) {
    if (stride < 1) throw ConfigError("build_trajectories: stride must be >= 1");
    if (traj_len < 2) throw ConfigError("build_trajectories: traj_len must be >= 2");

    std::vector<Trajectory> out;
    const int transitions = traj_len - 1;
    for (int start = 0; start + transitions <= static_cast<int>(fields.size()); start += stride) {
        for (const PointI p0 : select_interest_points(fields[start], tau)) {
            Trajectory traj;
            traj.start_frame = start;
            traj.points.reserve(traj_len);
            traj.points.push_back(p0);
            bool ok = window_in_bounds(p0.x, p0.y, frame_width, frame_height, window);
            for (int t = 0; ok && t < transitions; ++t) {
                const PointI p = traj.points.back();
                const MotionVec& v = fields[start + t].at_pixel(p.x, p.y);
                const PointI next{p.x + v.dx, p.y + v.dy};
                if (!window_in_bounds(next.x, next.y, frame_width, frame_height, window)) {
                    ok = false;
                    break;
                }
                traj.points.push_back(next);
            }
            if (ok) {
                traj.valid = true;
                out.push_back(std::move(traj));
            }
        }
    }
    return out;
}

bool trajectory_is_consistent(const Trajectory& traj, const std::vector<MotionField>& fields,
                              int frame_width, int frame_height, int window) {
    if (!traj.valid || traj.points.empty()) return false;
    for (const PointI p : traj.points)
        if (!window_in_bounds(p.x, p.y, frame_width, frame_height, window)) return false;
    for (std::size_t t = 0; t + 1 < traj.points.size(); ++t) {
        const std::size_t f = static_cast<std::size_t>(traj.start_frame) + t;
        if (f >= fields.size()) return false;
        const PointI p = traj.points[t];
        const MotionVec& v = fields[f].at_pixel(p.x, p.y);
        if (traj.points[t + 1] != PointI{p.x + v.dx, p.y + v.dy}) return false;
    }
    return true;
}

}  // namespace hodg
