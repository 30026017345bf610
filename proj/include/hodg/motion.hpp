#pragma once

#include <filesystem>
#include <vector>

#include "hodg/frames.hpp"

namespace hodg {

struct MotionVec {
    int dx = 0;
    int dy = 0;
    bool operator==(const MotionVec&) const = default;
};

struct PointI {
    int x = 0;
    int y = 0;
    bool operator==(const PointI&) const = default;
};

// Per-frame grid of block displacement vectors mapping frame t -> t+1,
// the stand-in for codec macroblock motion vectors.
struct MotionField {
    int blocks_x = 0;
    int blocks_y = 0;
    int block_size = 16;
    std::vector<MotionVec> vectors;  // row-major, blocks_x * blocks_y

    const MotionVec& at(int bx, int by) const {
        return vectors[static_cast<std::size_t>(by) * blocks_x + bx];
    }
    MotionVec& at(int bx, int by) { return vectors[static_cast<std::size_t>(by) * blocks_x + bx]; }

    // Vector of the block containing pixel (x, y); block indices clamp to the
    // full-block grid so trailing partial-block pixels read the nearest block.
    const MotionVec& at_pixel(double x, double y) const;

    bool operator==(const MotionField&) const = default;
};

// A chain of per-frame positions built by following block vectors; one point
// per frame over the trajectory length. Valid trajectories keep every
// window x window descriptor support inside frame bounds.
struct Trajectory {
    int start_frame = 0;
    std::vector<PointI> points;
    bool valid = false;
};

// Exhaustive SAD block matching over offsets in [-search_range, search_range]^2.
// Ties break toward smaller |dx|+|dy|, then row-major candidate scan order
// (dy outer, dx inner, both ascending). Trailing partial blocks are skipped.
// Candidate offsets that push the matched block outside `cur` are not
// considered; (0, 0) is always a candidate.
MotionField estimate_motion(const GrayFrame& prev, const GrayFrame& cur, int block_size,
                            int search_range);

// Sidecar text format, one stanza per frame transition:
//   MF t blocks_x blocks_y block_size
//   dx,dy dx,dy ...          (blocks_y rows of blocks_x pairs)
// Frame indices must run 0, 1, 2, ... without gaps.
std::vector<MotionField> parse_motion_sidecar(const std::filesystem::path& path);
void write_motion_sidecar(const std::filesystem::path& path, const std::vector<MotionField>& fields);

// Centers of blocks whose vector magnitude is at least tau (inclusive), in
// row-major block order. tau = 0 keeps every block center.
std::vector<PointI> select_interest_points(const MotionField& field, double tau);

// Chains interest points of every stride-th start frame through the fields.
// Each emitted trajectory has traj_len points; candidates whose descriptor
// window would leave the frame at any point are dropped.
std::vector<Trajectory> build_trajectories(const std::vector<MotionField>& fields, int frame_width,
                                           int frame_height, int stride, double tau,
                                           int traj_len = 15, int window = 32);

// Re-checks the chaining and in-bounds invariants of a built trajectory.
bool trajectory_is_consistent(const Trajectory& traj, const std::vector<MotionField>& fields,
                              int frame_width, int frame_height, int window = 32);

}  // namespace hodg
