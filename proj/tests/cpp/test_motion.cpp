#include <doctest.h>

#include <fstream>

#include "hodg/errors.hpp"
#include "hodg/motion.hpp"
#include "hodg/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace hodg;
using testutil::TempDir;

namespace {

GrayFrame constant_frame(int w, int h, std::uint8_t v) {
    GrayFrame g;
    g.width = w;
    g.height = h;
    g.data.assign(static_cast<std::size_t>(w) * h, v);
    return g;
}

GrayFrame checkerboard(int w, int h, bool invert) {
    GrayFrame g;
    g.width = w;
    g.height = h;
    g.data.resize(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            g.data[static_cast<std::size_t>(y) * w + x] =
                (((x + y) % 2 == 0) != invert) ? 200 : 20;
    return g;
}

std::vector<MotionField> uniform_fields(int n, int blocks_x, int blocks_y, int block_size,
                                        MotionVec v) {
    std::vector<MotionField> fields(n);
    for (MotionField& f : fields) {
        f.blocks_x = blocks_x;
        f.blocks_y = blocks_y;
        f.block_size = block_size;
        f.vectors.assign(static_cast<std::size_t>(blocks_x) * blocks_y, v);
    }
    return fields;
}

}  // namespace

TEST_SUITE("motion") {

TEST_CASE("estimate_motion matches the brute-force oracle") {
    Rng rng(4242);
    struct Layout {
        int w, h, bs, range;
    };
    // 50x35 with bs=8 leaves trailing partial rows/columns on both axes.
    for (const Layout lay : {Layout{48, 48, 16, 4}, Layout{50, 35, 8, 3}, Layout{64, 48, 16, 2}}) {
        const GrayFrame prev = testutil::random_gray(rng, lay.w, lay.h);
        const GrayFrame cur = testutil::random_gray(rng, lay.w, lay.h);
        const MotionField field = estimate_motion(prev, cur, lay.bs, lay.range);
        CHECK(field.blocks_x == lay.w / lay.bs);
        CHECK(field.blocks_y == lay.h / lay.bs);
        CHECK(field.block_size == lay.bs);
        for (int by = 0; by < field.blocks_y; ++by)
            for (int bx = 0; bx < field.blocks_x; ++bx)
                CHECK(field.at(bx, by) == oracle::sad_best(prev, cur, bx, by, lay.bs, lay.range));
    }
}

TEST_CASE("estimate_motion recovers a global shift") {
    Rng rng(7);
    const GrayFrame master = testutil::random_gray(rng, 80, 80);
    auto crop = [&](int ox, int oy) {
        GrayFrame g;
        g.width = 48;
        g.height = 48;
        g.data.resize(48 * 48);
        for (int y = 0; y < 48; ++y)
            for (int x = 0; x < 48; ++x) g.data[static_cast<std::size_t>(y) * 48 + x] = master.at(ox + x, oy + y);
        return g;
    };
    // cur is the scene moved by (+2, +1), so blocks match at offset (-2, -1).
    const GrayFrame prev = crop(10, 10);
    const GrayFrame cur = crop(12, 11);
    const MotionField field = estimate_motion(prev, cur, 16, 4);
    for (int by = 1; by < field.blocks_y; ++by)
        for (int bx = 1; bx < field.blocks_x; ++bx) CHECK(field.at(bx, by) == MotionVec{-2, -1});
}

TEST_CASE("identical frames yield all-zero vectors") {
    Rng rng(9);
    const GrayFrame frame = testutil::random_gray(rng, 48, 48);
    const MotionField field = estimate_motion(frame, frame, 16, 4);
    for (const MotionVec& v : field.vectors) CHECK(v == MotionVec{0, 0});
}

TEST_CASE("ties break toward small displacement, then scan order") {
    SUBCASE("constant frames tie everywhere, zero vector wins on |dx|+|dy|") {
        const GrayFrame a = constant_frame(32, 32, 128);
        const MotionField field = estimate_motion(a, a, 8, 3);
        for (const MotionVec& v : field.vectors) CHECK(v == MotionVec{0, 0});
    }
    SUBCASE("inverted checkerboard ties at four unit offsets, dy=-1 scans first") {
        const GrayFrame prev = checkerboard(16, 16, true);
        const GrayFrame cur = checkerboard(16, 16, false);
        const MotionField field = estimate_motion(prev, cur, 4, 2);
        // Interior blocks see all of (0,-1), (-1,0), (1,0), (0,1) at SAD 0 and
        // equal |dx|+|dy|; the dy=-1 row is scanned before the others.
        for (int by = 1; by < field.blocks_y - 1; ++by)
            for (int bx = 1; bx < field.blocks_x - 1; ++bx)
                CHECK(field.at(bx, by) == MotionVec{0, -1});
        // Border blocks follow the same rule with out-of-range candidates
        // dropped; the oracle agrees on every block.
        for (int by = 0; by < field.blocks_y; ++by)
            for (int bx = 0; bx < field.blocks_x; ++bx)
                CHECK(field.at(bx, by) == oracle::sad_best(prev, cur, bx, by, 4, 2));
    }
}

TEST_CASE("estimate_motion validates input") {
    Rng rng(11);
    const GrayFrame a = testutil::random_gray(rng, 48, 48);
    const GrayFrame b = testutil::random_gray(rng, 48, 32);
    CHECK_THROWS_AS(estimate_motion(a, b, 16, 4), DataError);
    CHECK_THROWS_AS(estimate_motion(a, a, 0, 4), ConfigError);
    CHECK_THROWS_AS(estimate_motion(a, a, 16, 0), ConfigError);
    const GrayFrame tiny = testutil::random_gray(rng, 8, 8);
    CHECK_THROWS_AS(estimate_motion(tiny, tiny, 16, 4), DataError);
}

TEST_CASE("at_pixel clamps trailing pixels to the last full block") {
    MotionField f;
    f.blocks_x = 3;
    f.blocks_y = 2;
    f.block_size = 16;
    f.vectors.resize(6);
    for (int i = 0; i < 6; ++i) f.vectors[i] = {i, -i};
    CHECK(f.at_pixel(0.0, 0.0) == f.at(0, 0));
    CHECK(f.at_pixel(15.9, 15.9) == f.at(0, 0));
    CHECK(f.at_pixel(16.0, 0.0) == f.at(1, 0));
    CHECK(f.at_pixel(47.9, 31.9) == f.at(2, 1));
    // Pixels past the full-block grid (e.g. a 52x35 frame) clamp inward.
    CHECK(f.at_pixel(51.0, 34.0) == f.at(2, 1));
    CHECK(f.at_pixel(200.0, 200.0) == f.at(2, 1));
}

TEST_CASE("motion sidecar round trip") {
    Rng rng(21);
    std::vector<MotionField> fields;
    for (int t = 0; t < 3; ++t) {
        MotionField f;
        f.blocks_x = 4;
        f.blocks_y = 3;
        f.block_size = 16;
        for (int i = 0; i < 12; ++i)
            f.vectors.push_back({int(uniform_index(rng, 9)) - 4, int(uniform_index(rng, 9)) - 4});
        fields.push_back(std::move(f));
    }
    TempDir tmp("sidecar");
    const auto path = tmp.path / "seq.mv";
    write_motion_sidecar(path, fields);

    const std::string text = testutil::slurp(path);
    CHECK(text.rfind("MF 0 4 3 16\n", 0) == 0);

    const std::vector<MotionField> back = parse_motion_sidecar(path);
    REQUIRE(back.size() == fields.size());
    for (std::size_t t = 0; t < fields.size(); ++t) CHECK(back[t] == fields[t]);
}

TEST_CASE("motion sidecar parse errors carry line numbers") {
    TempDir tmp("sidecar_err");
    auto write_text = [&](const std::string& name, const std::string& text) {
        std::ofstream out(tmp.path / name);
        out << text;
        return tmp.path / name;
    };
    auto message_of = [](auto fn) {
        try {
            fn();
        } catch (const DataError& e) {
            return std::string(e.what());
        }
        return std::string();
    };

    SUBCASE("malformed header") {
        const auto p = write_text("a.mv", "MF zero 2 2 16\n");
        const std::string msg = message_of([&] { parse_motion_sidecar(p); });
        CHECK(msg.find(":1:") != std::string::npos);
        CHECK(msg.find("malformed header") != std::string::npos);
    }
    SUBCASE("trailing header content") {
        const auto p = write_text("b.mv", "MF 0 1 1 16 junk\n0,0\n");
        const std::string msg = message_of([&] { parse_motion_sidecar(p); });
        CHECK(msg.find("trailing content") != std::string::npos);
    }
    SUBCASE("non-contiguous frame index") {
        const auto p = write_text("c.mv", "MF 1 1 1 16\n0,0\n");
        const std::string msg = message_of([&] { parse_motion_sidecar(p); });
        CHECK(msg.find("non-contiguous frame index 1") != std::string::npos);
    }
    SUBCASE("wrong entry count in a row") {
        const auto p = write_text("d.mv", "MF 0 3 1 16\n0,0 1,1\n");
        const std::string msg = message_of([&] { parse_motion_sidecar(p); });
        CHECK(msg.find(":2:") != std::string::npos);
        CHECK(msg.find("wrong entry count") != std::string::npos);
    }
    SUBCASE("too many entries in a row") {
        const auto p = write_text("e.mv", "MF 0 1 1 16\n0,0 1,1\n");
        CHECK_THROWS_AS(parse_motion_sidecar(p), DataError);
    }
    SUBCASE("non-integer vector") {
        const auto p = write_text("f.mv", "MF 0 2 1 16\n0,0 a,b\n");
        const std::string msg = message_of([&] { parse_motion_sidecar(p); });
        CHECK(msg.find("non-integer vector") != std::string::npos);
    }
    SUBCASE("missing comma") {
        const auto p = write_text("g.mv", "MF 0 1 1 16\n12\n");
        const std::string msg = message_of([&] { parse_motion_sidecar(p); });
        CHECK(msg.find("malformed vector") != std::string::npos);
    }
    SUBCASE("truncated stanza") {
        const auto p = write_text("h.mv", "MF 0 2 2 16\n0,0 1,1\n");
        const std::string msg = message_of([&] { parse_motion_sidecar(p); });
        CHECK(msg.find("unexpected end of file") != std::string::npos);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(parse_motion_sidecar(tmp.path / "absent.mv"), DataError);
    }
}

TEST_CASE("select_interest_points applies an inclusive threshold") {
    MotionField f;
    f.blocks_x = 4;
    f.blocks_y = 1;
    f.block_size = 16;
    f.vectors = {{0, 0}, {1, 1}, {2, 0}, {0, 3}};

    SUBCASE("tau between magnitudes") {
        // |(1,1)| ~ 1.414 falls below tau=2; |(2,0)| = 2 is kept (inclusive).
        const auto pts = select_interest_points(f, 2.0);
        REQUIRE(pts.size() == 2);
        CHECK(pts[0] == PointI{2 * 16 + 8, 8});
        CHECK(pts[1] == PointI{3 * 16 + 8, 8});
    }
    SUBCASE("tau zero keeps every block center") {
        const auto pts = select_interest_points(f, 0.0);
        REQUIRE(pts.size() == 4);
        for (int bx = 0; bx < 4; ++bx) CHECK(pts[bx] == PointI{bx * 16 + 8, 8});
    }
    SUBCASE("negative tau rejected") {
        CHECK_THROWS_AS(select_interest_points(f, -1.0), ConfigError);
    }
}

TEST_CASE("build_trajectories chains block vectors") {
    // 64x64 frame, 16px blocks: centers at x,y in {8,24,40,56}; a 32px window
    // keeps points with coordinates in [16, 48], so starts are at {24,40}^2.
    const std::vector<MotionField> fields = uniform_fields(20, 4, 4, 16, {1, 0});

    SUBCASE("per-step displacement and validity") {
        const auto trajs = build_trajectories(fields, 64, 64, 1, 0.0, 15, 32);
        // Starts at x=40 drift to x=54 and get dropped; x=24 ends at 38.
        // Start frames 0..6 each contribute (24,24) and (24,40).
        REQUIRE(trajs.size() == 14);
        for (const Trajectory& tr : trajs) {
            CHECK(tr.valid);
            REQUIRE(tr.points.size() == 15);
            CHECK(tr.points[0].x == 24);
            for (int t = 0; t < 15; ++t) {
                CHECK(tr.points[t].x == 24 + t);
                CHECK(tr.points[t].y == tr.points[0].y);
            }
            CHECK(trajectory_is_consistent(tr, fields, 64, 64, 32));
        }
        CHECK(trajs.front().start_frame == 0);
        CHECK(trajs.back().start_frame == 6);
    }
    SUBCASE("stride skips start frames") {
        const auto trajs = build_trajectories(fields, 64, 64, 3, 0.0, 15, 32);
        REQUIRE(trajs.size() == 6);
        for (std::size_t i = 0; i < trajs.size(); ++i)
            CHECK(trajs[i].start_frame == 3 * int(i / 2));
    }
    SUBCASE("tau above every magnitude yields nothing") {
        CHECK(build_trajectories(fields, 64, 64, 1, 10.0, 15, 32).empty());
    }
    SUBCASE("zero motion keeps all four eligible centers per start") {
        const auto still = uniform_fields(14, 4, 4, 16, {0, 0});
        const auto trajs = build_trajectories(still, 64, 64, 1, 0.0, 15, 32);
        // 14 fields support exactly one start frame (14 transitions needed).
        REQUIRE(trajs.size() == 4);
        for (const Trajectory& tr : trajs)
            for (const PointI p : tr.points) CHECK(p == tr.points[0]);
    }
    SUBCASE("too few fields yields nothing") {
        const auto short_fields = uniform_fields(13, 4, 4, 16, {0, 0});
        CHECK(build_trajectories(short_fields, 64, 64, 1, 0.0, 15, 32).empty());
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(build_trajectories(fields, 64, 64, 0, 0.0, 15, 32), ConfigError);
        CHECK_THROWS_AS(build_trajectories(fields, 64, 64, 1, 0.0, 1, 32), ConfigError);
    }
}

TEST_CASE("trajectory_is_consistent rejects tampered chains") {
    const std::vector<MotionField> fields = uniform_fields(20, 4, 4, 16, {1, 0});
    const auto trajs = build_trajectories(fields, 64, 64, 1, 0.0, 15, 32);
    REQUIRE(!trajs.empty());
    const Trajectory good = trajs.front();
    CHECK(trajectory_is_consistent(good, fields, 64, 64, 32));

    Trajectory bad = good;
    bad.valid = false;
    CHECK(!trajectory_is_consistent(bad, fields, 64, 64, 32));

    bad = good;
    bad.points[7].x += 1;
    CHECK(!trajectory_is_consistent(bad, fields, 64, 64, 32));

    bad = good;
    bad.points[3] = {2, 2};  // window leaves the frame
    CHECK(!trajectory_is_consistent(bad, fields, 64, 64, 32));

    bad = good;
    bad.start_frame = 18;  // chain runs past the available fields
    CHECK(!trajectory_is_consistent(bad, fields, 64, 64, 32));

    bad = good;
    bad.points.clear();
    CHECK(!trajectory_is_consistent(bad, fields, 64, 64, 32));
}

}  // TEST_SUITE("motion")
