#include <doctest.h>

#include <cmath>
#include <fstream>

#include "hodg/errors.hpp"
#include "hodg/metrics.hpp"
#include "hodg/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace hodg;
using doctest::Approx;
using testutil::TempDir;

namespace {

struct Labeled {
    Matrix features;
    std::vector<std::string> labels;
};

Labeled three_blobs(std::uint64_t seed, std::size_t per_class) {
    Rng rng(seed);
    Labeled out;
    out.features = Matrix(0, 2);
    const double centers[3][2] = {{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}};
    const char* names[3] = {"swipe", "push", "wave"};
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < per_class; ++i) {
            const double row[2] = {centers[c][0] + gaussian(rng, 0.0, 0.5),
                                   centers[c][1] + gaussian(rng, 0.0, 0.5)};
            out.features.append_row(row);
            out.labels.push_back(names[c]);
        }
    return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("perfect ranking gives AP 1") {
    const std::vector<double> scores = {0.9, 0.8, 0.7, 0.2, 0.1};
    const std::vector<bool> pos = {true, true, true, false, false};
    CHECK(average_precision(scores, pos) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("alternating ranking closed form") {
    // positives land at ranks 2 and 4: AP = (1/2 + 2/4) / 2 = 0.5
    const std::vector<double> scores = {0.9, 0.8, 0.7, 0.6};
    const std::vector<bool> pos = {false, true, false, true};
    CHECK(average_precision(scores, pos) == Approx(0.5).epsilon(1e-12));

    // single positive at the bottom of 4: AP = 1/4
    const std::vector<bool> last = {false, false, false, true};
    CHECK(average_precision(scores, last) == Approx(0.25).epsilon(1e-12));
}

TEST_CASE("average_precision matches the quadratic oracle") {
    Rng rng(404);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 50 + uniform_index(rng, 250);
        std::vector<double> scores(n);
        std::vector<bool> pos(n);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            // one-decimal quantization forces plenty of exact ties
            scores[i] = std::round(uniform_double(rng) * 10.0) / 10.0;
            pos[i] = uniform_double(rng) < 0.3;
            any = any || pos[i];
        }
        if (!any) pos[0] = true;
        CHECK(average_precision(scores, pos) ==
              Approx(oracle::average_precision_direct(scores, pos)).epsilon(1e-12));
    }
}

TEST_CASE("score ties break by original index") {
    const std::vector<double> flat = {0.5, 0.5};
    CHECK(average_precision(flat, {true, false}) == Approx(1.0).epsilon(1e-12));
    CHECK(average_precision(flat, {false, true}) == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("AP is invariant under order-preserving score transforms") {
    Rng rng(8);
    std::vector<double> scores(80);
    std::vector<bool> pos(80);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i] = std::round(uniform_double(rng) * 20.0) / 20.0;
        pos[i] = uniform_double(rng) < 0.4;
    }
    pos[3] = true;
    const double base = average_precision(scores, pos);

    std::vector<double> affine(scores);
    for (double& s : affine) s = 2.0 * s + 5.0;
    CHECK(average_precision(affine, pos) == base);
}

TEST_CASE("average_precision input validation") {
    CHECK_THROWS_AS(average_precision({0.5, 0.2}, {true}), DataError);
    CHECK_THROWS_AS(average_precision({0.5, 0.2}, {false, false}), DataError);
}

TEST_CASE("random scores track prevalence") {
    Rng rng(2024);
    const std::size_t n = 400;
    std::vector<double> scores(n);
    std::vector<bool> pos(n, false);
    for (auto& s : scores) s = uniform_double(rng);
    // exactly 30% positives, positions shuffled
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    shuffle(idx, rng);
    for (std::size_t i = 0; i < n * 3 / 10; ++i) pos[idx[i]] = true;
    CHECK(average_precision(scores, pos) == Approx(0.3).epsilon(0.12).scale(1.0));
}

TEST_CASE("evaluate on a separable problem") {
    const Labeled train = three_blobs(1, 25);
    const Labeled test = three_blobs(2, 10);
    const SvmModel model = train_svm(train.features, train.labels, 100.0, 5, 100);

    const EvalReport report = evaluate(model, test.features, test.labels);
    REQUIRE(report.classes.size() == 3);
    CHECK(report.classes == model.classes);
    for (const double ap : report.per_class_ap) CHECK(ap == Approx(1.0).epsilon(1e-12));
    CHECK(report.map == Approx(1.0).epsilon(1e-12));
    CHECK(report.warnings.empty());
    CHECK(report.scores.rows == test.features.rows);
    CHECK(report.scores.cols == 3);

    SUBCASE("mAP is the mean of the per-class APs") {
        double mean = 0.0;
        for (const double ap : report.per_class_ap) mean += ap;
        mean /= report.per_class_ap.size();
        CHECK(report.map == Approx(mean).epsilon(1e-12));
    }
    SUBCASE("report table formatting") {
        const std::string table = format_report_table(report);
        CHECK(table.find("swipe") != std::string::npos);
        CHECK(table.find("wave") != std::string::npos);
        CHECK(table.find("1.0000") != std::string::npos);
        CHECK(table.find("mAP") != std::string::npos);
    }
    SUBCASE("save/load round trip") {
        TempDir tmp("eval");
        const auto path = tmp.path / "report.json";
        save_report(path, report);
        const EvalReport back = load_report(path);
        CHECK(back.classes == report.classes);
        CHECK(back.per_class_ap == report.per_class_ap);
        CHECK(back.map == report.map);
        CHECK(back.warnings == report.warnings);

        std::ofstream(path) << "{\"format\": \"other\"}";
        CHECK_THROWS_AS(load_report(path), DataError);
    }
}

TEST_CASE("model classes absent from the test set are skipped with a warning") {
    const Labeled train = three_blobs(3, 25);
    const SvmModel model = train_svm(train.features, train.labels, 100.0, 5, 100);

    Labeled test = three_blobs(4, 8);
    // drop every "wave" row (the last 8)
    test.features.rows -= 8;
    test.features.data.resize(test.features.rows * test.features.cols);
    test.labels.resize(test.features.rows);

    const EvalReport report = evaluate(model, test.features, test.labels);
    REQUIRE(report.classes.size() == 2);
    CHECK(std::find(report.classes.begin(), report.classes.end(), "wave") == report.classes.end());
    REQUIRE(report.warnings.size() == 1);
    CHECK(report.warnings[0].find("wave") != std::string::npos);
    CHECK(report.warnings[0].find("absent from test labels") != std::string::npos);
    CHECK(report.map == Approx((report.per_class_ap[0] + report.per_class_ap[1]) / 2).epsilon(1e-12));

    SUBCASE("the warning lands in the formatted table") {
        const std::string table = format_report_table(report);
        CHECK(table.find("absent") != std::string::npos);
    }
    SUBCASE("every class absent is an error") {
        Labeled alien = test;
        for (auto& l : alien.labels) l = "unknown";
        CHECK_THROWS_AS(evaluate(model, alien.features, alien.labels), DataError);
    }
}

TEST_CASE("evaluate input validation") {
    const Labeled train = three_blobs(6, 20);
    const SvmModel model = train_svm(train.features, train.labels, 100.0, 5, 50);
    CHECK_THROWS_AS(evaluate(model, Matrix(0, 2), {}), DataError);
    CHECK_THROWS_AS(evaluate(model, Matrix(3, 2), {"a", "b"}), DataError);
}

}  // TEST_SUITE("metrics")
