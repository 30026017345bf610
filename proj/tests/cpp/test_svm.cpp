#include <doctest.h>

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "hodg/errors.hpp"
#include "hodg/rng.hpp"
#include "hodg/svm.hpp"
#include "helpers.hpp"

using namespace hodg;
using doctest::Approx;
using testutil::TempDir;

namespace {

struct Labeled {
    Matrix features;
    std::vector<std::string> labels;
};

// Three tight blobs, trivially separable.
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

// Antisymmetric two-class set: every positive row is mirrored by its
// negation, which pins the optimal bias at zero.
Labeled mirrored_pair(std::uint64_t seed, std::size_t n, double scale = 1.0) {
    Rng rng(seed);
    Labeled out;
    out.features = Matrix(0, 3);
    for (std::size_t i = 0; i < n; ++i) {
        double row[3];
        for (double& v : row) v = (gaussian(rng, 0.0, 1.0) + 2.0) * scale;
        out.features.append_row(row);
        out.labels.push_back("pos");
        for (double& v : row) v = -v;
        out.features.append_row(row);
        out.labels.push_back("neg");
    }
    return out;
}

}  // namespace

TEST_SUITE("svm") {

TEST_CASE("separable classes are fit to zero training error") {
    const Labeled data = three_blobs(3, 30);
    const SvmModel model = train_svm(data.features, data.labels, 100.0, 7, 200);

    CHECK(model.classes == std::vector<std::string>{"push", "swipe", "wave"});
    CHECK(model.c == 100.0);
    CHECK(model.seed == 7);
    REQUIRE(model.weights.size() == 3);
    REQUIRE(model.biases.size() == 3);
    CHECK(model.dim() == 2);

    for (std::size_t i = 0; i < data.features.rows; ++i) {
        const std::size_t pred = predict_class(model, data.features.row_span(i));
        CHECK(model.classes[pred] == data.labels[i]);
    }
}

TEST_CASE("training is deterministic in the seed") {
    const Labeled data = three_blobs(9, 20);
    const SvmModel a = train_svm(data.features, data.labels, 100.0, 42, 80);
    const SvmModel b = train_svm(data.features, data.labels, 100.0, 42, 80);
    CHECK(a.weights == b.weights);
    CHECK(a.biases == b.biases);
    const SvmModel c = train_svm(data.features, data.labels, 100.0, 43, 80);
    CHECK(c.weights != a.weights);
}

TEST_CASE("predict_scores is a plain affine map") {
    SvmModel model;
    model.classes = {"a", "b", "c"};
    model.weights = {{1.0, -2.0, 0.5}, {0.0, 0.0, 0.0}, {3.0, 3.0, 3.0}};
    model.biases = {0.25, -1.0, 0.0};

    const double x[3] = {2.0, 1.0, -4.0};
    const auto scores = predict_scores(model, std::span<const double>(x, 3));
    REQUIRE(scores.size() == 3);
    CHECK(scores[0] == Approx(2.0 - 2.0 - 2.0 + 0.25).epsilon(1e-12));
    CHECK(scores[1] == Approx(-1.0).epsilon(1e-12));  // zero weights: bias only
    CHECK(scores[2] == Approx(-3.0).epsilon(1e-12));

    SUBCASE("zero input scores the biases") {
        const double zero[3] = {0.0, 0.0, 0.0};
        const auto s = predict_scores(model, std::span<const double>(zero, 3));
        CHECK(s[0] == 0.25);
        CHECK(s[1] == -1.0);
        CHECK(s[2] == 0.0);
        CHECK(predict_class(model, std::span<const double>(zero, 3)) == 0);
    }
    SUBCASE("argmax ties resolve to the lowest index") {
        SvmModel tie;
        tie.classes = {"first", "second"};
        tie.weights = {{1.0}, {1.0}};
        tie.biases = {0.5, 0.5};
        const double one[1] = {3.0};
        CHECK(predict_class(tie, std::span<const double>(one, 1)) == 0);
    }
    SUBCASE("dimension mismatch") {
        const double wide[4] = {0, 0, 0, 0};
        CHECK_THROWS_AS(predict_scores(model, std::span<const double>(wide, 4)), DataError);
    }
}

TEST_CASE("feature scaling by s with C/s^2 leaves decision values unchanged") {
    // holds exactly only when the optimal bias is zero, hence mirrored data
    const double s = 4.0;
    const Labeled base = mirrored_pair(5, 24);
    const Labeled wide = mirrored_pair(5, 24, s);
    const double c = 4.0;

    const SvmModel m1 = train_svm(base.features, base.labels, c, 11, 4000, 1e-10);
    const SvmModel m2 = train_svm(wide.features, wide.labels, c / (s * s), 11, 4000, 1e-10);

    CHECK(std::abs(m1.biases[0]) < 1e-6);
    CHECK(std::abs(m2.biases[0]) < 1e-6);

    Rng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        double p[3];
        for (double& v : p) v = gaussian(rng, 0.0, 2.0);
        double ps[3];
        for (int j = 0; j < 3; ++j) ps[j] = p[j] * s;
        const auto a = predict_scores(m1, std::span<const double>(p, 3));
        const auto b = predict_scores(m2, std::span<const double>(ps, 3));
        for (std::size_t k = 0; k < a.size(); ++k)
            CHECK(a[k] == Approx(b[k]).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("duplicating every sample while halving C keeps the optimum") {
    const Labeled base = mirrored_pair(8, 20);
    Labeled doubled;
    doubled.features = Matrix(0, 3);
    for (std::size_t i = 0; i < base.features.rows; ++i) {
        doubled.features.append_row(base.features.row_span(i));
        doubled.features.append_row(base.features.row_span(i));
        doubled.labels.push_back(base.labels[i]);
        doubled.labels.push_back(base.labels[i]);
    }
    const SvmModel m1 = train_svm(base.features, base.labels, 8.0, 3, 4000, 1e-10);
    const SvmModel m2 = train_svm(doubled.features, doubled.labels, 4.0, 3, 4000, 1e-10);

    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        double p[3];
        for (double& v : p) v = gaussian(rng, 0.0, 2.0);
        const auto a = predict_scores(m1, std::span<const double>(p, 3));
        const auto b = predict_scores(m2, std::span<const double>(p, 3));
        for (std::size_t k = 0; k < a.size(); ++k)
            CHECK(a[k] == Approx(b[k]).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("training input validation") {
    const Labeled data = three_blobs(2, 10);

    std::vector<std::string> short_labels(data.labels.begin(), data.labels.end() - 1);
    CHECK_THROWS_AS(train_svm(data.features, short_labels, 100.0, 1, 10), DataError);

    CHECK_THROWS_AS(train_svm(Matrix(1, 2), {"a"}, 100.0, 1, 10), DataError);
    CHECK_THROWS_AS(train_svm(data.features, data.labels, 0.0, 1, 10), ConfigError);
    CHECK_THROWS_AS(train_svm(data.features, data.labels, -5.0, 1, 10), ConfigError);
    CHECK_THROWS_AS(train_svm(data.features, data.labels, 100.0, 1, 0), ConfigError);

    Matrix poisoned = data.features;
    poisoned.at(3, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(train_svm(poisoned, data.labels, 100.0, 1, 10), NumericError);

    std::vector<std::string> mono(data.labels.size(), "same");
    CHECK_THROWS_AS(train_svm(data.features, mono, 100.0, 1, 10), DataError);
}

TEST_CASE("model save/load round trip") {
    const Labeled data = three_blobs(6, 15);
    const SvmModel model = train_svm(data.features, data.labels, 100.0, 21, 60);

    TempDir tmp("svm");
    const auto path = tmp.path / "model.json";
    save_svm(path, model);
    const SvmModel back = load_svm(path);
    CHECK(back.classes == model.classes);
    CHECK(back.weights == model.weights);
    CHECK(back.biases == model.biases);
    CHECK(back.c == model.c);
    CHECK(back.seed == model.seed);

    SUBCASE("format check") {
        auto doc = nlohmann::json::parse(testutil::slurp(path));
        doc["format"] = "who-knows";
        std::ofstream(path) << doc.dump(2);
        CHECK_THROWS_AS(load_svm(path), DataError);
    }
    SUBCASE("version check") {
        auto doc = nlohmann::json::parse(testutil::slurp(path));
        doc["version"] = 12;
        std::ofstream(path) << doc.dump(2);
        CHECK_THROWS_AS(load_svm(path), DataError);
    }
    SUBCASE("array consistency check") {
        auto doc = nlohmann::json::parse(testutil::slurp(path));
        doc["biases"].erase(0);
        std::ofstream(path) << doc.dump(2);
        CHECK_THROWS_AS(load_svm(path), DataError);
    }
    SUBCASE("ragged weights rejected") {
        auto doc = nlohmann::json::parse(testutil::slurp(path));
        doc["weights"][1].erase(0);
        std::ofstream(path) << doc.dump(2);
        CHECK_THROWS_AS(load_svm(path), DataError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_svm(tmp.path / "absent.json"), DataError);
    }
}

}  // TEST_SUITE("svm")
