#include <doctest.h>

#include <cmath>
#include <fstream>

#include "hodg/errors.hpp"
#include "hodg/fisher.hpp"
#include "hodg/pca.hpp"
#include "hodg/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace hodg;
using doctest::Approx;
using testutil::TempDir;

namespace {

double gauss(Rng& rng, double mean, double sigma) {
    const double u1 = 1.0 - uniform_double(rng);
    const double u2 = uniform_double(rng);
    return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Matrix blob_matrix(std::uint64_t seed, std::size_t n, int d, double center, double sigma) {
    Rng rng(seed);
    Matrix m(n, d);
    for (auto& v : m.data) v = gauss(rng, center, sigma);
    return m;
}

double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

TEST_SUITE("fisher") {

TEST_CASE("samples exactly at the mean encode to zero") {
    GmmCodebook cb;
    cb.k = 1;
    cb.d = 3;
    cb.weights = {1.0};
    cb.means = {1.5, -2.0, 0.25};
    cb.variances = {1.0, 4.0, 0.5};

    Matrix samples(5, 3);
    for (std::size_t i = 0; i < 5; ++i)
        for (int j = 0; j < 3; ++j) samples.at(i, j) = cb.means[j];

    const auto raw = fisher_encode_raw(cb, samples);
    for (const double v : raw) CHECK(v == 0.0);
    // the all-zero vector passes through normalization unchanged
    const auto fv = fisher_encode(cb, samples);
    for (const double v : fv) CHECK(v == 0.0);
}

TEST_CASE("K=1 closed form") {
    GmmCodebook cb;
    cb.k = 1;
    cb.d = 2;
    cb.weights = {1.0};
    cb.means = {0.5, -1.0};
    cb.variances = {2.0, 0.25};

    const Matrix samples = blob_matrix(9, 40, 2, 0.0, 1.0);
    const auto raw = fisher_encode_raw(cb, samples);
    REQUIRE(raw.size() == 2);
    for (int j = 0; j < 2; ++j) {
        double want = 0.0;
        for (std::size_t i = 0; i < samples.rows; ++i)
            want += (samples.at(i, j) - cb.means[j]) / std::sqrt(cb.variances[j]);
        want /= samples.rows;  // sqrt(w)=1
        CHECK(raw[j] == Approx(want).epsilon(1e-12));
    }

    // fisher_encode = signed sqrt then global l2 of the raw vector
    const auto fv = fisher_encode(cb, samples);
    std::vector<double> manual(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        manual[i] = raw[i] >= 0 ? std::sqrt(raw[i]) : -std::sqrt(-raw[i]);
    const double norm = l2_norm(manual);
    for (auto& v : manual) v /= norm;
    for (std::size_t i = 0; i < fv.size(); ++i) CHECK(fv[i] == Approx(manual[i]).epsilon(1e-12));
}

TEST_CASE("raw encoding matches the finite-difference oracle") {
    // mixture fitted on two blobs, encoded set drawn separately
    Matrix train(0, 2);
    {
        const Matrix a = blob_matrix(3, 150, 2, 0.0, 0.7);
        const Matrix b = blob_matrix(4, 150, 2, 6.0, 0.7);
        for (std::size_t i = 0; i < a.rows; ++i) train.append_row(a.row_span(i));
        for (std::size_t i = 0; i < b.rows; ++i) train.append_row(b.row_span(i));
    }
    const GmmCodebook cb = train_gmm(train, 3, 5, 60, 0.0);

    Matrix probe(0, 2);
    const Matrix p1 = blob_matrix(11, 25, 2, 1.0, 1.0);
    const Matrix p2 = blob_matrix(12, 25, 2, 5.0, 1.0);
    for (std::size_t i = 0; i < p1.rows; ++i) probe.append_row(p1.row_span(i));
    for (std::size_t i = 0; i < p2.rows; ++i) probe.append_row(p2.row_span(i));

    const auto raw = fisher_encode_raw(cb, probe);
    const auto fd = oracle::fisher_fd(cb, probe, 1e-5);
    REQUIRE(raw.size() == fd.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        CHECK(raw[i] == Approx(fd[i]).epsilon(1e-4).scale(1e-3));
}

TEST_CASE("encoded vectors have unit norm") {
    const Matrix train = blob_matrix(21, 400, 3, 0.0, 2.0);
    const GmmCodebook cb = train_gmm(train, 4, 2, 50, 0.0);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix set = blob_matrix(100 + trial, 30, 3, double(trial), 1.5);
        CHECK(l2_norm(fisher_encode(cb, set)) == Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("encoding is invariant to sample order and duplication") {
    const Matrix train = blob_matrix(31, 300, 2, 0.0, 2.0);
    const GmmCodebook cb = train_gmm(train, 3, 8, 50, 0.0);
    const Matrix set = blob_matrix(77, 40, 2, 1.0, 1.0);
    const auto base = fisher_encode(cb, set);

    SUBCASE("permutation") {
        Matrix shuffled = set;
        std::vector<std::size_t> idx(set.rows);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        Rng rng(5);
        shuffle(idx, rng);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < set.cols; ++j) shuffled.at(i, j) = set.at(idx[i], j);
        const auto fv = fisher_encode(cb, shuffled);
        for (std::size_t i = 0; i < fv.size(); ++i) CHECK(fv[i] == Approx(base[i]).epsilon(1e-9).scale(1e-9));
    }
    SUBCASE("duplication") {
        Matrix doubled(0, 2);
        doubled.cols = 2;
        for (std::size_t i = 0; i < set.rows; ++i) {
            doubled.append_row(set.row_span(i));
            doubled.append_row(set.row_span(i));
        }
        const auto fv = fisher_encode(cb, doubled);
        for (std::size_t i = 0; i < fv.size(); ++i) CHECK(fv[i] == Approx(base[i]).epsilon(1e-9).scale(1e-9));
    }
}

TEST_CASE("encoding input validation") {
    const Matrix train = blob_matrix(41, 100, 2, 0.0, 1.0);
    const GmmCodebook cb = train_gmm(train, 2, 1, 30, 0.0);
    CHECK_THROWS_AS(fisher_encode(cb, Matrix(0, 2)), NumericError);
    CHECK_THROWS_AS(fisher_encode(cb, Matrix(5, 3)), DataError);
}

TEST_CASE("concat_channels uses the canonical channel order") {
    const std::vector<double> hog = {1, 2};
    const std::vector<double> hodg = {7, 8, 9};
    const std::vector<double> hof = {3};

    SUBCASE("input order does not matter") {
        const auto joined = concat_channels({"hodg", "hog", "hof"}, {hodg, hog, hof});
        CHECK(joined == std::vector<double>{1, 2, 3, 7, 8, 9});
        const auto joined2 = concat_channels({"hog", "hof", "hodg"}, {hog, hof, hodg});
        CHECK(joined2 == joined);
    }
    SUBCASE("single channel is the identity") {
        CHECK(concat_channels({"hodg"}, {hodg}) == hodg);
    }
    SUBCASE("duplicate and unknown names rejected") {
        CHECK_THROWS_AS(concat_channels({"hog", "hog"}, {hog, hog}), ConfigError);
        CHECK_THROWS_AS(concat_channels({"hog", "sift"}, {hog, hodg}), ConfigError);
        CHECK_THROWS_AS(concat_channels({}, {}), NumericError);
        CHECK_THROWS_AS(concat_channels({"hog"}, {hog, hodg}), ConfigError);
    }
    SUBCASE("combined five-channel K=64 layout is 31488 wide") {
        const int K = 64;
        std::vector<std::vector<double>> fvs = {
            std::vector<double>(K * 96, 0.0),   // hog
            std::vector<double>(K * 108, 0.0),  // hof
            std::vector<double>(K * 96, 0.0),   // mbhx
            std::vector<double>(K * 96, 0.0),   // mbhy
            std::vector<double>(K * 96, 0.0),   // hodg
        };
        const auto joined =
            concat_channels({"hog", "hof", "mbhx", "mbhy", "hodg"}, fvs);
        CHECK(joined.size() == 31488);
    }
}

TEST_CASE("fv dump round trip") {
    Rng rng(55);
    EncodedSet set;
    set.features = Matrix(7, 10);
    for (auto& v : set.features.data) v = uniform_double(rng) * 2.0 - 1.0;
    const char* cycle[3] = {"wave", "push", "pull"};
    for (int i = 0; i < 7; ++i) set.labels.push_back(cycle[i % 3]);

    TempDir tmp("fvec");
    const auto path = tmp.path / "train.fvec";
    write_fv_dump(path, set);
    CHECK(std::filesystem::exists(tmp.path / "train.fvec.labels.json"));

    const EncodedSet back = read_fv_dump(path);
    CHECK(back.labels == set.labels);
    REQUIRE(back.features.rows == 7);
    REQUIRE(back.features.cols == 10);
    for (std::size_t i = 0; i < set.features.data.size(); ++i)
        CHECK(back.features.data[i] == double(float(set.features.data[i])));

    SUBCASE("label sidecar is required") {
        std::filesystem::remove(tmp.path / "train.fvec.labels.json");
        CHECK_THROWS_AS(read_fv_dump(path), DataError);
    }
    SUBCASE("bad magic") {
        std::string bytes = testutil::slurp(path);
        bytes[0] = 'Z';
        std::ofstream(path, std::ios::binary | std::ios::trunc).write(bytes.data(), bytes.size());
        CHECK_THROWS_AS(read_fv_dump(path), DataError);
    }
    SUBCASE("out-of-range label id") {
        std::string bytes = testutil::slurp(path);
        // first row's u16 label id sits right after magic + two u32 fields
        bytes[13] = '\xff';
        bytes[14] = '\xff';
        std::ofstream(path, std::ios::binary | std::ios::trunc).write(bytes.data(), bytes.size());
        CHECK_THROWS_AS(read_fv_dump(path), DataError);
    }
    SUBCASE("trailing bytes") {
        std::ofstream(path, std::ios::binary | std::ios::app).write("????", 4);
        CHECK_THROWS_AS(read_fv_dump(path), DataError);
    }
    SUBCASE("label count mismatch rejected at write time") {
        EncodedSet bad = set;
        bad.labels.pop_back();
        CHECK_THROWS_AS(write_fv_dump(tmp.path / "bad.fvec", bad), DataError);
    }
}

TEST_CASE("pca recovers a dominant axis") {
    // points spread along (0.6, 0.8) with weak orthogonal noise
    Rng rng(13);
    Matrix samples(500, 2);
    for (std::size_t i = 0; i < samples.rows; ++i) {
        const double t = gauss(rng, 0.0, 3.0);
        const double o = gauss(rng, 0.0, 0.05);
        samples.at(i, 0) = 0.6 * t - 0.8 * o + 1.0;
        samples.at(i, 1) = 0.8 * t + 0.6 * o - 2.0;
    }
    const PcaModel model = fit_pca(samples, 2);
    REQUIRE(model.out_dim == 2);
    REQUIRE(model.in_dim == 2);
    CHECK(model.mean[0] == Approx(1.0).epsilon(0.2));
    CHECK(model.mean[1] == Approx(-2.0).epsilon(0.2));

    const double dot = model.components[0] * 0.6 + model.components[1] * 0.8;
    CHECK(std::abs(dot) == Approx(1.0).epsilon(1e-3));
    // sign convention: the largest-magnitude entry of each component is positive
    CHECK(model.components[1] > 0.0);
    CHECK(model.eigenvalues[0] >= model.eigenvalues[1]);

    SUBCASE("components are orthonormal") {
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double d = 0.0;
                for (int j = 0; j < 2; ++j)
                    d += model.components[a * 2 + j] * model.components[b * 2 + j];
                CHECK(d == Approx(a == b ? 1.0 : 0.0).epsilon(1e-9).scale(1.0));
            }
    }
    SUBCASE("projected variance equals the eigenvalue") {
        const Matrix proj = pca_project(model, samples);
        REQUIRE(proj.rows == samples.rows);
        REQUIRE(proj.cols == 2);
        for (int j = 0; j < 2; ++j) {
            double mean = 0.0;
            for (std::size_t i = 0; i < proj.rows; ++i) mean += proj.at(i, j);
            mean /= proj.rows;
            double var = 0.0;
            for (std::size_t i = 0; i < proj.rows; ++i) {
                const double diff = proj.at(i, j) - mean;
                var += diff * diff;
            }
            var /= (proj.rows - 1);
            CHECK(var == Approx(model.eigenvalues[j]).epsilon(1e-6));
        }
    }
    SUBCASE("deterministic") {
        const PcaModel again = fit_pca(samples, 2);
        CHECK(again.components == model.components);
        CHECK(again.eigenvalues == model.eigenvalues);
        CHECK(again.mean == model.mean);
    }
    SUBCASE("save/load round trip") {
        TempDir tmp("pca");
        const auto path = tmp.path / "pca.json";
        save_pca(path, model);
        const PcaModel back = load_pca(path);
        CHECK(back.in_dim == model.in_dim);
        CHECK(back.out_dim == model.out_dim);
        CHECK(back.mean == model.mean);
        CHECK(back.components == model.components);
        CHECK(back.eigenvalues == model.eigenvalues);

        std::ofstream(path) << "{\"format\": \"nope\"}";
        CHECK_THROWS_AS(load_pca(path), DataError);
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(fit_pca(Matrix(1, 2), 1), NumericError);
        CHECK_THROWS_AS(fit_pca(samples, 0), NumericError);
        CHECK_THROWS_AS(fit_pca(samples, 3), NumericError);
        CHECK_THROWS_AS(pca_project(model, Matrix(4, 5)), DataError);
    }
}

}  // TEST_SUITE("fisher")
