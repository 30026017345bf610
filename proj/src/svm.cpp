#include "hodg/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "hodg/errors.hpp"
#include "hodg/rng.hpp"

namespace hodg {

namespace {

// Dual coordinate descent for the L1-loss linear SVM (Hsieh et al. style):
//   min_w (1/2)||w||^2 + C * sum_i max(0, 1 - y_i w.x_i)
// over features already augmented with the constant bias column. Returns the
// augmented weight vector (last entry is the bias).
std::vector<double> train_binary(const Matrix& x, const std::vector<int>& y, double c,
                                 Rng& rng, int epochs, double gap_tolerance) {
    const std::size_t n = x.rows;
    const std::size_t dim = x.cols;

    std::vector<double> qii(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = x.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < dim; ++j) s += xi[j] * xi[j];
        qii[i] = s;
    }

    std::vector<double> alpha(n, 0.0), w(dim, 0.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        shuffle(order, rng);
        for (const std::size_t i : order) {
            if (qii[i] == 0.0) continue;
            const double* xi = x.row(i);
            double wx = 0.0;
            for (std::size_t j = 0; j < dim; ++j) wx += w[j] * xi[j];
            const double g = y[i] * wx - 1.0;

            double pg = g;
            if (alpha[i] <= 0.0)
                pg = std::min(g, 0.0);
            else if (alpha[i] >= c)
                pg = std::max(g, 0.0);
            if (std::abs(pg) < 1e-12) continue;

            const double next = std::clamp(alpha[i] - g / qii[i], 0.0, c);
            const double delta = (next - alpha[i]) * y[i];
            alpha[i] = next;
            for (std::size_t j = 0; j < dim; ++j) w[j] += delta * xi[j];
        }

        double wnorm2 = 0.0;
        for (const double v : w) wnorm2 += v * v;
        double hinge = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* xi = x.row(i);
            double wx = 0.0;
            for (std::size_t j = 0; j < dim; ++j) wx += w[j] * xi[j];
            hinge += std::max(0.0, 1.0 - y[i] * wx);
        }
        const double primal = 0.5 * wnorm2 + c * hinge;
        double asum = 0.0;
        for (const double a : alpha) asum += a;
        const double dual = asum - 0.5 * wnorm2;
        if ((primal - dual) / std::max(1.0, std::abs(primal)) < gap_tolerance) break;
    }
    return w;
}

}  // namespace

SvmModel train_svm(const Matrix& features, const std::vector<std::string>& labels, double c,
                   std::uint64_t seed, int epochs, double gap_tolerance) {
    const std::size_t n = features.rows;
    if (labels.size() != n) throw DataError("train_svm: label count does not match feature rows");
    if (n < 2) throw DataError("train_svm: need at least 2 samples, got " + std::to_string(n));
    if (c <= 0.0) throw ConfigError("train_svm: C must be > 0");
    if (epochs < 1) throw ConfigError("train_svm: epochs must be >= 1");
    for (const double v : features.data)
        if (!std::isfinite(v)) throw NumericError("train_svm: non-finite feature value");

    std::set<std::string> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2)
        throw DataError("train_svm: need at least 2 distinct labels, got " +
                        std::to_string(distinct.size()));

    SvmModel model;
    model.classes.assign(distinct.begin(), distinct.end());
    model.c = c;
    model.seed = seed;

    // Bias as an augmented constant-1 column, regularized with the weights.
    Matrix aug(n, features.cols + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double* src = features.row(i);
        double* dst = aug.row(i);
        std::copy(src, src + features.cols, dst);
        dst[features.cols] = 1.0;
    }

    for (std::size_t cls = 0; cls < model.classes.size(); ++cls) {
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = (labels[i] == model.classes[cls]) ? 1 : -1;
        Rng rng(splitmix64(seed + cls));
        std::vector<double> w = train_binary(aug, y, c, rng, epochs, gap_tolerance);
        model.biases.push_back(w.back());
        w.pop_back();
        model.weights.push_back(std::move(w));
    }
    return model;
}

std::vector<double> predict_scores(const SvmModel& model, std::span<const double> x) {
    if (x.size() != model.dim())
        throw DataError("predict_scores: dimension mismatch, got " + std::to_string(x.size()) +
                        ", model expects " + std::to_string(model.dim()));
    std::vector<double> scores(model.classes.size());
    for (std::size_t cls = 0; cls < model.classes.size(); ++cls) {
        const std::vector<double>& w = model.weights[cls];
        double s = model.biases[cls];
        for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
        scores[cls] = s;
    }
    return scores;
}

std::size_t predict_class(const SvmModel& model, std::span<const double> x) {
    const std::vector<double> scores = predict_scores(model, x);
    return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

void save_svm(const std::filesystem::path& path, const SvmModel& model) {
    nlohmann::ordered_json doc;
    doc["format"] = "hodg-svm";
    doc["version"] = 1;
    doc["classes"] = model.classes;
    doc["C"] = model.c;
    doc["seed"] = model.seed;
    doc["biases"] = model.biases;
    doc["weights"] = model.weights;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw DataError(path.string() + ": write failed");
}

SvmModel load_svm(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open file");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
    if (doc.value("format", "") != "hodg-svm")
        throw DataError(path.string() + ": not a model file (format field mismatch)");
    if (doc.value("version", 0) != 1)
        throw DataError(path.string() + ": unsupported model version");
    SvmModel model;
    model.classes = doc.at("classes").get<std::vector<std::string>>();
    model.c = doc.at("C").get<double>();
    model.seed = doc.at("seed").get<std::uint64_t>();
    model.biases = doc.at("biases").get<std::vector<double>>();
    model.weights = doc.at("weights").get<std::vector<std::vector<double>>>();
    if (model.classes.empty() || model.weights.size() != model.classes.size() ||
        model.biases.size() != model.classes.size())
        throw DataError(path.string() + ": model arrays do not match class count");
    for (const auto& w : model.weights)
        if (w.size() != model.weights[0].size())
            throw DataError(path.string() + ": inconsistent weight vector lengths");
    return model;
}

}  // namespace hodg
