#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hodg/matrix.hpp"

namespace hodg {

// Linear one-vs-rest SVM over video-level Fisher vectors.
struct SvmModel {
    std::vector<std::string> classes;      // sorted unique labels
    std::vector<std::vector<double>> weights;  // per class, length dim
    std::vector<double> biases;            // per class
    double c = 100.0;
    std::uint64_t seed = 0;

    std::size_t dim() const { return weights.empty() ? 0 : weights[0].size(); }
};

// Trains one hinge-loss linear SVM per class (members positive, the rest
// negative), objective (1/2)||w||^2 + C * sum hinge, by dual coordinate
// descent with a seeded sample permutation per epoch. The bias is an
// augmented constant-1 feature, so it is regularized like any weight.
// Stops per class at `epochs` or when the relative duality gap drops below
// `gap_tolerance`. Per-class RNG streams are derived from `seed` so class
// order cannot perturb each other's draws.
// Throws NumericError on non-finite features, DataError when N < 2 or
// fewer than 2 distinct labels appear.
SvmModel train_svm(const Matrix& features, const std::vector<std::string>& labels, double c,
                   std::uint64_t seed, int epochs, double gap_tolerance = 1e-4);

// score_c = weights_c . x + bias_c, in model.classes order.
std::vector<double> predict_scores(const SvmModel& model, std::span<const double> x);

// Index into model.classes of the highest score (lowest index wins ties).
std::size_t predict_class(const SvmModel& model, std::span<const double> x);

void save_svm(const std::filesystem::path& path, const SvmModel& model);
SvmModel load_svm(const std::filesystem::path& path);

}  // namespace hodg
