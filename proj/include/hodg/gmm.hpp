#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hodg/matrix.hpp"

namespace hodg {

// Diagonal-covariance Gaussian mixture codebook for Fisher encoding.
struct GmmCodebook {
    int k = 0;
    int d = 0;
    std::vector<double> weights;    // k, sums to 1, all > 0
    std::vector<double> means;      // k*d row-major
    std::vector<double> variances;  // k*d, all >= variance_floor
    std::uint64_t seed = 0;
    double variance_floor = 0.0;
    std::string channel;

    double mean(int comp, int dim) const { return means[static_cast<std::size_t>(comp) * d + dim]; }
    double variance(int comp, int dim) const {
        return variances[static_cast<std::size_t>(comp) * d + dim];
    }
};

// k-means++ initialization (seeded) followed by diagonal EM. Stops after
// max_iter iterations or once the relative log-likelihood improvement drops
// below 1e-5. Variances are clamped to the floor; a floor <= 0 resolves to
// 1e-4 of the mean per-dimension sample variance. Requires N >= 10*K and
// rejects all-identical sample sets. When ll_history is given it receives the
// log-likelihood of the parameters entering each EM iteration, which is
// non-decreasing up to 1e-9 relative slack.
GmmCodebook train_gmm(const Matrix& samples, int k, std::uint64_t seed, int max_iter,
                      double variance_floor, std::vector<double>* ll_history = nullptr);

// Soft assignments gamma_k(x), computed in log-space with max-subtraction.
std::vector<double> posteriors(const GmmCodebook& cb, std::span<const double> x);

// Total log-likelihood of a sample set under the mixture.
double log_likelihood(const GmmCodebook& cb, const Matrix& samples);

void save_codebook(const std::filesystem::path& path, const GmmCodebook& cb);
GmmCodebook load_codebook(const std::filesystem::path& path);

}  // namespace hodg
