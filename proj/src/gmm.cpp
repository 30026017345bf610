#include "hodg/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "hodg/errors.hpp"
#include "hodg/rng.hpp"

namespace hodg {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kRelLlTolerance = 1e-5;

double squared_distance(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
        const double diff = a[j] - b[j];
        s += diff * diff;
    }
    return s;
}

// Seeded k-means++ seeding; returns k row indices into `samples`.
std::vector<std::size_t> kmeanspp_centers(const Matrix& samples, int k, Rng& rng) {
    const std::size_t n = samples.rows;
    std::vector<std::size_t> centers;
    centers.reserve(k);
    centers.push_back(uniform_index(rng, n));

    std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
    for (int c = 1; c < k; ++c) {
        const double* last = samples.row(centers.back());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dist2[i] = std::min(dist2[i], squared_distance(samples.row(i), last, static_cast<int>(samples.cols)));
            total += dist2[i];
        }
        if (total <= 0.0) {
            // Fewer distinct points than components; fall back to uniform picks.
            centers.push_back(uniform_index(rng, n));
            continue;
        }
        const double r = uniform_double(rng) * total;
        double acc = 0.0;
        std::size_t chosen = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            acc += dist2[i];
            if (acc >= r) {
                chosen = i;
                break;
            }
        }
        centers.push_back(chosen);
    }
    return centers;
}

}  // namespace

GmmCodebook train_gmm(const Matrix& samples, int k, std::uint64_t seed, int max_iter,
                      double variance_floor, std::vector<double>* ll_history) {
    const std::size_t n = samples.rows;
    const int d = static_cast<int>(samples.cols);
    if (k < 1) throw ConfigError("train_gmm: K must be >= 1");
    if (d < 1) throw NumericError("train_gmm: descriptor dimension must be >= 1");
    if (n < static_cast<std::size_t>(10) * k)
        throw NumericError("train_gmm: too few samples (" + std::to_string(n) + "), need at least 10*K = " +
                           std::to_string(10 * k));
    if (max_iter < 1) throw ConfigError("train_gmm: max_iter must be >= 1");
    for (const double v : samples.data)
        if (!std::isfinite(v)) throw NumericError("train_gmm: non-finite sample value");

    bool all_identical = true;
    for (std::size_t i = 1; i < n && all_identical; ++i)
        all_identical = std::equal(samples.row(i), samples.row(i) + d, samples.row(0));
    if (all_identical) throw NumericError("train_gmm: degenerate input, all samples identical");

    // Global per-dimension variance: EM starting point and floor reference.
    std::vector<double> global_mean(d, 0.0), global_var(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = samples.row(i);
        for (int j = 0; j < d; ++j) global_mean[j] += x[j];
    }
    for (int j = 0; j < d; ++j) global_mean[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = samples.row(i);
        for (int j = 0; j < d; ++j) {
            const double diff = x[j] - global_mean[j];
            global_var[j] += diff * diff;
        }
    }
    double mean_var = 0.0;
    for (int j = 0; j < d; ++j) {
        global_var[j] /= static_cast<double>(n);
        mean_var += global_var[j];
    }
    mean_var /= d;

    double floor = variance_floor;
    if (floor <= 0.0) floor = 1e-4 * mean_var;
    if (floor <= 0.0) throw NumericError("train_gmm: degenerate input, zero variance in every dimension");

    GmmCodebook cb;
    cb.k = k;
    cb.d = d;
    cb.seed = seed;
    cb.variance_floor = floor;
    cb.weights.assign(k, 1.0 / k);
    cb.means.resize(static_cast<std::size_t>(k) * d);
    cb.variances.resize(static_cast<std::size_t>(k) * d);

    Rng rng(seed);
    const std::vector<std::size_t> centers = kmeanspp_centers(samples, k, rng);
    for (int c = 0; c < k; ++c) {
        const double* x = samples.row(centers[c]);
        for (int j = 0; j < d; ++j) {
            cb.means[static_cast<std::size_t>(c) * d + j] = x[j];
            cb.variances[static_cast<std::size_t>(c) * d + j] = std::max(global_var[j], floor);
        }
    }

    std::vector<double> log_norm(k);   // -0.5 * sum_d log(2*pi*var)
    std::vector<double> log_p(k);
    std::vector<double> resp_sum(k);
    std::vector<double> mean_acc(static_cast<std::size_t>(k) * d);
    std::vector<double> sq_acc(static_cast<std::size_t>(k) * d);

    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iter; ++iter) {
        for (int c = 0; c < k; ++c) {
            double s = 0.0;
            for (int j = 0; j < d; ++j) s += std::log(kTwoPi * cb.variance(c, j));
            log_norm[c] = std::log(cb.weights[c]) - 0.5 * s;
        }
        std::fill(resp_sum.begin(), resp_sum.end(), 0.0);
        std::fill(mean_acc.begin(), mean_acc.end(), 0.0);
        std::fill(sq_acc.begin(), sq_acc.end(), 0.0);

        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* x = samples.row(i);
            double max_lp = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                double e = 0.0;
                const double* mu = &cb.means[static_cast<std::size_t>(c) * d];
                const double* var = &cb.variances[static_cast<std::size_t>(c) * d];
                for (int j = 0; j < d; ++j) {
                    const double diff = x[j] - mu[j];
                    e += diff * diff / var[j];
                }
                log_p[c] = log_norm[c] - 0.5 * e;
                max_lp = std::max(max_lp, log_p[c]);
            }
            double denom = 0.0;
            for (int c = 0; c < k; ++c) denom += std::exp(log_p[c] - max_lp);
            ll += max_lp + std::log(denom);
            for (int c = 0; c < k; ++c) {
                const double g = std::exp(log_p[c] - max_lp) / denom;
                if (g == 0.0) continue;
                resp_sum[c] += g;
                double* macc = &mean_acc[static_cast<std::size_t>(c) * d];
                double* sacc = &sq_acc[static_cast<std::size_t>(c) * d];
                for (int j = 0; j < d; ++j) {
                    macc[j] += g * x[j];
                    sacc[j] += g * x[j] * x[j];
                }
            }
        }
        if (ll_history) ll_history->push_back(ll);

        const double improvement = (ll - prev_ll) / std::max(1.0, std::abs(prev_ll));
        const bool converged = iter > 0 && improvement < kRelLlTolerance;

        if (!converged) {
            for (int c = 0; c < k; ++c) {
                if (resp_sum[c] <= 1e-10) continue;  // starved component keeps its parameters
                const double inv = 1.0 / resp_sum[c];
                double* mu = &cb.means[static_cast<std::size_t>(c) * d];
                double* var = &cb.variances[static_cast<std::size_t>(c) * d];
                const double* macc = &mean_acc[static_cast<std::size_t>(c) * d];
                const double* sacc = &sq_acc[static_cast<std::size_t>(c) * d];
                for (int j = 0; j < d; ++j) {
                    mu[j] = macc[j] * inv;
                    var[j] = std::max(sacc[j] * inv - mu[j] * mu[j], floor);
                }
                cb.weights[c] = resp_sum[c] / static_cast<double>(n);
            }
            double wsum = 0.0;
            for (int c = 0; c < k; ++c) {
                cb.weights[c] = std::max(cb.weights[c], 1e-12);
                wsum += cb.weights[c];
            }
            for (int c = 0; c < k; ++c) cb.weights[c] /= wsum;
        }

        prev_ll = ll;
        if (converged) break;
    }
    return cb;
}

std::vector<double> posteriors(const GmmCodebook& cb, std::span<const double> x) {
    if (static_cast<int>(x.size()) != cb.d)
        throw DataError("posteriors: dimension mismatch, got " + std::to_string(x.size()) +
                        ", codebook has D=" + std::to_string(cb.d));
    std::vector<double> log_p(cb.k);
    double max_lp = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < cb.k; ++c) {
        double s = 0.0;
        for (int j = 0; j < cb.d; ++j) {
            const double var = cb.variance(c, j);
            const double diff = x[j] - cb.mean(c, j);
            s += std::log(kTwoPi * var) + diff * diff / var;
        }
        log_p[c] = std::log(cb.weights[c]) - 0.5 * s;
        max_lp = std::max(max_lp, log_p[c]);
    }
    double denom = 0.0;
    for (int c = 0; c < cb.k; ++c) denom += std::exp(log_p[c] - max_lp);
    std::vector<double> gamma(cb.k);
    for (int c = 0; c < cb.k; ++c) gamma[c] = std::exp(log_p[c] - max_lp) / denom;
    return gamma;
}

double log_likelihood(const GmmCodebook& cb, const Matrix& samples) {
    if (static_cast<int>(samples.cols) != cb.d)
        throw DataError("log_likelihood: dimension mismatch");
    double ll = 0.0;
    std::vector<double> log_p(cb.k);
    for (std::size_t i = 0; i < samples.rows; ++i) {
        const double* x = samples.row(i);
        double max_lp = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < cb.k; ++c) {
            double s = 0.0;
            for (int j = 0; j < cb.d; ++j) {
                const double var = cb.variance(c, j);
                const double diff = x[j] - cb.mean(c, j);
                s += std::log(kTwoPi * var) + diff * diff / var;
            }
            log_p[c] = std::log(cb.weights[c]) - 0.5 * s;
            max_lp = std::max(max_lp, log_p[c]);
        }
        double denom = 0.0;
        for (int c = 0; c < cb.k; ++c) denom += std::exp(log_p[c] - max_lp);
        ll += max_lp + std::log(denom);
    }
    return ll;
}

void save_codebook(const std::filesystem::path& path, const GmmCodebook& cb) {
    nlohmann::ordered_json doc;
    doc["format"] = "hodg-gmm";
    doc["version"] = 1;
    doc["channel"] = cb.channel;
    doc["K"] = cb.k;
    doc["D"] = cb.d;
    doc["seed"] = cb.seed;
    doc["variance_floor"] = cb.variance_floor;
    doc["weights"] = cb.weights;
    doc["means"] = cb.means;
    doc["variances"] = cb.variances;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw DataError(path.string() + ": write failed");
}

GmmCodebook load_codebook(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open file");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
    if (doc.value("format", "") != "hodg-gmm")
        throw DataError(path.string() + ": not a codebook file (format field mismatch)");
    if (doc.value("version", 0) != 1)
        throw DataError(path.string() + ": unsupported codebook version " +
                        std::to_string(doc.value("version", 0)) + ", expected 1");

    GmmCodebook cb;
    cb.channel = doc.value("channel", "");
    cb.k = doc.at("K").get<int>();
    cb.d = doc.at("D").get<int>();
    cb.seed = doc.at("seed").get<std::uint64_t>();
    cb.variance_floor = doc.at("variance_floor").get<double>();
    cb.weights = doc.at("weights").get<std::vector<double>>();
    cb.means = doc.at("means").get<std::vector<double>>();
    cb.variances = doc.at("variances").get<std::vector<double>>();
    if (cb.weights.size() != static_cast<std::size_t>(cb.k) ||
        cb.means.size() != static_cast<std::size_t>(cb.k) * cb.d ||
        cb.variances.size() != static_cast<std::size_t>(cb.k) * cb.d)
        throw DataError(path.string() + ": codebook array sizes do not match K and D");
    return cb;
}

}  // namespace hodg
