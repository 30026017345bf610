#include "hodg/pca.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "hodg/errors.hpp"

namespace hodg {

namespace {

// Cyclic Jacobi eigensolver for a symmetric matrix (row-major d x d).
// Returns eigenvalues; V receives eigenvectors as columns.
std::vector<double> jacobi_eigen(std::vector<double> a, int d, std::vector<double>& v) {
    v.assign(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) v[static_cast<std::size_t>(i) * d + i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) off += std::abs(a[static_cast<std::size_t>(p) * d + q]);
        if (off < 1e-12) break;

        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                const double apq = a[static_cast<std::size_t>(p) * d + q];
                if (std::abs(apq) < 1e-18) continue;
                const double app = a[static_cast<std::size_t>(p) * d + p];
                const double aqq = a[static_cast<std::size_t>(q) * d + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (int i = 0; i < d; ++i) {
                    const double aip = a[static_cast<std::size_t>(i) * d + p];
                    const double aiq = a[static_cast<std::size_t>(i) * d + q];
                    a[static_cast<std::size_t>(i) * d + p] = c * aip - s * aiq;
                    a[static_cast<std::size_t>(i) * d + q] = s * aip + c * aiq;
                }
                for (int j = 0; j < d; ++j) {
                    const double apj = a[static_cast<std::size_t>(p) * d + j];
                    const double aqj = a[static_cast<std::size_t>(q) * d + j];
                    a[static_cast<std::size_t>(p) * d + j] = c * apj - s * aqj;
                    a[static_cast<std::size_t>(q) * d + j] = s * apj + c * aqj;
                }
                for (int i = 0; i < d; ++i) {
                    const double vip = v[static_cast<std::size_t>(i) * d + p];
                    const double viq = v[static_cast<std::size_t>(i) * d + q];
                    v[static_cast<std::size_t>(i) * d + p] = c * vip - s * viq;
                    v[static_cast<std::size_t>(i) * d + q] = s * vip + c * viq;
                }
            }
        }
    }
    std::vector<double> eig(d);
    for (int i = 0; i < d; ++i) eig[i] = a[static_cast<std::size_t>(i) * d + i];
    return eig;
}

}  // namespace

PcaModel fit_pca(const Matrix& samples, int out_dim) {
    const std::size_t n = samples.rows;
    const int d = static_cast<int>(samples.cols);
    if (n < 2) throw NumericError("fit_pca: need at least 2 samples");
    if (out_dim < 1 || out_dim > d)
        throw NumericError("fit_pca: out_dim " + std::to_string(out_dim) +
                           " out of range [1, " + std::to_string(d) + "]");

    PcaModel m;
    m.in_dim = d;
    m.out_dim = out_dim;
    m.mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = samples.row(i);
        for (int j = 0; j < d; ++j) m.mean[j] += x[j];
    }
    for (int j = 0; j < d; ++j) m.mean[j] /= static_cast<double>(n);

    std::vector<double> cov(static_cast<std::size_t>(d) * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = samples.row(i);
        for (int p = 0; p < d; ++p) {
            const double xp = x[p] - m.mean[p];
            for (int q = p; q < d; ++q)
                cov[static_cast<std::size_t>(p) * d + q] += xp * (x[q] - m.mean[q]);
        }
    }
    const double inv = 1.0 / static_cast<double>(n - 1);
    for (int p = 0; p < d; ++p)
        for (int q = p; q < d; ++q) {
            cov[static_cast<std::size_t>(p) * d + q] *= inv;
            cov[static_cast<std::size_t>(q) * d + p] = cov[static_cast<std::size_t>(p) * d + q];
        }

    std::vector<double> vecs;
    const std::vector<double> eig = jacobi_eigen(cov, d, vecs);
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return eig[a] > eig[b]; });

    m.components.resize(static_cast<std::size_t>(out_dim) * d);
    m.eigenvalues.resize(out_dim);
    for (int r = 0; r < out_dim; ++r) {
        const int col = order[r];
        m.eigenvalues[r] = eig[col];
        double* row = &m.components[static_cast<std::size_t>(r) * d];
        for (int j = 0; j < d; ++j) row[j] = vecs[static_cast<std::size_t>(j) * d + col];
        int pivot = 0;
        for (int j = 1; j < d; ++j)
            if (std::abs(row[j]) > std::abs(row[pivot])) pivot = j;
        if (row[pivot] < 0.0)
            for (int j = 0; j < d; ++j) row[j] = -row[j];
    }
    return m;
}

Matrix pca_project(const PcaModel& model, const Matrix& samples) {
    if (static_cast<int>(samples.cols) != model.in_dim)
        throw DataError("pca_project: dimension mismatch, got " + std::to_string(samples.cols) +
                        ", model expects " + std::to_string(model.in_dim));
    Matrix out(samples.rows, model.out_dim);
    for (std::size_t i = 0; i < samples.rows; ++i) {
        const double* x = samples.row(i);
        double* y = out.row(i);
        for (int r = 0; r < model.out_dim; ++r) {
            const double* comp = &model.components[static_cast<std::size_t>(r) * model.in_dim];
            double s = 0.0;
            for (int j = 0; j < model.in_dim; ++j) s += comp[j] * (x[j] - model.mean[j]);
            y[r] = s;
        }
    }
    return out;
}

void save_pca(const std::filesystem::path& path, const PcaModel& model) {
    nlohmann::ordered_json doc;
    doc["format"] = "hodg-pca";
    doc["version"] = 1;
    doc["channel"] = model.channel;
    doc["in_dim"] = model.in_dim;
    doc["out_dim"] = model.out_dim;
    doc["mean"] = model.mean;
    doc["components"] = model.components;
    doc["eigenvalues"] = model.eigenvalues;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw DataError(path.string() + ": write failed");
}

PcaModel load_pca(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open file");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
    if (doc.value("format", "") != "hodg-pca")
        throw DataError(path.string() + ": not a PCA file (format field mismatch)");
    if (doc.value("version", 0) != 1)
        throw DataError(path.string() + ": unsupported PCA file version");
    PcaModel m;
    m.channel = doc.value("channel", "");
    m.in_dim = doc.at("in_dim").get<int>();
    m.out_dim = doc.at("out_dim").get<int>();
    m.mean = doc.at("mean").get<std::vector<double>>();
    m.components = doc.at("components").get<std::vector<double>>();
    m.eigenvalues = doc.at("eigenvalues").get<std::vector<double>>();
    if (m.mean.size() != static_cast<std::size_t>(m.in_dim) ||
        m.components.size() != static_cast<std::size_t>(m.out_dim) * m.in_dim ||
        m.eigenvalues.size() != static_cast<std::size_t>(m.out_dim))
        throw DataError(path.string() + ": PCA array sizes do not match in_dim and out_dim");
    return m;
}

}  // namespace hodg
