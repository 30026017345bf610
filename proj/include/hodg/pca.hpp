#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hodg/matrix.hpp"

namespace hodg {

// Optional per-channel PCA pre-projection for descriptors before GMM
// training. Off by default in the pipeline; provided for experiments.
struct PcaModel {
    int in_dim = 0;
    int out_dim = 0;
    std::vector<double> mean;        // in_dim
    std::vector<double> components;  // out_dim x in_dim, row-major, descending eigenvalue
    std::vector<double> eigenvalues; // out_dim
    std::string channel;
};

// Fits mean + top out_dim covariance eigenvectors (cyclic Jacobi sweeps).
// Each component's sign is fixed so its largest-magnitude entry is positive
// (lowest index wins ties), making the fit deterministic.
// Throws NumericError when samples.rows < 2 or out_dim is out of range.
PcaModel fit_pca(const Matrix& samples, int out_dim);

// (x - mean) projected onto the components; one output row per input row.
Matrix pca_project(const PcaModel& model, const Matrix& samples);

void save_pca(const std::filesystem::path& path, const PcaModel& model);
PcaModel load_pca(const std::filesystem::path& path);

}  // namespace hodg
