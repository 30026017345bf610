#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hodg/gmm.hpp"
#include "hodg/matrix.hpp"

namespace hodg {

// First-order Fisher vector of a descriptor set under a diagonal GMM:
//   G(k,d) = (1/(N*sqrt(w_k))) * sum_i gamma_k(x_i) * (x_i[d] - mu_k[d]) / sigma_k[d]
// laid out component-major (k outer, d inner), length K*D.
// Throws NumericError when samples is empty, DataError on dimension mismatch.
std::vector<double> fisher_encode_raw(const GmmCodebook& cb, const Matrix& samples);

// fisher_encode_raw followed by signed square root then global l2
// normalization. An all-zero vector is returned unchanged.
std::vector<double> fisher_encode(const GmmCodebook& cb, const Matrix& samples);

// Concatenates per-channel Fisher vectors in the fixed channel order
// (hog, hof, mbhx, mbhy, hodg), skipping channels that are absent.
// `names` and `vectors` are parallel. Throws ConfigError on a duplicate or
// unknown channel name, NumericError when the result would be empty.
std::vector<double> concat_channels(const std::vector<std::string>& names,
                                    const std::vector<std::vector<double>>& vectors);

// Encoded sequence set: one row per sequence plus its label.
struct EncodedSet {
    Matrix features;                  // n_sequences x fv_dim
    std::vector<std::string> labels;  // size n_sequences
};

// FVEC1 binary dump. Layout: magic "FVEC1", u32 n_rows, u32 dim, then per
// row a u16 label id followed by dim f32 values. Label ids index the sorted
// unique label list stored in a JSON sidecar at <path>.labels.json; both
// files are written together and read_fv_dump requires both.
void write_fv_dump(const std::filesystem::path& path, const EncodedSet& set);
EncodedSet read_fv_dump(const std::filesystem::path& path);

}  // namespace hodg
