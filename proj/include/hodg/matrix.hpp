#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hodg {

// Dense row-major matrix of doubles. Rows are samples, columns are feature
// dimensions everywhere in this library.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    std::span<const double> row_span(std::size_t i) const { return {row(i), cols}; }
    std::span<double> row_span(std::size_t i) { return {row(i), cols}; }

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    void append_row(std::span<const double> r) {
        data.insert(data.end(), r.begin(), r.end());
        ++rows;
    }

    bool operator==(const Matrix&) const = default;
};

}  // namespace hodg
