#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ficsr {

// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    const double* row_ptr(std::size_t i) const { return data.data() + i * cols; }
    double* row_ptr(std::size_t i) { return data.data() + i * cols; }
};

namespace kernels {

// C = A * B. Serial reference implementation, kept for testing.
void matmul_serial(const Matrix& a, const Matrix& b, Matrix& c);

// C = A * B, rows of C distributed across OpenMP threads. Each output
// element is a serial dot product, so results are bitwise identical to
// the serial kernel regardless of thread count.
void matmul(const Matrix& a, const Matrix& b, Matrix& c);

// C = A * B^T variants.
void matmul_transb_serial(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_transb(const Matrix& a, const Matrix& b, Matrix& c);

// C = A^T * B variants.
void matmul_transa_serial(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_transa(const Matrix& a, const Matrix& b, Matrix& c);

}  // namespace kernels

}  // namespace ficsr
