#include "ficsr/matrix.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ficsr::kernels {

namespace {

void check_mul(const Matrix& a, const Matrix& b, std::size_t ac, std::size_t br) {
    if (ac != br) {
        throw std::invalid_argument("matmul: inner dimensions do not match");
    }
    (void)a;
    (void)b;
}

}  // namespace

void matmul_serial(const Matrix& a, const Matrix& b, Matrix& c) {
    check_mul(a, b, a.cols, b.rows);
    c = Matrix(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.row_ptr(i);
        double* crow = c.row_ptr(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            const double* brow = b.row_ptr(k);
            for (std::size_t j = 0; j < b.cols; ++j) {
                crow[j] += aik * brow[j];
            }
        }
    }
}

void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
    check_mul(a, b, a.cols, b.rows);
    c = Matrix(a.rows, b.cols);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double* arow = a.row_ptr(static_cast<std::size_t>(i));
        double* crow = c.row_ptr(static_cast<std::size_t>(i));
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            const double* brow = b.row_ptr(k);
            for (std::size_t j = 0; j < b.cols; ++j) {
                crow[j] += aik * brow[j];
            }
        }
    }
}

void matmul_transb_serial(const Matrix& a, const Matrix& b, Matrix& c) {
    check_mul(a, b, a.cols, b.cols);
    c = Matrix(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.row_ptr(i);
        double* crow = c.row_ptr(i);
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* brow = b.row_ptr(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
            crow[j] = acc;
        }
    }
}

void matmul_transb(const Matrix& a, const Matrix& b, Matrix& c) {
    check_mul(a, b, a.cols, b.cols);
    c = Matrix(a.rows, b.rows);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double* arow = a.row_ptr(static_cast<std::size_t>(i));
        double* crow = c.row_ptr(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* brow = b.row_ptr(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
            crow[j] = acc;
        }
    }
}

void matmul_transa_serial(const Matrix& a, const Matrix& b, Matrix& c) {
    check_mul(a, b, a.rows, b.rows);
    c = Matrix(a.cols, b.cols);
    for (std::size_t i = 0; i < a.cols; ++i) {
        double* crow = c.row_ptr(i);
        for (std::size_t k = 0; k < a.rows; ++k) {
            const double aki = a(k, i);
            const double* brow = b.row_ptr(k);
            for (std::size_t j = 0; j < b.cols; ++j) {
                crow[j] += aki * brow[j];
            }
        }
    }
}

void matmul_transa(const Matrix& a, const Matrix& b, Matrix& c) {
    check_mul(a, b, a.rows, b.rows);
    c = Matrix(a.cols, b.cols);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.cols);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double* crow = c.row_ptr(static_cast<std::size_t>(i));
        for (std::size_t k = 0; k < a.rows; ++k) {
            const double aki = a(k, static_cast<std::size_t>(i));
            const double* brow = b.row_ptr(k);
            for (std::size_t j = 0; j < b.cols; ++j) {
                crow[j] += aki * brow[j];
            }
        }
    }
}

}  // namespace ficsr::kernels
