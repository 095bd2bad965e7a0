#include "ficsr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ficsr {

Standardizer Standardizer::fit(const Matrix& x) {
    if (x.rows == 0) throw std::invalid_argument("Standardizer::fit: empty matrix");
    Standardizer s;
    s.mean.assign(x.cols, 0.0);
    s.stddev.assign(x.cols, 0.0);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t j = 0; j < x.cols; ++j) s.mean[j] += x(i, j);
    }
    for (std::size_t j = 0; j < x.cols; ++j) s.mean[j] /= static_cast<double>(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t j = 0; j < x.cols; ++j) {
            const double d = x(i, j) - s.mean[j];
            s.stddev[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < x.cols; ++j) {
        s.stddev[j] = std::sqrt(s.stddev[j] / static_cast<double>(x.rows));
        if (s.stddev[j] < 1e-12) s.stddev[j] = 1.0;
    }
    return s;
}

Matrix Standardizer::transform(const Matrix& x) const {
    if (x.cols != mean.size()) {
        throw std::invalid_argument("Standardizer::transform: column count mismatch");
    }
    Matrix out(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t j = 0; j < x.cols; ++j) {
            out(i, j) = (x(i, j) - mean[j]) / stddev[j];
        }
    }
    return out;
}

Dataset select_rows(const Dataset& ds, const std::vector<std::size_t>& idx) {
    Dataset out;
    out.n_classes = ds.n_classes;
    out.features = Matrix(idx.size(), ds.dim());
    out.labels.resize(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const std::size_t i = idx[r];
        if (i >= ds.size()) throw std::out_of_range("select_rows: index out of range");
        std::copy_n(ds.features.row_ptr(i), ds.dim(), out.features.row_ptr(r));
        out.labels[r] = ds.labels[i];
    }
    return out;
}

std::pair<Dataset, Dataset> holdout_split(const Dataset& ds, double holdout_fraction,
                                          std::uint64_t seed) {
    if (ds.size() < 2) throw std::invalid_argument("holdout_split: need at least 2 rows");
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
        throw std::invalid_argument("holdout_split: fraction must be in (0,1)");
    }
    std::vector<std::size_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::size_t n_hold = static_cast<std::size_t>(
        std::floor(holdout_fraction * static_cast<double>(ds.size())));
    n_hold = std::max<std::size_t>(1, std::min(n_hold, ds.size() - 1));
    std::vector<std::size_t> hold(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_hold));
    std::vector<std::size_t> train(idx.begin() + static_cast<std::ptrdiff_t>(n_hold), idx.end());
    return {select_rows(ds, train), select_rows(ds, hold)};
}

}  // namespace ficsr
