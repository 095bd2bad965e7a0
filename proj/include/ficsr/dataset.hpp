#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ficsr/matrix.hpp"

namespace ficsr {

// Feature matrix plus integer class labels; the unit all splits, shifts
// and training consume.
struct Dataset {
    Matrix features;               // n x d
    std::vector<int> labels;       // length n, values in [0, n_classes)
    int n_classes = 0;

    std::size_t size() const { return features.rows; }
    std::size_t dim() const { return features.cols; }
};

// Per-column zero-mean unit-variance transform. Fit on the training
// split only; the same transform is reused for validation/test.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;   // entries < 1e-12 replaced by 1 (constant column)

    static Standardizer fit(const Matrix& x);
    Matrix transform(const Matrix& x) const;
};

Dataset select_rows(const Dataset& ds, const std::vector<std::size_t>& idx);

// Deterministic shuffled split into (train, holdout).
// holdout_fraction of rows (rounded down, at least 1) go to the holdout.
std::pair<Dataset, Dataset> holdout_split(const Dataset& ds, double holdout_fraction,
                                          std::uint64_t seed);

}  // namespace ficsr
