#pragma once

#include <string>

#include "ficsr/dataset.hpp"

namespace ficsr {

struct CsvDatasetSchema {
    std::string path;
    std::string label_column;   // name (with header) or numeric index
    char delimiter = ',';
    bool header = true;
};

// Labels are mapped to contiguous integers in first-appearance order.
// Standardization is applied downstream, on the training split only.
Dataset load_csv_dataset(const CsvDatasetSchema& schema);

}  // namespace ficsr
