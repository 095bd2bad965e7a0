#include "ficsr/csvio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ficsr {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, delim)) cells.push_back(cell);
    if (!line.empty() && line.back() == delim) cells.push_back("");
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Dataset load_csv_dataset(const CsvDatasetSchema& schema) {
    std::ifstream in(schema.path);
    if (!in) throw std::runtime_error("load_csv_dataset: cannot open " + schema.path);

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(split_line(line, schema.delimiter));
    }
    if (rows.empty()) throw std::runtime_error("load_csv_dataset: empty file " + schema.path);

    std::vector<std::string> header;
    std::size_t first_data = 0;
    if (schema.header) {
        header = rows[0];
        first_data = 1;
        if (rows.size() < 2) throw std::runtime_error("load_csv_dataset: header but no rows");
    }
    const std::size_t n_cols = rows[first_data].size();
    for (std::size_t r = first_data; r < rows.size(); ++r) {
        if (rows[r].size() != n_cols) {
            throw std::runtime_error("load_csv_dataset: ragged row " + std::to_string(r + 1) +
                                     " has " + std::to_string(rows[r].size()) + " cells, expected " +
                                     std::to_string(n_cols));
        }
    }

    std::size_t label_col = n_cols;
    if (schema.header) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (trim(header[c]) == schema.label_column) {
                label_col = c;
                break;
            }
        }
    }
    if (label_col == n_cols) {
        // try a numeric index
        try {
            const long v = std::stol(schema.label_column);
            if (v >= 0 && static_cast<std::size_t>(v) < n_cols) {
                label_col = static_cast<std::size_t>(v);
            }
        } catch (const std::exception&) {
        }
    }
    if (label_col == n_cols) {
        throw std::runtime_error("load_csv_dataset: unknown label column '" +
                                 schema.label_column + "'");
    }

    const std::size_t n = rows.size() - first_data;
    const std::size_t d = n_cols - 1;
    Dataset ds;
    ds.features = Matrix(n, d);
    ds.labels.resize(n);
    std::map<std::string, int> label_map;  // first-appearance order tracked separately
    std::vector<std::string> label_order;
    for (std::size_t r = 0; r < n; ++r) {
        const auto& cells = rows[r + first_data];
        std::size_t fc = 0;
        for (std::size_t c = 0; c < n_cols; ++c) {
            const std::string cell = trim(cells[c]);
            if (c == label_col) {
                auto it = label_map.find(cell);
                if (it == label_map.end()) {
                    it = label_map.emplace(cell, static_cast<int>(label_order.size())).first;
                    label_order.push_back(cell);
                }
                ds.labels[r] = it->second;
            } else {
                double value = 0.0;
                const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
                if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size() ||
                    !std::isfinite(value)) {
                    throw std::runtime_error("load_csv_dataset: non-numeric feature cell at row " +
                                             std::to_string(r + first_data + 1) + ", column " +
                                             std::to_string(c + 1) + " ('" + cell + "')");
                }
                ds.features(r, fc) = value;
                ++fc;
            }
        }
    }
    ds.n_classes = static_cast<int>(label_order.size());
    if (ds.n_classes < 2) {
        throw std::runtime_error("load_csv_dataset: fewer than 2 distinct labels");
    }
    return ds;
}

}  // namespace ficsr
