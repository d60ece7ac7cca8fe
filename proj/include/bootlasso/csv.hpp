#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bootlasso/dataset.hpp"

namespace bootlasso {

struct CsvTable {
    std::vector<std::string> columns;
    Eigen::MatrixXd values;  // rows x columns
};

// Reads a numeric CSV with a header row. Lines starting with '#' are
// skipped. Throws CsvParseError naming the offending row and column.
CsvTable read_csv(const std::string& path);

struct LoadedDataset {
    Dataset data;
    std::vector<std::string> covariate_names;
    std::string response_name;
};

// Loads a CSV, splits off the named response column and standardizes.
LoadedDataset load_dataset_csv(const std::string& path, const std::string& response);

// Shortest decimal representation that parses back to the identical double.
std::string format_double(double v);

}  // namespace bootlasso
