#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "scca/types.hpp"

namespace scca::io {

struct CsvTable {
    std::vector<std::string> header;
    Eigen::MatrixXd values;
};

// Comma-separated, header row required, '.' decimal.
// Throws std::runtime_error naming the offending row/column.
CsvTable read_csv(const std::string& path);

// Inline comma list ("continuous,binary,...") or a two-column
// (name,type) sidecar CSV path; returns one type per data column.
std::vector<VariableType> parse_types(const std::string& spec,
                                      const std::vector<std::string>& columns);

// Number formatting with 17 significant digits.
std::string format_double(double x);

std::string matrix_to_csv(const Eigen::MatrixXd& m,
                          const std::vector<std::string>& header = {});

// Writes via temp file + rename.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace scca::io
