#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace scca {

enum class VariableType { continuous, binary, truncated };

VariableType variable_type_from_string(const std::string& s);
std::string to_string(VariableType t);

// n x p data matrix with per-column type tags. Construction validates:
// n >= 2, no NaN, binary columns in {0,1}, truncated columns >= 0.
struct MixedDataMatrix {
    Eigen::MatrixXd values;
    std::vector<VariableType> types;
    std::vector<std::string> column_names;  // optional, empty or length p

    MixedDataMatrix() = default;
    MixedDataMatrix(Eigen::MatrixXd v, std::vector<VariableType> t,
                    std::vector<std::string> names = {});

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

}  // namespace scca
