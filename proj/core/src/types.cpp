#include "scca/types.hpp"

#include <cmath>
#include <stdexcept>

namespace scca {

VariableType variable_type_from_string(const std::string& s) {
    if (s == "continuous") return VariableType::continuous;
    if (s == "binary") return VariableType::binary;
    if (s == "truncated") return VariableType::truncated;
    throw std::invalid_argument("unknown variable type: " + s);
}

std::string to_string(VariableType t) {
    switch (t) {
        case VariableType::continuous: return "continuous";
        case VariableType::binary: return "binary";
        case VariableType::truncated: return "truncated";
    }
    return "?";
}

MixedDataMatrix::MixedDataMatrix(Eigen::MatrixXd v, std::vector<VariableType> t,
                                 std::vector<std::string> names)
    : values(std::move(v)), types(std::move(t)), column_names(std::move(names)) {
    const auto n = values.rows();
    const auto p = values.cols();
    if (n < 2) throw std::invalid_argument("MixedDataMatrix: need at least 2 rows");
    if (static_cast<Eigen::Index>(types.size()) != p)
        throw std::invalid_argument("MixedDataMatrix: one type per column required");
    if (!column_names.empty() && static_cast<Eigen::Index>(column_names.size()) != p)
        throw std::invalid_argument("MixedDataMatrix: column_names length mismatch");
    for (Eigen::Index j = 0; j < p; ++j) {
        const std::string label =
            column_names.empty() ? "column " + std::to_string(j + 1) : column_names[j];
        for (Eigen::Index i = 0; i < n; ++i) {
            double x = values(i, j);
            if (std::isnan(x))
                throw std::invalid_argument("MixedDataMatrix: NaN in " + label);
            if (types[j] == VariableType::binary && x != 0.0 && x != 1.0)
                throw std::invalid_argument(
                    "MixedDataMatrix: binary " + label + " contains non-{0,1} value");
            if (types[j] == VariableType::truncated && x < 0.0)
                throw std::invalid_argument(
                    "MixedDataMatrix: truncated " + label + " contains negative value");
        }
    }
}

}  // namespace scca
