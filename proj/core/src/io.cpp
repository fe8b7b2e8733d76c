#include "scca/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace scca::io {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // Trim surrounding whitespace and CR.
        std::size_t b = field.find_first_not_of(" \t\r");
        std::size_t e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    CsvTable t;
    t.header = split_line(line);
    const std::size_t p = t.header.size();
    if (p == 0) throw std::runtime_error(path + ": empty header");
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split_line(line);
        if (fields.size() != p)
            throw std::runtime_error(path + ": line " + std::to_string(lineno) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(p));
        std::vector<double> row(p);
        for (std::size_t j = 0; j < p; ++j) {
            try {
                std::size_t used = 0;
                row[j] = std::stod(fields[j], &used);
                if (used != fields[j].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                         ", column '" + t.header[j] +
                                         "': not a number: '" + fields[j] + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < p; ++j)
            t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j];
    return t;
}

std::vector<VariableType> parse_types(const std::string& spec,
                                      const std::vector<std::string>& columns) {
    std::vector<VariableType> types;
    if (std::filesystem::exists(spec)) {
        std::ifstream in(spec);
        std::string line;
        std::vector<std::pair<std::string, std::string>> entries;
        bool first = true;
        while (std::getline(in, line)) {
            if (line.empty() || line == "\r") continue;
            auto fields = split_line(line);
            if (fields.size() != 2)
                throw std::runtime_error(spec + ": sidecar rows need (name, type)");
            if (first && (fields[1] == "type" || fields[0] == "name")) {
                first = false;
                continue;  // header row
            }
            first = false;
            entries.emplace_back(fields[0], fields[1]);
        }
        for (const auto& col : columns) {
            auto it = std::find_if(entries.begin(), entries.end(),
                                   [&](const auto& e) { return e.first == col; });
            if (it == entries.end())
                throw std::runtime_error(spec + ": no type declared for column '" + col +
                                         "'");
            types.push_back(variable_type_from_string(it->second));
        }
        return types;
    }
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) types.push_back(variable_type_from_string(item));
    if (types.size() != columns.size())
        throw std::runtime_error("type list has " + std::to_string(types.size()) +
                                 " entries for " + std::to_string(columns.size()) +
                                 " columns");
    return types;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string matrix_to_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& header) {
    std::string out;
    if (!header.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (j) out += ',';
            out += header[j];
        }
        out += '\n';
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace scca::io
