#include "bsdelab/cli/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "bsdelab/error.hpp"

namespace bsdelab::cli {

std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<CsvCell> row) {
    if (row.size() != header_.size()) {
        throw InvalidArgument("csv: row has " + std::to_string(row.size()) + " cells, header has " +
                              std::to_string(header_.size()));
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (const double* x = std::get_if<double>(&row[i]); x != nullptr && !std::isfinite(*x)) {
            throw NumericalFailure("csv: non-finite value in column '" + header_[i] + "'");
        }
    }
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        out += (i ? "," : "") + header_[i];
    }
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (const double* x = std::get_if<double>(&row[i])) {
                out += format_real(*x);
            } else {
                out += std::get<std::string>(row[i]);
            }
        }
        out += '\n';
    }
    return out;
}

void CsvTable::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    f << str();
}

}  // namespace bsdelab::cli
