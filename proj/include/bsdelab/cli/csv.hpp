#pragma once

#include <string>
#include <variant>
#include <vector>

namespace bsdelab::cli {

// Shortest-round-trip-safe text for a real: 17 significant digits.
std::string format_real(double x);

using CsvCell = std::variant<double, std::string>;

/**
 * Rectangular table written as comma-separated text with a header row and LF
 * line endings. Every real is written with 17 significant digits so that
 * reruns can be compared byte for byte.
 */
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    // Throws NumericalFailure for a non-finite real, InvalidArgument for a
    // row of the wrong width.
    void add_row(std::vector<CsvCell> row);

    const std::vector<std::string>& header() const noexcept { return header_; }
    std::size_t rows() const noexcept { return rows_.size(); }
    std::string str() const;
    void write(const std::string& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<CsvCell>> rows_;
};

}  // namespace bsdelab::cli
