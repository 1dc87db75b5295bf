#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dmmt {

// Errors attributable to the input data (bad CSV, dimension mismatch,
// constant dimension). The CLI maps these to exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Comma-delimited, header row required. Reports the line number of the
// first malformed row.
CsvTable read_csv(const std::string& path);

// All columns numeric; one point per row.
std::vector<std::vector<double>> csv_to_points(const CsvTable& table,
                                               const std::string& path);

// Split by a two-valued group column (groups assigned by first
// occurrence); the remaining columns are the coordinates.
std::pair<std::vector<std::vector<double>>, std::vector<std::vector<double>>>
csv_to_grouped_points(const CsvTable& table, const std::string& group_col,
                      const std::string& path);

}  // namespace dmmt
