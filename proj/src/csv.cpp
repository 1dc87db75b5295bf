#include "dmmt/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dmmt {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        // trim surrounding whitespace and optional quotes
        const auto a = cell.find_first_not_of(" \t\r");
        const auto b = cell.find_last_not_of(" \t\r");
        cell = a == std::string::npos ? std::string{} : cell.substr(a, b - a + 1);
        if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"')
            cell = cell.substr(1, cell.size() - 2);
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_number(const std::string& cell, const std::string& path, int line,
                    const std::string& col) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        if (pos != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(line) + ": column '" + col +
                        "': not a finite number: '" + cell + "'");
    }
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file: " + path);
    CsvTable table;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_row(line);
        if (lineno == 1) {
            table.header = std::move(cells);
            if (table.header.empty())
                throw DataError(path + ": empty header row");
            continue;
        }
        if (cells.size() != table.header.size())
            throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(table.header.size()) + " fields, got " +
                            std::to_string(cells.size()));
        table.rows.push_back(std::move(cells));
    }
    if (table.header.empty()) throw DataError(path + ": missing header row");
    return table;
}

std::vector<std::vector<double>> csv_to_points(const CsvTable& table,
                                               const std::string& path) {
    std::vector<std::vector<double>> points;
    points.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::vector<double> x(table.header.size());
        for (std::size_t c = 0; c < table.header.size(); ++c)
            x[c] = parse_number(table.rows[r][c], path, static_cast<int>(r) + 2,
                                table.header[c]);
        points.push_back(std::move(x));
    }
    return points;
}

std::pair<std::vector<std::vector<double>>, std::vector<std::vector<double>>>
csv_to_grouped_points(const CsvTable& table, const std::string& group_col,
                      const std::string& path) {
    const auto it = std::find(table.header.begin(), table.header.end(), group_col);
    if (it == table.header.end())
        throw DataError(path + ": no column named '" + group_col + "'");
    const std::size_t gcol =
        static_cast<std::size_t>(it - table.header.begin());

    std::vector<std::string> labels;  // first occurrence maps to group 1
    std::pair<std::vector<std::vector<double>>, std::vector<std::vector<double>>> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::string& label = table.rows[r][gcol];
        auto lit = std::find(labels.begin(), labels.end(), label);
        if (lit == labels.end()) {
            if (labels.size() == 2)
                throw DataError(path + ":" + std::to_string(r + 2) +
                                ": group column has more than two values");
            labels.push_back(label);
            lit = labels.end() - 1;
        }
        std::vector<double> x;
        x.reserve(table.header.size() - 1);
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (c == gcol) continue;
            x.push_back(parse_number(table.rows[r][c], path,
                                     static_cast<int>(r) + 2, table.header[c]));
        }
        (lit == labels.begin() ? out.first : out.second).push_back(std::move(x));
    }
    if (labels.size() < 2)
        throw DataError(path + ": group column must take exactly two values");
    return out;
}

}  // namespace dmmt
