#include "walklab/csv.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace walklab::csv {

std::string real(double value) { return fmt::format("{}", value); }

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw std::out_of_range("no CSV column named '" + name + "'");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
    double value = 0.0;
    const auto* first = cell.data();
    const auto* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc() || ptr != last) {
        throw std::runtime_error("malformed CSV: non-numeric cell '" + cell + "' on line " + std::to_string(line_no));
    }
    return value;
}

}  // namespace

Table read_numeric(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV " + path.string());
    Table table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto cells = split_line(line);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw std::runtime_error("malformed CSV: line " + std::to_string(line_no) + " has " +
                                     std::to_string(cells.size()) + " cells, header has " +
                                     std::to_string(table.header.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_cell(c, line_no));
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw std::runtime_error("malformed CSV: empty file " + path.string());
    if (table.rows.empty()) throw std::runtime_error("malformed CSV: no data rows in " + path.string());
    return table;
}

}  // namespace walklab::csv
