#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace walklab::csv {

/// Shortest decimal text that reads back to the same double.
std::string real(double value);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Index of a column by name; throws std::out_of_range.
    std::size_t column(const std::string& name) const;
};

/// Reads a numeric CSV with one header line. Throws std::runtime_error on
/// missing file, empty content, ragged rows or non-numeric cells.
Table read_numeric(const std::filesystem::path& path);

}  // namespace walklab::csv
