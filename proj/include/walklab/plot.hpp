#pragma once

// Static SVG plots of numeric CSV files.
//
// A plot spec is a ';'-separated list of key=value pairs:
//   x=<column>            abscissa (default: first column)
//   y=<column>[,<column>] one series per column (default: all other columns)
//   scale=linear|loglog   loglog plots log10 of both axes
//   kind=line|scatter
//   title=<text>
//   out=<path>            default: the CSV path with extension .svg

#include <filesystem>
#include <string>
#include <vector>

#include "walklab/csv.hpp"

namespace walklab::plot {

struct PlotSpec {
    std::string x;
    std::vector<std::string> y;
    bool loglog = false;
    bool scatter = false;
    std::string title;
    std::filesystem::path out;
};

/// Throws std::invalid_argument on unknown keys or values.
PlotSpec parse_spec(const std::string& text);

/// SVG document for the table. Throws std::invalid_argument for unknown
/// columns and, in loglog mode, nonpositive values.
std::string render_svg(const csv::Table& table, const PlotSpec& spec);

/// Reads the CSV, renders, and writes the SVG; returns its path. Nothing is
/// written when the CSV is malformed or empty.
std::filesystem::path emit_plot(const std::filesystem::path& csv_path, const std::string& spec);

}  // namespace walklab::plot
