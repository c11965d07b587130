#include "walklab/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace walklab::plot {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (hi == lo) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

// Roughly five round tick positions inside [lo, hi].
std::vector<double> ticks(const Range& r) {
    const double raw = (r.hi - r.lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double f : {2.0, 5.0, 10.0}) {
        if (step >= raw) break;
        step = f * mag;
    }
    std::vector<double> out;
    for (double v = std::ceil(r.lo / step) * step; v <= r.hi + 1e-9 * step; v += step) out.push_back(v);
    return out;
}

}  // namespace

PlotSpec parse_spec(const std::string& text) {
    PlotSpec spec;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("plot spec item '" + item + "' lacks '='");
        const auto key = item.substr(0, eq);
        const auto value = item.substr(eq + 1);
        if (key == "x") {
            spec.x = value;
        } else if (key == "y") {
            std::istringstream cols(value);
            std::string col;
            while (std::getline(cols, col, ',')) spec.y.push_back(col);
        } else if (key == "scale") {
            if (value != "linear" && value != "loglog") throw std::invalid_argument("plot scale must be linear or loglog");
            spec.loglog = value == "loglog";
        } else if (key == "kind") {
            if (value != "line" && value != "scatter") throw std::invalid_argument("plot kind must be line or scatter");
            spec.scatter = value == "scatter";
        } else if (key == "title") {
            spec.title = value;
        } else if (key == "out") {
            spec.out = value;
        } else {
            throw std::invalid_argument("unknown plot spec key '" + key + "'");
        }
    }
    return spec;
}

std::string render_svg(const csv::Table& table, const PlotSpec& spec) {
    const auto column = [&](const std::string& name) {
        try {
            return table.column(name);
        } catch (const std::out_of_range& e) {
            throw std::invalid_argument(e.what());
        }
    };
    const auto xi = spec.x.empty() ? std::size_t{0} : column(spec.x);
    std::vector<std::size_t> ys;
    if (spec.y.empty()) {
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (c != xi) ys.push_back(c);
        }
    } else {
        for (const auto& name : spec.y) ys.push_back(column(name));
    }
    if (ys.empty()) throw std::invalid_argument("plot needs at least one y column");

    const auto map = [&](double v) {
        if (!spec.loglog) return v;
        if (!(v > 0.0)) throw std::invalid_argument("loglog plot of a nonpositive value");
        return std::log10(v);
    };
    Range rx, ry;
    for (const auto& row : table.rows) {
        rx.add(map(row[xi]));
        for (auto c : ys) ry.add(map(row[c]));
    }
    rx.pad();
    ry.pad();

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const auto sx = [&](double v) { return kLeft + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    const auto sy = [&](double v) { return kTop + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };
    const auto label = [&](double v) { return spec.loglog ? fmt::format("1e{:.3g}", v) : fmt::format("{:.4g}", v); };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n",
        kWidth, kHeight, kWidth, kHeight);
    svg += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
    if (!spec.title.empty()) {
        svg += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                           kLeft + pw / 2, escape(spec.title));
    }
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
                       kTop, pw, ph);
    for (double t : ticks(rx)) {
        svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"black\"/>", sx(t),
                           kTop + ph, kTop + ph + 5);
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", sx(t), kTop + ph + 18,
                           label(t));
    }
    for (double t : ticks(ry)) {
        svg += fmt::format("<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"black\"/>", kLeft - 5,
                           sy(t), kLeft, sy(t));
        svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", kLeft - 8, sy(t) + 4,
                           label(t));
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2, kHeight - 10,
                       escape(table.header[xi]));

    for (std::size_t s = 0; s < ys.size(); ++s) {
        const char* color = kColors[s % kColors.size()];
        if (spec.scatter) {
            svg += fmt::format("<g fill=\"{}\">", color);
            for (const auto& row : table.rows) {
                svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\"/>", sx(map(row[xi])),
                                   sy(map(row[ys[s]])));
            }
            svg += "</g>\n";
        } else {
            svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"", color);
            for (std::size_t i = 0; i < table.rows.size(); ++i) {
                const auto& row = table.rows[i];
                svg += fmt::format("{}{:.2f},{:.2f}", i == 0 ? "" : " ", sx(map(row[xi])), sy(map(row[ys[s]])));
            }
            svg += "\"/>\n";
        }
        const double ly = kTop + 10 + 18.0 * static_cast<double>(s);
        svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"4\" fill=\"{}\"/>", kLeft + pw + 12, ly,
                           color);
        svg += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", kLeft + pw + 30, ly + 6,
                           escape(table.header[ys[s]]));
    }
    svg += "</svg>\n";
    return svg;
}

std::filesystem::path emit_plot(const std::filesystem::path& csv_path, const std::string& spec_text) {
    const auto spec = parse_spec(spec_text);
    const auto table = csv::read_numeric(csv_path);
    const auto svg = render_svg(table, spec);
    auto out = spec.out.empty() ? std::filesystem::path(csv_path).replace_extension(".svg") : spec.out;
    std::ofstream file(out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + out.string());
    file << svg;
    return out;
}

}  // namespace walklab::plot
