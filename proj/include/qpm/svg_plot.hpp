// svg_plot.hpp
// Renders learning curves from a summary CSV (schema:
// variant,task,epoch,loss_mean,loss_std,acc_mean,acc_std; several variants may
// share one file) as a self-contained SVG with two stacked panels: mean train
// loss on top, mean test accuracy below, each line wrapped in a translucent
// +-1 std band. All numbers are printed with fixed precision so identical
// input yields byte-identical output.

#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpm/config.hpp"

namespace qpm {

struct SummaryRow {
    std::string variant;
    std::string task;
    int epoch = 0;
    double loss_mean = 0;
    double loss_std = 0;
    double acc_mean = 0;
    double acc_std = 0;
};

inline std::vector<SummaryRow> read_summary_csv(std::istream& in,
                                                const std::string& source) {
    const std::string expected =
        "variant,task,epoch,loss_mean,loss_std,acc_mean,acc_std";
    const auto fail = [&](int row, const std::string& msg) {
        throw std::runtime_error(source + ": row " + std::to_string(row) +
                                 ": " + msg);
    };
    std::string line;
    int row = 0;
    if (!std::getline(in, line)) {
        fail(0, "empty file");
    }
    ++row;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != expected) {
        fail(1, "header must be '" + expected + "'");
    }
    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) {
            fields.push_back(field);
        }
        if (fields.size() != 7) {
            fail(row, "expected 7 comma-separated fields, got " +
                          std::to_string(fields.size()));
        }
        SummaryRow r;
        r.variant = fields[0];
        r.task = fields[1];
        try {
            std::size_t used = 0;
            r.epoch = std::stoi(fields[2], &used);
            if (used != fields[2].size()) {
                throw std::invalid_argument("trailing");
            }
            const auto num = [&](const std::string& s) {
                std::size_t n = 0;
                const double v = std::stod(s, &n);
                if (n != s.size()) {
                    throw std::invalid_argument("trailing");
                }
                return v;
            };
            r.loss_mean = num(fields[3]);
            r.loss_std = num(fields[4]);
            r.acc_mean = num(fields[5]);
            r.acc_std = num(fields[6]);
        } catch (const std::exception&) {
            fail(row, "malformed numeric field");
        }
        rows.push_back(std::move(r));
    }
    if (rows.empty()) {
        fail(row, "no data rows");
    }
    return rows;
}

namespace detail {

inline std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string fixed3g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

inline constexpr std::array<const char*, 7> kPalette{
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
    "#9467bd", "#8c564b", "#e377c2"};

struct PanelGeom {
    double left, top, width, height;
    double xmin, xmax, ymin, ymax;

    double x(double v) const {
        if (xmax == xmin) {
            return left + width / 2;
        }
        return left + (v - xmin) / (xmax - xmin) * width;
    }
    double y(double v) const {
        if (ymax == ymin) {
            return top + height / 2;
        }
        return top + height - (v - ymin) / (ymax - ymin) * height;
    }
};

struct Series {
    std::string name;
    std::vector<int> epochs;
    std::vector<double> mean;
    std::vector<double> std_dev;
};

inline void render_panel(std::ostream& os, const PanelGeom& g,
                         const std::vector<Series>& series,
                         const std::string& title) {
    os << "<rect x=\"" << fixed2(g.left) << "\" y=\"" << fixed2(g.top)
       << "\" width=\"" << fixed2(g.width) << "\" height=\""
       << fixed2(g.height)
       << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fixed2(g.left) << "\" y=\"" << fixed2(g.top - 8)
       << "\" font-family=\"sans-serif\" font-size=\"13\">" << title
       << "</text>\n";

    // x ticks: integer epochs, at most ~9 labels
    const int span = static_cast<int>(g.xmax - g.xmin);
    const int step = std::max(1, (span + 7) / 8);
    for (int e = static_cast<int>(g.xmin); e <= static_cast<int>(g.xmax);
         e += step) {
        const double px = g.x(e);
        os << "<line x1=\"" << fixed2(px) << "\" y1=\""
           << fixed2(g.top + g.height) << "\" x2=\"" << fixed2(px)
           << "\" y2=\"" << fixed2(g.top + g.height + 4)
           << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << fixed2(px) << "\" y=\""
           << fixed2(g.top + g.height + 16)
           << "\" font-family=\"sans-serif\" font-size=\"11\" "
              "text-anchor=\"middle\">"
           << e << "</text>\n";
    }
    os << "<text x=\"" << fixed2(g.left + g.width / 2) << "\" y=\""
       << fixed2(g.top + g.height + 32)
       << "\" font-family=\"sans-serif\" font-size=\"12\" "
          "text-anchor=\"middle\">epoch</text>\n";

    // y ticks: 5 divisions
    for (int i = 0; i <= 4; ++i) {
        const double v = g.ymin + (g.ymax - g.ymin) * i / 4.0;
        const double py = g.y(v);
        os << "<line x1=\"" << fixed2(g.left - 4) << "\" y1=\"" << fixed2(py)
           << "\" x2=\"" << fixed2(g.left) << "\" y2=\"" << fixed2(py)
           << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << fixed2(g.left - 8) << "\" y=\""
           << fixed2(py + 4)
           << "\" font-family=\"sans-serif\" font-size=\"11\" "
              "text-anchor=\"end\">"
           << fixed3g(v) << "</text>\n";
    }

    for (std::size_t s = 0; s < series.size(); ++s) {
        const Series& sr = series[s];
        const char* color = kPalette[s % kPalette.size()];
        // +-1 std band: upper edge left to right, lower edge back
        os << "<polygon fill=\"" << color
           << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < sr.epochs.size(); ++i) {
            os << (i ? " " : "") << fixed2(g.x(sr.epochs[i])) << ','
               << fixed2(g.y(sr.mean[i] + sr.std_dev[i]));
        }
        for (std::size_t i = sr.epochs.size(); i-- > 0;) {
            os << ' ' << fixed2(g.x(sr.epochs[i])) << ','
               << fixed2(g.y(sr.mean[i] - sr.std_dev[i]));
        }
        os << "\"/>\n";
        if (sr.epochs.size() > 1) {
            os << "<polyline fill=\"none\" stroke=\"" << color
               << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < sr.epochs.size(); ++i) {
                os << (i ? " " : "") << fixed2(g.x(sr.epochs[i])) << ','
                   << fixed2(g.y(sr.mean[i]));
            }
            os << "\"/>\n";
        }
        for (std::size_t i = 0; i < sr.epochs.size(); ++i) {
            os << "<circle cx=\"" << fixed2(g.x(sr.epochs[i])) << "\" cy=\""
               << fixed2(g.y(sr.mean[i])) << "\" r=\"2\" fill=\"" << color
               << "\"/>\n";
        }
    }
}

} // namespace detail

inline void render_learning_curves(const std::vector<SummaryRow>& rows,
                                   std::ostream& os) {
    // group rows by variant, keeping first-appearance order
    std::vector<detail::Series> loss_series;
    std::vector<detail::Series> acc_series;
    std::map<std::string, std::size_t> index;
    for (const SummaryRow& r : rows) {
        auto [it, inserted] = index.try_emplace(r.variant, loss_series.size());
        if (inserted) {
            loss_series.push_back({r.variant, {}, {}, {}});
            acc_series.push_back({r.variant, {}, {}, {}});
        }
        detail::Series& ls = loss_series[it->second];
        detail::Series& as = acc_series[it->second];
        ls.epochs.push_back(r.epoch);
        ls.mean.push_back(r.loss_mean);
        ls.std_dev.push_back(r.loss_std);
        as.epochs.push_back(r.epoch);
        as.mean.push_back(r.acc_mean);
        as.std_dev.push_back(r.acc_std);
    }

    int emin = rows[0].epoch;
    int emax = rows[0].epoch;
    double loss_hi = 0;
    for (const SummaryRow& r : rows) {
        emin = std::min(emin, r.epoch);
        emax = std::max(emax, r.epoch);
        loss_hi = std::max(loss_hi, r.loss_mean + r.loss_std);
    }
    if (loss_hi <= 0) {
        loss_hi = 1;
    }

    const double width = 860;
    const double height = 660;
    detail::PanelGeom loss_panel{60,  40,  600, 240,
                                 static_cast<double>(emin),
                                 static_cast<double>(emax), 0, loss_hi * 1.05};
    detail::PanelGeom acc_panel{60,  380, 600, 240,
                                static_cast<double>(emin),
                                static_cast<double>(emax), 0, 1};

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
       << height << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
       << "\" fill=\"#ffffff\"/>\n";
    detail::render_panel(os, loss_panel, loss_series, "mean training loss");
    detail::render_panel(os, acc_panel, acc_series, "mean test accuracy");

    // legend: color swatch (rect, so data markers stay countable) + name
    const double lx = 680;
    double ly = 60;
    for (std::size_t s = 0; s < loss_series.size(); ++s) {
        const char* color = detail::kPalette[s % detail::kPalette.size()];
        os << "<rect x=\"" << detail::fixed2(lx) << "\" y=\""
           << detail::fixed2(ly - 9) << "\" width=\"18\" height=\"10\" fill=\""
           << color << "\"/>\n";
        os << "<text x=\"" << detail::fixed2(lx + 24) << "\" y=\""
           << detail::fixed2(ly)
           << "\" font-family=\"sans-serif\" font-size=\"12\">"
           << loss_series[s].name << "</text>\n";
        ly += 18;
    }
    os << "</svg>\n";
}

inline void plot_summary(const std::string& csv_path,
                         const std::string& svg_path) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open summary CSV '" + csv_path + "'");
    }
    const std::vector<SummaryRow> rows = read_summary_csv(in, csv_path);
    std::ofstream out(svg_path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write SVG '" + svg_path + "'");
    }
    render_learning_curves(rows, out);
}

} // namespace qpm
