#include "synergylab/svg.hpp"

#include "synergylab/csv.hpp"
#include "synergylab/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace synergylab {

namespace {

const char* kPalette[] = {"#4477aa", "#ee6677", "#228833", "#ccbb44",
                          "#66ccee", "#aa3377", "#bbbbbb", "#000000"};
constexpr int kPaletteSize = 8;

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string num(double v) { return format_double(v); }

} // namespace

SvgPlot::SvgPlot(int width, int height, std::string title, std::string x_label,
                 std::string y_label)
    : width_(width), height_(height), title_(std::move(title)), x_label_(std::move(x_label)),
      y_label_(std::move(y_label)) {}

void SvgPlot::add_line(const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::string& label) {
    Series s;
    s.kind = Series::Kind::Line;
    s.xs = xs;
    s.ys = ys;
    s.label = label;
    s.color = kPalette[series_.size() % kPaletteSize];
    series_.push_back(std::move(s));
}

void SvgPlot::add_points(const std::vector<double>& xs, const std::vector<double>& ys,
                         const std::string& label, double radius) {
    Series s;
    s.kind = Series::Kind::Points;
    s.xs = xs;
    s.ys = ys;
    s.label = label;
    s.radius = radius;
    s.color = kPalette[series_.size() % kPaletteSize];
    series_.push_back(std::move(s));
}

void SvgPlot::add_bubbles(const std::vector<double>& xs, const std::vector<double>& ys,
                          const std::vector<double>& radii,
                          const std::vector<std::string>& colors, const std::string& label) {
    Series s;
    s.kind = Series::Kind::Bubbles;
    s.xs = xs;
    s.ys = ys;
    s.radii = radii;
    s.colors = colors;
    s.label = label;
    s.color = kPalette[series_.size() % kPaletteSize];
    series_.push_back(std::move(s));
}

void SvgPlot::write(const std::string& path) const {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series_) {
        for (double x : s.xs) { xmin = std::min(xmin, x); xmax = std::max(xmax, x); }
        for (double y : s.ys) { ymin = std::min(ymin, y); ymax = std::max(ymax, y); }
    }
    if (!std::isfinite(xmin)) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
    if (xmax == xmin) { xmax += 1; xmin -= 1; }
    if (ymax == ymin) { ymax += 1; ymin -= 1; }
    const double ml = 64, mr = 24, mt = 40, mb = 48; // margins
    const double pw = width_ - ml - mr, ph = height_ - mt - mb;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
       << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width_ / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
          "font-family=\"sans-serif\">" << xml_escape(title_) << "</text>\n";

    // frame + ticks
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        double fx = xmin + (xmax - xmin) * t / 4.0;
        double fy = ymin + (ymax - ymin) * t / 4.0;
        os << "<text x=\"" << px(fx) << "\" y=\"" << mt + ph + 16
           << "\" text-anchor=\"middle\" font-size=\"10\" font-family=\"sans-serif\">" << num(fx)
           << "</text>\n";
        os << "<text x=\"" << ml - 6 << "\" y=\"" << py(fy) + 3
           << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">" << num(fy)
           << "</text>\n";
        os << "<line x1=\"" << ml << "\" y1=\"" << py(fy) << "\" x2=\"" << ml + pw << "\" y2=\""
           << py(fy) << "\" stroke=\"#eee\"/>\n";
    }
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height_ - 8
       << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
       << xml_escape(x_label_) << "</text>\n";
    os << "<text x=\"14\" y=\"" << mt + ph / 2
       << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
          "transform=\"rotate(-90 14 " << mt + ph / 2 << ")\">" << xml_escape(y_label_)
       << "</text>\n";

    for (const auto& s : series_) {
        if (s.kind == Series::Kind::Line) {
            os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            for (size_t i = 0; i < s.xs.size(); ++i)
                os << px(s.xs[i]) << "," << py(s.ys[i]) << " ";
            os << "\"/>\n";
        } else if (s.kind == Series::Kind::Points) {
            for (size_t i = 0; i < s.xs.size(); ++i)
                os << "<circle cx=\"" << px(s.xs[i]) << "\" cy=\"" << py(s.ys[i]) << "\" r=\""
                   << s.radius << "\" fill=\"" << s.color << "\" fill-opacity=\"0.8\"/>\n";
        } else {
            for (size_t i = 0; i < s.xs.size(); ++i)
                os << "<circle cx=\"" << px(s.xs[i]) << "\" cy=\"" << py(s.ys[i]) << "\" r=\""
                   << s.radii[i] << "\" fill=\"" << s.colors[i] << "\" fill-opacity=\"0.7\"/>\n";
        }
    }

    double ly = mt + 14;
    for (const auto& s : series_) {
        if (s.label.empty()) continue;
        os << "<rect x=\"" << ml + pw - 130 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\""
           << s.color << "\"/>\n";
        os << "<text x=\"" << ml + pw - 116 << "\" y=\"" << ly
           << "\" font-size=\"11\" font-family=\"sans-serif\">" << xml_escape(s.label)
           << "</text>\n";
        ly += 15;
    }
    os << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << os.str();
}

void write_bar_chart(const std::string& path, const std::string& title,
                     const std::vector<std::string>& labels, const std::vector<double>& values,
                     int width, int height) {
    if (labels.size() != values.size()) throw ConfigError("bar chart: label/value mismatch");
    double vmax = 0, vmin = 0;
    for (double v : values) { vmax = std::max(vmax, v); vmin = std::min(vmin, v); }
    if (vmax == vmin) vmax = vmin + 1;
    const double ml = 56, mr = 16, mt = 40, mb = 70;
    const double pw = width - ml - mr, ph = height - mt - mb;
    const double zero_y = mt + ph - (0 - vmin) / (vmax - vmin) * ph;
    const double bw = pw / std::max<size_t>(values.size(), 1);

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
          "font-family=\"sans-serif\">" << xml_escape(title) << "</text>\n";
    for (size_t i = 0; i < values.size(); ++i) {
        double vy = mt + ph - (values[i] - vmin) / (vmax - vmin) * ph;
        double top = std::min(vy, zero_y), h = std::fabs(vy - zero_y);
        os << "<rect x=\"" << ml + bw * double(i) + bw * 0.15 << "\" y=\"" << top << "\" width=\""
           << bw * 0.7 << "\" height=\"" << h << "\" fill=\"" << kPalette[i % kPaletteSize]
           << "\"/>\n";
        os << "<text x=\"" << ml + bw * (double(i) + 0.5) << "\" y=\"" << mt + ph + 14
           << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\" transform=\"rotate(-35 "
           << ml + bw * (double(i) + 0.5) << " " << mt + ph + 14 << ")\">" << xml_escape(labels[i])
           << "</text>\n";
        os << "<text x=\"" << ml + bw * (double(i) + 0.5) << "\" y=\"" << top - 4
           << "\" text-anchor=\"middle\" font-size=\"9\" font-family=\"sans-serif\">" << num(values[i])
           << "</text>\n";
    }
    os << "<line x1=\"" << ml << "\" y1=\"" << zero_y << "\" x2=\"" << ml + pw << "\" y2=\""
       << zero_y << "\" stroke=\"#333\"/>\n";
    os << "</svg>\n";
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << os.str();
}

void write_heatmap(const std::string& path, const std::string& title,
                   const std::vector<std::string>& row_labels,
                   const std::vector<std::string>& col_labels,
                   const std::vector<std::vector<double>>& values, int cell) {
    const size_t nr = row_labels.size(), nc = col_labels.size();
    if (values.size() != nr) throw ConfigError("heatmap: row count mismatch");
    double vmax = 0;
    for (const auto& row : values) {
        if (row.size() != nc) throw ConfigError("heatmap: column count mismatch");
        for (double v : row) vmax = std::max(vmax, std::fabs(v));
    }
    if (vmax == 0) vmax = 1;
    const int ml = 150, mt = 60, label_h = 110;
    const int width = ml + int(nc) * cell + 20;
    const int height = mt + int(nr) * cell + label_h;

    auto color = [&](double v) {
        // blue (below average) .. white .. red (above average)
        double t = std::clamp(v / vmax, -1.0, 1.0);
        int r, g, b;
        if (t >= 0) { r = 255; g = int(255 * (1 - t)); b = int(255 * (1 - t)); }
        else        { r = int(255 * (1 + t)); g = int(255 * (1 + t)); b = 255; }
        char buf[8];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
        return std::string(buf);
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" "
          "font-family=\"sans-serif\">" << xml_escape(title) << "</text>\n";
    for (size_t r = 0; r < nr; ++r) {
        os << "<text x=\"" << ml - 6 << "\" y=\"" << mt + int(r) * cell + cell / 2 + 4
           << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
           << xml_escape(row_labels[r]) << "</text>\n";
        for (size_t c = 0; c < nc; ++c) {
            os << "<rect x=\"" << ml + int(c) * cell << "\" y=\"" << mt + int(r) * cell
               << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
               << color(values[r][c]) << "\" stroke=\"#ccc\"/>\n";
        }
    }
    for (size_t c = 0; c < nc; ++c) {
        int x = ml + int(c) * cell + cell / 2;
        int y = mt + int(nr) * cell + 12;
        os << "<text x=\"" << x << "\" y=\"" << y
           << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\" transform=\"rotate(-60 "
           << x << " " << y << ")\">" << xml_escape(col_labels[c]) << "</text>\n";
    }
    os << "</svg>\n";
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << os.str();
}

} // namespace synergylab
