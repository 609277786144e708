#pragma once

#include <string>
#include <vector>

namespace synergylab {

// Static SVG charts for the report subcommand; no external renderer.
// Axes are auto-scaled to the data, legends stack in the top-right.
class SvgPlot {
  public:
    SvgPlot(int width, int height, std::string title, std::string x_label, std::string y_label);

    void add_line(const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::string& label);
    void add_points(const std::vector<double>& xs, const std::vector<double>& ys,
                    const std::string& label, double radius = 3.0);
    // bubble layer: per-point radius and color override
    void add_bubbles(const std::vector<double>& xs, const std::vector<double>& ys,
                     const std::vector<double>& radii, const std::vector<std::string>& colors,
                     const std::string& label);

    void write(const std::string& path) const;

  private:
    struct Series {
        enum class Kind { Line, Points, Bubbles } kind;
        std::vector<double> xs, ys, radii;
        std::vector<std::string> colors;
        std::string label;
        std::string color;
        double radius = 3.0;
    };
    int width_, height_;
    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

// Standalone grouped bar chart (categories on x).
void write_bar_chart(const std::string& path, const std::string& title,
                     const std::vector<std::string>& labels, const std::vector<double>& values,
                     int width = 640, int height = 400);

// Heatmap with row/column labels; diverging palette centered at 0.
void write_heatmap(const std::string& path, const std::string& title,
                   const std::vector<std::string>& row_labels,
                   const std::vector<std::string>& col_labels,
                   const std::vector<std::vector<double>>& values, int cell = 28);

} // namespace synergylab
