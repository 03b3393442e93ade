#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vofc/solver.hpp"

namespace vofc::io {

/// Shortest decimal that reads back to the same binary64.
std::string format_double(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
};

/// Writes through a temporary file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

std::string to_csv(const Table& table);
void write_csv(const std::filesystem::path& path, const Table& table);

/// `t,y1..yd` with one row per grid node.
Table trajectory_table(const Trajectory& traj);

struct Series {
    std::string label;
    std::vector<double> x, y;
    std::string color = "black";
    std::string dash;  // SVG stroke-dasharray, empty for solid
};

struct PlotSpec {
    std::string title, x_label, y_label;
    bool log_x = false;
    bool log_y = false;
    int width = 640, height = 420;
};

/// Static SVG 1.1 line plot.
std::string svg_line_plot(const PlotSpec& spec, const std::vector<Series>& series);

}  // namespace vofc::io
