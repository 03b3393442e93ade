#include "vofc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

namespace vofc::io {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

void Table::add_row(const std::vector<double>& values) {
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_double(v));
    rows.push_back(std::move(row));
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os << content;
        if (!os) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string to_csv(const Table& table) {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) line(r);
    return out;
}

void write_csv(const std::filesystem::path& path, const Table& table) {
    write_text_atomic(path, to_csv(table));
}

Table trajectory_table(const Trajectory& traj) {
    Table t;
    t.header.push_back("t");
    for (std::size_t k = 0; k < traj.dim; ++k) t.header.push_back("y" + std::to_string(k + 1));
    for (std::size_t n = 0; n < traj.size(); ++n) {
        std::vector<double> row{traj.ts[n]};
        const auto s = traj.state(n);
        row.insert(row.end(), s.begin(), s.end());
        t.add_row(row);
    }
    return t;
}

namespace {

std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '&': o += "&amp;"; break;
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

std::string svg_line_plot(const PlotSpec& spec, const std::vector<Series>& series) {
    const double ml = 70, mr = 20, mt = 36, mb = 50;
    const double W = spec.width, H = spec.height;
    const double pw = W - ml - mr, ph = H - mt - mb;

    auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            const double a = tx(s.x[i]), b = ty(s.y[i]);
            if (!std::isfinite(a) || !std::isfinite(b)) continue;
            x0 = std::min(x0, a), x1 = std::max(x1, a), y0 = std::min(y0, b), y1 = std::max(y1, b);
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.04 * (y1 - y0);
    y0 -= pad, y1 += pad;
    auto px = [&](double a) { return ml + (a - x0) / (x1 - x0) * pw; };
    auto py = [&](double b) { return mt + (1.0 - (b - y0) / (y1 - y0)) * ph; };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double a = x0 + (x1 - x0) * i / 4, b = y0 + (y1 - y0) * i / 4;
        const std::string la = spec.log_x ? "1e" + num(a) : num(a);
        const std::string lb = spec.log_y ? "1e" + num(b) : num(b);
        o << "<text x=\"" << px(a) << "\" y=\"" << H - mb + 18 << "\" font-size=\"11\" text-anchor=\"middle\">"
          << escape(la) << "</text>\n";
        o << "<text x=\"" << ml - 6 << "\" y=\"" << py(b) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
          << escape(lb) << "</text>\n";
    }
    o << "<text x=\"" << W / 2 << "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">" << escape(spec.title)
      << "</text>\n";
    o << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 10 << "\" font-size=\"12\" text-anchor=\"middle\">"
      << escape(spec.x_label) << "</text>\n";
    o << "<text x=\"16\" y=\"" << mt + ph / 2 << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << mt + ph / 2 << ")\">" << escape(spec.y_label) << "</text>\n";

    int legend = 0;
    for (const auto& s : series) {
        o << "<polyline fill=\"none\" stroke=\"" << escape(s.color) << "\" stroke-width=\"1.4\"";
        if (!s.dash.empty()) o << " stroke-dasharray=\"" << escape(s.dash) << "\"";
        o << " points=\"";
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            const double a = tx(s.x[i]), b = ty(s.y[i]);
            if (!std::isfinite(a) || !std::isfinite(b)) continue;
            o << num(px(a)) << ',' << num(py(b)) << ' ';
        }
        o << "\"/>\n";
        if (!s.label.empty()) {
            const double ly = mt + 14 + 16 * legend++;
            o << "<line x1=\"" << ml + pw - 150 << "\" y1=\"" << ly << "\" x2=\"" << ml + pw - 120 << "\" y2=\"" << ly
              << "\" stroke=\"" << escape(s.color) << "\"";
            if (!s.dash.empty()) o << " stroke-dasharray=\"" << escape(s.dash) << "\"";
            o << "/>\n<text x=\"" << ml + pw - 114 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">" << escape(s.label)
              << "</text>\n";
        }
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace vofc::io
