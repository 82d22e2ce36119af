#include "rydcorr/output.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace rydcorr {

std::string format_sig12(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
    if (ec != std::errc{}) throw std::runtime_error("format_sig12: conversion failed");
    return std::string(buf, p);
}

std::string format_exact(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_exact: conversion failed");
    return std::string(buf, p);
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open output path: " + tmp.string());
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename into place: " + target.string() + " (" +
                                 ec.message() + ")");
    }
}

std::string render_csv(const std::vector<Column>& columns) {
    if (columns.empty()) return "";
    const std::size_t rows = columns.front().values.size();
    for (const Column& c : columns)
        if (c.values.size() != rows) throw std::invalid_argument("render_csv: ragged columns");
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out += ',';
        out += columns[c].name;
    }
    out += '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out += ',';
            out += format_sig12(columns[c].values[r]);
        }
        out += '\n';
    }
    return out;
}

namespace {

std::string svg_num(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return std::string(buf, p);
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

std::string render_svg_chart(const std::string& title, const std::string& x_label,
                             const std::vector<double>& x, const std::vector<SvgCurve>& curves) {
    const double w = 720, h = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    const double pw = w - ml - mr, ph = h - mt - mb;

    double xmin = x.empty() ? 0 : x.front(), xmax = x.empty() ? 1 : x.back();
    double ymin = 0, ymax = 1.05;
    for (const SvgCurve& c : curves)
        for (double v : c.y)
            if (std::isfinite(v)) ymax = std::max(ymax, v);
    ymax *= 1.05;
    if (xmax <= xmin) xmax = xmin + 1;

    auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return mt + ph - (v - ymin) / (ymax - ymin) * ph; };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_num(w) + "\" height=\"" +
         svg_num(h) + "\" viewBox=\"0 0 " + svg_num(w) + " " + svg_num(h) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + svg_num(w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
         "font-family=\"sans-serif\">" + title + "</text>\n";
    // axes
    s += "<line x1=\"" + svg_num(ml) + "\" y1=\"" + svg_num(mt + ph) + "\" x2=\"" +
         svg_num(ml + pw) + "\" y2=\"" + svg_num(mt + ph) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + svg_num(ml) + "\" y1=\"" + svg_num(mt) + "\" x2=\"" + svg_num(ml) +
         "\" y2=\"" + svg_num(mt + ph) + "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 5, yv = ymin + (ymax - ymin) * t / 5;
        s += "<text x=\"" + svg_num(px(xv)) + "\" y=\"" + svg_num(mt + ph + 18) +
             "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" +
             format_sig12(std::round(xv * 100) / 100) + "</text>\n";
        s += "<text x=\"" + svg_num(ml - 8) + "\" y=\"" + svg_num(py(yv) + 4) +
             "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" +
             format_sig12(std::round(yv * 100) / 100) + "</text>\n";
    }
    s += "<text x=\"" + svg_num(ml + pw / 2) + "\" y=\"" + svg_num(h - 12) +
         "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" + x_label +
         "</text>\n";
    // reference line at g2 = 1
    if (1.0 >= ymin && 1.0 <= ymax)
        s += "<line x1=\"" + svg_num(ml) + "\" y1=\"" + svg_num(py(1.0)) + "\" x2=\"" +
             svg_num(ml + pw) + "\" y2=\"" + svg_num(py(1.0)) +
             "\" stroke=\"#999\" stroke-dasharray=\"6,4\"/>\n";

    for (std::size_t c = 0; c < curves.size(); ++c) {
        const char* color = kPalette[c % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::string pts;
        bool open = false;
        for (std::size_t i = 0; i < x.size() && i < curves[c].y.size(); ++i) {
            const double v = curves[c].y[i];
            if (!std::isfinite(v)) { open = false; continue; }
            pts += (open ? " L" : (pts.empty() ? "M" : " M"));
            pts += svg_num(px(x[i])) + " " + svg_num(py(std::min(v, ymax)));
            open = true;
        }
        s += "<path d=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.5\"/>\n";
        s += "<text x=\"" + svg_num(ml + pw - 8) + "\" y=\"" +
             svg_num(mt + 16 + 16 * static_cast<double>(c)) +
             "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" fill=\"" +
             color + "\">" + curves[c].label + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace rydcorr
