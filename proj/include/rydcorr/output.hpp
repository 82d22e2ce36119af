#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rydcorr {

// Locale-independent decimal formatting with 12 significant digits (CSV and
// manifest numeric format).
std::string format_sig12(double v);

// Shortest round-trip formatting (exact reload), used where bit-exact
// round-trips matter more than fixed width.
std::string format_exact(double v);

std::uint64_t fnv1a64(const std::string& text);

// Write via temp file + rename so partial runs never leave corrupt outputs.
void atomic_write(const std::string& path, const std::string& content);

struct Column {
    std::string name;
    std::vector<double> values;
};

// Rows are the columns zipped; all columns must share one length.
std::string render_csv(const std::vector<Column>& columns);

// Minimal line chart: one polyline per curve over a shared x grid, dashed
// reference line at y = 1.
struct SvgCurve {
    std::string label;
    std::vector<double> y;
};
std::string render_svg_chart(const std::string& title, const std::string& x_label,
                             const std::vector<double>& x, const std::vector<SvgCurve>& curves);

}  // namespace rydcorr
