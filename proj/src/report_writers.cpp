#include "bemspectra/report_writers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bemspectra/run_config.hpp"

namespace bemspectra {

CsvTable::CsvTable(std::string name, std::vector<std::string> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {}

CsvTable& CsvTable::row() {
  if (!cells_.empty() && cells_.back().size() != columns_.size()) {
    throw std::logic_error("csv row in table " + name_ + " has the wrong number of cells");
  }
  cells_.emplace_back();
  return *this;
}

CsvTable& CsvTable::add(const std::string& text) {
  if (cells_.empty()) throw std::logic_error("csv add before row");
  if (text.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (const char c : text) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    cells_.back().push_back(quoted + "\"");
  } else {
    cells_.back().push_back(text);
  }
  return *this;
}

CsvTable& CsvTable::add(double value) {
  if (std::isnan(value)) return add(std::string("nan"));
  if (std::isinf(value)) return add(std::string(value > 0 ? "inf" : "-inf"));
  return add(format_double(value));
}

CsvTable& CsvTable::add(int value) { return add(std::to_string(value)); }
CsvTable& CsvTable::add(long value) { return add(std::to_string(value)); }
CsvTable& CsvTable::add(bool value) { return add(std::string(value ? "1" : "0")); }

std::string CsvTable::render() const {
  std::ostringstream s;
  s << "# bemspectra-csv schema=" << kCsvSchemaVersion << " table=" << name_ << '\n';
  for (std::size_t i = 0; i < columns_.size(); ++i) s << (i ? "," : "") << columns_[i];
  s << '\n';
  for (const auto& r : cells_) {
    if (r.size() != columns_.size()) throw std::logic_error("csv row in table " + name_ + " is incomplete");
    for (std::size_t i = 0; i < r.size(); ++i) s << (i ? "," : "") << r[i];
    s << '\n';
  }
  return s.str();
}

namespace {

std::string escape_xml(const std::string& text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double map(double v, double a, double b) const {
    const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
    return a + t * (b - a);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (int e = static_cast<int>(std::ceil(lo - 1e-9)); e <= static_cast<int>(std::floor(hi + 1e-9)); ++e) {
        out.push_back(std::pow(10.0, e));
      }
      return out;
    }
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (const double f : {1.0, 2.0, 5.0, 10.0}) {
      if (f * mag >= raw) {
        step = f * mag;
        break;
      }
    }
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    return out;
  }
};

Axis make_axis(const std::vector<PlotSeries>& series, bool use_x, bool log) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    for (const double v : use_x ? s.x : s.y) {
      if (!std::isfinite(v) || (log && v <= 0.0)) continue;
      const double w = log ? std::log10(v) : v;
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    lo -= log ? 0.5 : std::max(1.0, std::abs(lo)) * 0.1;
    hi += log ? 0.5 : std::max(1.0, std::abs(hi)) * 0.1;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad, log};
}

}  // namespace

std::string SvgPlot::render(int width, int height) const {
  const double left = 70, right = width - 20.0, top = 40, bottom = height - 60.0;
  const Axis ax = make_axis(series, true, log_x);
  const Axis ay = make_axis(series, false, log_y);
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 "
    << width << ' ' << height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << escape_xml(title) << "</text>\n";
  s << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(right - left) << "\" height=\""
    << num(bottom - top) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (const double t : ax.ticks()) {
    const double x = ax.map(t, left, right);
    s << "<line x1=\"" << num(x) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(x) << "\" y2=\"" << num(top)
      << "\" stroke=\"#dddddd\"/>\n";
    s << "<text x=\"" << num(x) << "\" y=\"" << num(bottom + 16) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"11\">"
      << tick_label(t) << "</text>\n";
  }
  for (const double t : ay.ticks()) {
    const double y = ay.map(t, bottom, top);
    s << "<line x1=\"" << num(left) << "\" y1=\"" << num(y) << "\" x2=\"" << num(right) << "\" y2=\"" << num(y)
      << "\" stroke=\"#dddddd\"/>\n";
    s << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
         "font-size=\"11\">"
      << tick_label(t) << "</text>\n";
  }
  s << "<text x=\"" << num(0.5 * (left + right)) << "\" y=\"" << height - 20
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape_xml(x_label) << "</text>\n";
  s << "<text x=\"16\" y=\"" << num(0.5 * (top + bottom)) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"13\" transform=\"rotate(-90 16 "
    << num(0.5 * (top + bottom)) << ")\">" << escape_xml(y_label) << "</text>\n";

  int legend_row = 0;
  for (const auto& ser : series) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < std::min(ser.x.size(), ser.y.size()); ++i) {
      const double x = ser.x[i];
      const double y = ser.y[i];
      if (!std::isfinite(x) || !std::isfinite(y) || (log_x && x <= 0.0) || (log_y && y <= 0.0)) continue;
      pts.emplace_back(ax.map(x, left, right), ay.map(y, bottom, top));
    }
    if (ser.line && pts.size() > 1) {
      s << "<polyline fill=\"none\" stroke=\"" << ser.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i) s << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
      s << "\"/>\n";
    }
    if (!ser.line || pts.size() <= 30) {
      for (const auto& [x, y] : pts) {
        s << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"2.5\" fill=\"" << ser.color << "\"/>\n";
      }
    }
    const double ly = top + 14 + 16 * legend_row++;
    s << "<rect x=\"" << num(right - 150) << "\" y=\"" << num(ly - 9) << "\" width=\"10\" height=\"10\" fill=\"" << ser.color
      << "\"/>\n";
    s << "<text x=\"" << num(right - 135) << "\" y=\"" << num(ly) << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << escape_xml(ser.label) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace bemspectra
