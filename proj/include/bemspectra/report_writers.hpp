#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bemspectra {

inline constexpr int kCsvSchemaVersion = 1;

/// CSV table with a leading "# bemspectra-csv schema=<v> table=<name>" line.
/// Doubles are written in shortest round-trip form so reruns are byte-identical.
class CsvTable {
 public:
  CsvTable(std::string name, std::vector<std::string> columns);

  CsvTable& row();
  CsvTable& add(const std::string& text);
  CsvTable& add(const char* text) { return add(std::string(text)); }
  CsvTable& add(double value);
  CsvTable& add(int value);
  CsvTable& add(long value);
  CsvTable& add(bool value);

  std::string render() const;
  std::size_t rows() const { return cells_.size(); }

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> cells_;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool line = true;
  std::string color = "#1f77b4";
};

/// Minimal static SVG line/scatter plot with optional log axes.
struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<PlotSeries> series;

  std::string render(int width = 640, int height = 440) const;
};

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace bemspectra
