#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace conelab::report {

inline constexpr int kSchemaVersion = 1;

/// Resolves the output directory; a relative path is placed under
/// $CONELAB_OUTPUT_ROOT when that variable is set. Creates the directory.
std::filesystem::path prepare_output_dir(const std::string& output_dir);

void write_text(const std::filesystem::path& path, const std::string& content);

/// Header row first, then one row per entry; doubles printed round-trip exact.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Static SVG line chart; non-finite points are skipped.
std::string svg_line_chart(const ChartSpec& spec, const std::vector<Series>& series);

}  // namespace conelab::report
