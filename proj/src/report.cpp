#include "conelab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "conelab/error.hpp"

namespace conelab::report {

namespace fs = std::filesystem;

fs::path prepare_output_dir(const std::string& output_dir) {
  fs::path dir(output_dir);
  if (const char* root = std::getenv("CONELAB_OUTPUT_ROOT"); root && *root && dir.is_relative()) dir = fs::path(root) / dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorCode::io, "cannot create output directory '" + dir.string() + "'");
  return dir;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
  f << content;
  if (!f) fail(ErrorCode::io, "write failed for '" + path.string() + "'");
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  char buf[40];
  for (const auto& row : rows) {
    if (row.size() != header.size()) fail(ErrorCode::internal, "csv row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
  write_text(path, out.str());
}

namespace {

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string svg_line_chart(const ChartSpec& spec, const std::vector<Series>& series) {
  const double W = 640, H = 420, ml = 80, mr = 20, mt = 40, mb = 60;
  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0) && (!spec.log_y || y > 0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 <= 0) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 <= 1e-300 * std::max(1.0, std::abs(y0))) {
    const double pad = std::max(1e-12, std::abs(y0) * 1e-6);
    y0 -= pad;
    y1 += pad;
  }
  auto px = [&](double v) { return ml + (v - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double v) { return H - mb - (v - y0) / (y1 - y0) * (H - mt - mb); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(spec.title) << "</text>\n";
  o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\"" << H - mt - mb
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    const double xl = spec.log_x ? std::pow(10.0, xv) : xv, yl = spec.log_y ? std::pow(10.0, yv) : yv;
    o << "<line x1=\"" << px(xv) << "\" y1=\"" << H - mb << "\" x2=\"" << px(xv) << "\" y2=\"" << H - mb + 5
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - mb + 18 << "\" text-anchor=\"middle\">" << num(xl) << "</text>\n";
    o << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << ml << "\" y2=\"" << py(yv)
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << num(yl) << "</text>\n";
  }
  o << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">" << escape(spec.x_label)
    << (spec.log_x ? " (log)" : "") << "</text>\n";
  o << "<text transform=\"translate(18," << (mt + H - mb) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(spec.y_label) << (spec.log_y ? " (log)" : "") << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* col = colors[s % 6];
    o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    const auto& se = series[s];
    for (std::size_t i = 0; i < std::min(se.x.size(), se.y.size()); ++i)
      if (usable(se.x[i], se.y[i])) o << px(tx(se.x[i])) << "," << py(ty(se.y[i])) << " ";
    o << "\"/>\n";
    o << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 16 + 15 * s << "\" fill=\"" << col << "\">" << escape(se.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace conelab::report
