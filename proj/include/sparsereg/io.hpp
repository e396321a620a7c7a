#pragma once

// Plain-text formats: numeric CSV (comma or whitespace separated), key-value parameter files
// (JSON object or `key = value` lines) and a minimal SVG line chart.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sparsereg/core.hpp"

namespace sparsereg {

/// Decimal with 12 significant digits; non-finite values as inf, -inf, nan.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Splits on commas when present, otherwise on whitespace.
inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  if (line.find(',') != std::string::npos) {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
  } else {
    std::stringstream ss(line);
    std::string field;
    while (ss >> field) out.push_back(field);
  }
  return out;
}

inline bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  if (text == "inf" || text == "Inf") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  if (text == "-inf" || text == "-Inf") {
    out = -std::numeric_limits<double>::infinity();
    return true;
  }
  try {
    std::size_t used = 0;
    out = std::stod(text, &used);
    return used == text.size();
  } catch (const std::exception&) {
    return false;
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::IoError, "cannot open '" + path + "'");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::IoError, "cannot write '" + path + "'");
  return out;
}

}  // namespace detail

/// Rows of string fields, blank lines and lines starting with '#' skipped.
inline std::vector<std::vector<std::string>> read_fields(const std::string& path) {
  auto in = detail::open_input(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    rows.push_back(detail::split_fields(t));
  }
  return rows;
}

/// Numeric table. When allow_header is set, a first row that is not fully numeric is skipped.
inline Matrix read_numeric_table(const std::string& path, bool allow_header = false) {
  auto rows = read_fields(path);
  std::size_t first = 0;
  if (allow_header && !rows.empty()) {
    double v = 0.0;
    for (const auto& f : rows[0]) {
      if (!detail::parse_double(f, v)) {
        first = 1;
        break;
      }
    }
  }
  detail::require(rows.size() > first, ErrorKind::EmptyDataset, "'" + path + "' contains no data rows");
  const std::size_t cols = rows[first].size();
  Matrix m(static_cast<Eigen::Index>(rows.size() - first), static_cast<Eigen::Index>(cols));
  for (std::size_t r = first; r < rows.size(); ++r) {
    detail::require(rows[r].size() == cols, ErrorKind::ParseError,
                    path + ": row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                        " fields, expected " + std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) {
      double v = 0.0;
      detail::require(detail::parse_double(rows[r][c], v), ErrorKind::ParseError,
                      path + ": row " + std::to_string(r + 1) + ", column " + std::to_string(c + 1) +
                          ": not a number '" + rows[r][c] + "'");
      m(static_cast<Eigen::Index>(r - first), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return m;
}

inline Matrix read_matrix_csv(const std::string& path) { return read_numeric_table(path); }

/// One value per line, or a single row of values.
inline Vector read_vector_csv(const std::string& path) {
  const Matrix m = read_numeric_table(path);
  if (m.cols() == 1) return m.col(0);
  detail::require(m.rows() == 1, ErrorKind::ParseError, path + ": expected a single column or a single row");
  return m.row(0).transpose();
}

inline void write_matrix_csv(const std::string& path, const Matrix& m) {
  auto out = detail::open_output(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_number(m(i, j));
    out << '\n';
  }
}

inline void write_vector_csv(const std::string& path, const Vector& v) {
  auto out = detail::open_output(path);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_number(v(i)) << '\n';
}

/// Parameter file: a JSON object, or `key = value` / `key: value` lines with '#' comments.
/// Values are returned as strings; JSON numbers are formatted with format_number.
inline std::map<std::string, std::string> read_key_values(const std::string& path) {
  auto in = detail::open_input(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  std::map<std::string, std::string> out;
  if (detail::trim(text).rfind('{', 0) == 0) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      detail::fail(ErrorKind::ParseError, path + ": " + e.what());
    }
    detail::require(j.is_object(), ErrorKind::ParseError, path + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (value.is_string()) {
        out[key] = value.get<std::string>();
      } else if (value.is_number()) {
        out[key] = format_number(value.get<double>());
        if (value.is_number_integer()) out[key] = std::to_string(value.get<long long>());
      } else {
        out[key] = value.dump();
      }
    }
    return out;
  }
  std::stringstream ss(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto sep = line.find('=');
    if (sep == std::string::npos) sep = line.find(':');
    detail::require(sep != std::string::npos, ErrorKind::ParseError,
                    path + ": line " + std::to_string(number) + " is not 'key = value'");
    out[detail::trim(line.substr(0, sep))] = detail::trim(line.substr(sep + 1));
  }
  return out;
}

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Standalone SVG line chart, one polyline per series. Non-finite points are dropped.
inline std::string render_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                                     const std::vector<ChartSeries>& series, bool log_x) {
  constexpr double width = 720, height = 480, left = 80, right = 150, top = 40, bottom = 60;
  auto tx = [&](double x) { return log_x ? std::log10(x) : x; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (log_x && s.x[i] <= 0.0)) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << detail::xml_escape(title)
      << "</text>\n"
      << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0;
    const double fy = y0 + (y1 - y0) * i / 4.0;
    const double sx = left + pw * i / 4.0;
    const double sy = top + ph * (1.0 - i / 4.0);
    svg << "<text x=\"" << sx << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
        << format_number(log_x ? std::pow(10.0, fx) : fx).substr(0, 8) << "</text>\n"
        << "<text x=\"" << left - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
        << format_number(fy).substr(0, 8) << "</text>\n";
  }
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 16 << "\" text-anchor=\"middle\" font-size=\"13\">"
      << detail::xml_escape(x_label) << (log_x ? " (log scale)" : "") << "</text>\n"
      << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << top + ph / 2 << ")\">" << detail::xml_escape(y_label) << "</text>\n";
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = palette[si % 10];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (log_x && s.x[i] <= 0.0)) continue;
      svg << (first ? "" : " ") << px(s.x[i]) << ',' << py(s.y[i]);
      first = false;
    }
    svg << "\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(si + 1);
    svg << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">" << detail::xml_escape(s.label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace sparsereg
