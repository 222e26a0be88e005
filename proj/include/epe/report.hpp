#pragma once

/// \file report.hpp
/// Study output: CSV (fixed header), markdown tables and an SVG log-log plot.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "epe/studies.hpp"

namespace epe {

inline constexpr std::string_view kCsvHeader =
    "scheme,n,h,tau,err_E_L2,err_H_L2,err_u_L2,err_u_H1,err_p_L2,"
    "ord_E_L2,ord_H_L2,ord_u_L2,ord_u_H1,ord_p_L2,t_assemble_s,t_factor_s,t_loop_s,t_total_s";

inline constexpr std::array<std::string_view, 5> kErrorFields = {"E_L2", "H_L2", "u_L2", "u_H1", "p_L2"};

inline std::array<double, 5> as_array(const ErrorNorms& e) { return {e.E_L2, e.H_L2, e.u_L2, e.u_H1, e.p_L2}; }

inline ErrorNorms norms_from(const std::array<double, 5>& a) { return {a[0], a[1], a[2], a[3], a[4]}; }

namespace detail {

inline std::string fmt(double v, int digits = 15) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline std::string to_csv(const StudyReport& report) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& r : report.rows) {
    out << to_string(r.scheme) << ',' << r.n << ',' << detail::fmt(r.h) << ',' << detail::fmt(r.tau);
    for (double e : as_array(r.errors)) out << ',' << detail::fmt(e);
    for (std::size_t k = 0; k < 5; ++k) {
      out << ',';
      if (r.orders) out << detail::fmt(as_array(*r.orders)[k]);
    }
    out << ',' << detail::fmt(r.timings.assemble, 6) << ',' << detail::fmt(r.timings.factor, 6) << ','
        << detail::fmt(r.timings.loop, 6) << ',' << detail::fmt(r.timings.total(), 6) << '\n';
  }
  return out.str();
}

/// Parses text written by to_csv. The total-time column is recomputed from
/// the phases and ignored. The study kind is not stored and is left Spatial.
inline StudyReport parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw IoError("CSV header does not match the study schema");
  StudyReport report;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 18) throw IoError("CSV line " + std::to_string(lineno) + ": expected 18 cells");
    try {
      StudyRow r;
      r.scheme = parse_scheme(cells[0]);
      r.n = std::stoi(cells[1]);
      r.h = std::stod(cells[2]);
      r.tau = std::stod(cells[3]);
      std::array<double, 5> e{}, o{};
      for (std::size_t k = 0; k < 5; ++k) e[k] = std::stod(cells[4 + k]);
      r.errors = norms_from(e);
      if (!cells[9].empty()) {
        for (std::size_t k = 0; k < 5; ++k) o[k] = std::stod(cells[9 + k]);
        r.orders = norms_from(o);
      }
      r.timings = {std::stod(cells[14]), std::stod(cells[15]), std::stod(cells[16])};
      report.rows.push_back(r);
    } catch (const std::logic_error&) {
      throw IoError("CSV line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return report;
}

inline std::string to_markdown(const StudyReport& report) {
  std::ostringstream out;
  auto sci = [](double v) { return detail::fmt(v, 5); };
  auto ord = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  if (report.kind == StudyKind::Benchmark) {
    out << "| h | splitting total (s) | monolithic total (s) | speedup |\n";
    out << "|---|---:|---:|---:|\n";
    std::vector<int> ns;
    for (const auto& r : report.rows)
      if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
    for (int n : ns) {
      double ts = NAN, tm = NAN;
      for (const auto& r : report.rows)
        if (r.n == n) (r.scheme == Scheme::Splitting ? ts : tm) = r.timings.total();
      const auto s = speedup(report, n);
      out << "| 1/" << n << " | " << ord(ts) << " | " << ord(tm) << " | " << (s ? ord(*s) : std::string("-"))
          << " |\n";
    }
    out << "\nconfig fingerprints " << (report.fingerprints_match() ? "match" : "DIFFER");
    if (!report.rows.empty()) out << " (" << report.rows.front().fingerprint << ")";
    out << '\n';
    return out.str();
  }
  const bool temporal = report.kind == StudyKind::Temporal;
  out << "| scheme | " << (temporal ? "tau" : "h");
  for (auto f : kErrorFields) out << " | err " << f << " | order";
  out << " |\n|---|---";
  for (std::size_t k = 0; k < kErrorFields.size(); ++k) out << "|---:|---:";
  out << "|\n";
  for (const auto& r : report.rows) {
    out << "| " << to_string(r.scheme) << " | " << (temporal ? sci(r.tau) : "1/" + std::to_string(r.n));
    const auto e = as_array(r.errors);
    for (std::size_t k = 0; k < 5; ++k)
      out << " | " << sci(e[k]) << " | " << (r.orders ? ord(as_array(*r.orders)[k]) : std::string("-"));
    out << " |\n";
  }
  return out.str();
}

/// Log-log plot of every error field against h (or tau for temporal
/// studies), one polyline per field, plus slope-1 and slope-2 guides.
inline std::string to_svg(const StudyReport& report) {
  if (report.rows.empty()) throw ValidationError("cannot plot an empty report");
  const bool temporal = report.kind == StudyKind::Temporal;
  std::vector<const StudyRow*> rows;
  for (const auto& r : report.rows)
    if (r.scheme == report.rows.front().scheme) rows.push_back(&r);
  auto xval = [&](const StudyRow& r) { return temporal ? r.tau : r.h; };

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto* r : rows) {
    xmin = std::min(xmin, std::log10(xval(*r)));
    xmax = std::max(xmax, std::log10(xval(*r)));
    for (double e : as_array(r->errors)) {
      if (!(e > 0.0)) continue;
      ymin = std::min(ymin, std::log10(e));
      ymax = std::max(ymax, std::log10(e));
    }
  }
  if (!(xmax > xmin)) xmin -= 0.5, xmax += 0.5;
  if (!(ymax > ymin)) ymin -= 0.5, ymax += 0.5;
  const double pad_x = 0.05 * (xmax - xmin), pad_y = 0.05 * (ymax - ymin);
  xmin -= pad_x, xmax += pad_x, ymin -= pad_y, ymax += pad_y;

  const double W = 640, Hgt = 480, left = 70, right = 150, top = 20, bottom = 50;
  auto px = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * (W - left - right); };
  auto py = [&](double ly) { return top + (ymax - ly) / (ymax - ymin) * (Hgt - top - bottom); };

  static constexpr std::array<const char*, 5> colors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hgt << "\" viewBox=\"0 0 "
      << W << ' ' << Hgt << "\">\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right << "\" height=\""
      << Hgt - top - bottom << "\" fill=\"none\" stroke=\"#888\"/>\n";
  out << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << Hgt - 15 << "\" text-anchor=\"middle\">log10 "
      << (temporal ? "tau" : "h") << "</text>\n";
  out << "<text x=\"15\" y=\"" << (top + Hgt - bottom) / 2 << "\" transform=\"rotate(-90 15 "
      << (top + Hgt - bottom) / 2 << ")\" text-anchor=\"middle\">log10 error</text>\n";

  for (std::size_t k = 0; k < 5; ++k) {
    out << "<polyline class=\"series\" data-field=\"" << kErrorFields[k] << "\" fill=\"none\" stroke=\""
        << colors[k] << "\" stroke-width=\"2\" points=\"";
    for (const auto* r : rows) {
      const double e = as_array(r->errors)[k];
      if (e > 0.0) out << px(std::log10(xval(*r))) << ',' << py(std::log10(e)) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << W - right + 10 << "\" y=\"" << top + 20 + 18 * k << "\" fill=\"" << colors[k] << "\">"
        << kErrorFields[k] << "</text>\n";
  }
  // Guides anchored at the smallest-x point of the lowest series.
  const double x0 = xmin + pad_x, x1 = xmax - pad_x;
  const double y0 = ymin + pad_y;
  for (int slope : {1, 2}) {
    out << "<polyline class=\"guide\" data-slope=\"" << slope
        << "\" fill=\"none\" stroke=\"#555\" stroke-dasharray=\"6,4\" points=\"" << px(x0) << ',' << py(y0) << ' '
        << px(x1) << ',' << py(y0 + slope * (x1 - x0)) << "\"/>\n";
    out << "<text x=\"" << W - right + 10 << "\" y=\"" << top + 20 + 18 * (5 + slope) << "\" fill=\"#555\">slope "
        << slope << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

namespace detail {
inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
}
}  // namespace detail

/// Writes <stem>.csv, <stem>.md and <stem>.svg into `dir` (created if needed).
inline std::vector<std::filesystem::path> emit_report(const StudyReport& report, const std::filesystem::path& dir,
                                                      const std::string& stem) {
  if (report.rows.empty()) throw ValidationError("cannot emit an empty report");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  const std::vector<std::filesystem::path> paths = {dir / (stem + ".csv"), dir / (stem + ".md"),
                                                    dir / (stem + ".svg")};
  detail::write_text(paths[0], to_csv(report));
  detail::write_text(paths[1], to_markdown(report));
  detail::write_text(paths[2], to_svg(report));
  return paths;
}

}  // namespace epe
