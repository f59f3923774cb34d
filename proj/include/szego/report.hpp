#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"
#include "parallel.hpp"

namespace szego {

inline constexpr const char* kToolVersion = "szego_rg 0.1.0";

inline std::string fmt17(double x) { return cfg::fmt(x); }

// Rows are flushed as they are written so a run that dies midway keeps its prefix.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header) : out_(path), cols_(header.size()) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    write(header);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != cols_) throw std::logic_error("csv row has " + std::to_string(cells.size()) + " cells, header has " + std::to_string(cols_));
    write(cells);
  }

 private:
  void write(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
    out_.flush();
  }

  std::ofstream out_;
  std::size_t cols_;
};

inline std::string xml_escape(const std::string& s) {
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

struct LogLogPlot {
  std::string title, xlabel, ylabel;
  std::vector<double> x, y;
  bool has_fit = false;
  double slope = 0, intercept = 0;  // log y = intercept + slope log x
};

// points, decade ticks and an optional fitted line on log-log axes
inline std::string render_svg(const LogLogPlot& p) {
  const double W = 640, H = 480, ml = 80, mr = 20, mt = 40, mb = 60;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < p.x.size(); ++i)
    if (p.x[i] > 0 && p.y[i] > 0 && std::isfinite(p.x[i]) && std::isfinite(p.y[i])) {
      lx.push_back(std::log10(p.x[i]));
      ly.push_back(std::log10(p.y[i]));
    }
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!lx.empty()) {
    x0 = std::floor(*std::min_element(lx.begin(), lx.end()));
    x1 = std::ceil(*std::max_element(lx.begin(), lx.end()));
    y0 = std::floor(*std::min_element(ly.begin(), ly.end()));
    y1 = std::ceil(*std::max_element(ly.begin(), ly.end()));
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
  }
  auto px = [&](double v) { return ml + (v - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double v) { return H - mb - (v - y0) / (y1 - y0) * (H - mt - mb); };
  auto num = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2f", v);
    return std::string(b);
  };

  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  s += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" + xml_escape(p.title) + "</text>\n";
  s += "<line x1=\"" + num(ml) + "\" y1=\"" + num(H - mb) + "\" x2=\"" + num(W - mr) + "\" y2=\"" + num(H - mb) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) + "\" y2=\"" + num(H - mb) + "\" stroke=\"black\"/>\n";
  for (double d = x0; d <= x1 + 1e-9; d += 1)
    s += "<text x=\"" + num(px(d)) + "\" y=\"" + num(H - mb + 18) + "\" text-anchor=\"middle\" font-size=\"12\">1e" +
         std::to_string(int(d)) + "</text>\n";
  for (double d = y0; d <= y1 + 1e-9; d += 1)
    s += "<text x=\"" + num(ml - 8) + "\" y=\"" + num(py(d) + 4) + "\" text-anchor=\"end\" font-size=\"12\">1e" + std::to_string(int(d)) +
         "</text>\n";
  s += "<text x=\"" + num((ml + W - mr) / 2) + "\" y=\"" + num(H - 16) + "\" text-anchor=\"middle\" font-size=\"14\">" +
       xml_escape(p.xlabel) + "</text>\n";
  s += "<text x=\"18\" y=\"" + num((mt + H - mb) / 2) + "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 " +
       num((mt + H - mb) / 2) + ")\">" + xml_escape(p.ylabel) + "</text>\n";
  if (p.has_fit && !lx.empty()) {
    const double a = *std::min_element(lx.begin(), lx.end()), b = *std::max_element(lx.begin(), lx.end());
    const double ya = (p.intercept + p.slope * a * std::log(10.0)) / std::log(10.0);
    const double yb = (p.intercept + p.slope * b * std::log(10.0)) / std::log(10.0);
    s += "<line x1=\"" + num(px(a)) + "\" y1=\"" + num(py(ya)) + "\" x2=\"" + num(px(b)) + "\" y2=\"" + num(py(yb)) +
         "\" stroke=\"steelblue\" stroke-dasharray=\"6 4\"/>\n";
  }
  for (std::size_t i = 0; i < lx.size(); ++i)
    s += "<circle cx=\"" + num(px(lx[i])) + "\" cy=\"" + num(py(ly[i])) + "\" r=\"4\" fill=\"firebrick\"/>\n";
  s += "</svg>\n";
  return s;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

inline std::string iso_utc(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char b[32];
  std::strftime(b, sizeof b, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return b;
}

// resolved config echo plus version and timing, kept apart from the CSV payload
inline void write_run_metadata(const std::filesystem::path& dir, const std::string& command, const RunConfig& c,
                               std::chrono::system_clock::time_point start, std::chrono::system_clock::time_point end, int exit_code,
                               const std::vector<std::string>& notes = {}) {
  write_text(dir / "config.resolved.ini", emit_config(c));
  std::string m;
  m += "tool_version = " + std::string(kToolVersion) + "\n";
  m += "command = " + command + "\n";
  m += "started_utc = " + iso_utc(start) + "\n";
  m += "finished_utc = " + iso_utc(end) + "\n";
  m += "wall_seconds = " + fmt17(std::chrono::duration<double>(end - start).count()) + "\n";
  m += "threads = " + std::to_string(worker_count()) + "\n";
  m += "exit_code = " + std::to_string(exit_code) + "\n";
  for (auto& n : notes) m += "note = " + n + "\n";
  write_text(dir / "run_meta.txt", m);
}

}  // namespace szego
