// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "experiment.hpp"

namespace mrcap {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 800, kHeight = 480;
constexpr double kLeft = 64, kRight = 180, kTop = 28, kBottom = 48;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Round the axis limit up to 1/2/5 x 10^k.
double nice_limit(double v) {
  if (v <= 0) return 1;
  const double mag = std::pow(10, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (v <= m * mag) return m * mag;
  return 10 * mag;
}

struct Curve {
  std::vector<std::pair<double, double>> pts;  // (t_s, watts)
};

void append_polyline(std::ostringstream& svg, const Curve& c,
                     const char* color, bool dashed, double x_max,
                     double y_max) {
  if (c.pts.empty()) return;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  svg << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.8\"";
  if (dashed) svg << " stroke-dasharray=\"5,3\"";
  svg << " points=\"";
  for (const auto& [t, w] : c.pts) {
    const double x = kLeft + (x_max > 0 ? t / x_max : 0) * plot_w;
    const double y = kHeight - kBottom - (y_max > 0 ? w / y_max : 0) * plot_h;
    svg << num(x) << ',' << num(y) << ' ';
  }
  svg << "\"/>\n";
}

}  // namespace

std::string render_power_plot_svg(const std::vector<PlotSeries>& series) {
  struct Pair {
    std::string label;
    Curve proc, dram;
  };
  std::vector<Pair> pairs;
  double x_max = 0, y_max = 0;
  for (const PlotSeries& s : series) {
    Pair p;
    p.label = s.label;
    for (const PowerSample& sm : s.trace.samples) {
      const double t_s = sm.t_ms / 1000.0;
      (sm.domain == PowerDomain::Processor ? p.proc : p.dram)
          .pts.emplace_back(t_s, sm.watts);
      x_max = std::max(x_max, t_s);
      y_max = std::max(y_max, sm.watts);
    }
    pairs.push_back(std::move(p));
  }
  const bool empty = x_max == 0 && y_max == 0;
  x_max = nice_limit(x_max);
  y_max = nice_limit(y_max);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n"
      << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
      << num(plot_w) << "\" height=\"" << num(plot_h)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";

  // axis ticks
  for (int i = 0; i <= 5; ++i) {
    const double fx = i / 5.0;
    const double x = kLeft + fx * plot_w;
    const double y = kHeight - kBottom - fx * plot_h;
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(kHeight - kBottom)
        << "\" x2=\"" << num(x) << "\" y2=\""
        << num(kHeight - kBottom + 5) << "\" stroke=\"#333\"/>\n"
        << "<text x=\"" << num(x) << "\" y=\"" << num(kHeight - kBottom + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << num(fx * x_max)
        << "</text>\n"
        << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(y)
        << "\" x2=\"" << num(kLeft) << "\" y2=\"" << num(y)
        << "\" stroke=\"#333\"/>\n"
        << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(fx * y_max)
        << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\""
      << num(kHeight - 12)
      << "\" font-size=\"13\" text-anchor=\"middle\">time (s)</text>\n"
      << "<text x=\"16\" y=\"" << num(kTop + plot_h / 2)
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 "
         "16 "
      << num(kTop + plot_h / 2) << ")\">power (W)</text>\n";

  if (empty) {
    svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\""
        << num(kTop + plot_h / 2)
        << "\" font-size=\"14\" fill=\"#b00\" text-anchor=\"middle\">"
           "warning: no power samples to plot</text>\n</svg>\n";
    return svg.str();
  }

  double legend_y = kTop + 10;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const char* color = kPalette[i % kPaletteSize];
    append_polyline(svg, pairs[i].proc, color, false, x_max, y_max);
    append_polyline(svg, pairs[i].dram, color, true, x_max, y_max);
    const double lx = kWidth - kRight + 12;
    svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(legend_y)
        << "\" x2=\"" << num(lx + 22) << "\" y2=\"" << num(legend_y)
        << "\" stroke=\"" << color << "\" stroke-width=\"1.8\"/>\n"
        << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(legend_y + 4)
        << "\" font-size=\"11\">" << pairs[i].label << " proc</text>\n";
    legend_y += 16;
    svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(legend_y)
        << "\" x2=\"" << num(lx + 22) << "\" y2=\"" << num(legend_y)
        << "\" stroke=\"" << color
        << "\" stroke-width=\"1.8\" stroke-dasharray=\"5,3\"/>\n"
        << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(legend_y + 4)
        << "\" font-size=\"11\">" << pairs[i].label << " dram</text>\n";
    legend_y += 20;
  }
  svg << "</svg>\n";
  return svg.str();
}

void render_power_plot_file(const std::vector<PlotSeries>& series,
                            const std::string& out_path) {
  const std::string svg = render_power_plot_svg(series);
  std::ofstream out(out_path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + out_path);
  out << svg;
  if (!out) throw Error(ErrorKind::Io, "write failed: " + out_path);
}

std::vector<PlotSeries> collect_plot_series(const std::string& trace_dir,
                                            const std::string& app_filter) {
  std::error_code ec;
  if (!fs::is_directory(trace_dir, ec))
    throw Error(ErrorKind::Io, "trace directory not found: " + trace_dir);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(trace_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("trace_", 0) != 0) continue;
    if (name.find("_rep1.csv") == std::string::npos) continue;
    if (!app_filter.empty() && name.find(app_filter) == std::string::npos)
      continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<PlotSeries> series;
  for (const fs::path& f : files) {
    // trace_<app>_u<U>_cap<C>_rep1.csv -> "<app> u=<U> cap=<C>"
    std::string stem = f.stem().string().substr(6);
    const auto rep_pos = stem.rfind("_rep");
    if (rep_pos != std::string::npos) stem = stem.substr(0, rep_pos);
    const auto cap_pos = stem.rfind("_cap");
    const auto u_pos = stem.rfind("_u", cap_pos == std::string::npos
                                            ? std::string::npos
                                            : cap_pos - 1);
    std::string label = stem;
    if (cap_pos != std::string::npos && u_pos != std::string::npos) {
      label = stem.substr(0, u_pos) + " u=" +
              stem.substr(u_pos + 2, cap_pos - u_pos - 2) +
              " cap=" + stem.substr(cap_pos + 4);
    }
    series.push_back(PlotSeries{label, read_trace_csv(f.string())});
  }
  return series;
}

}  // namespace mrcap
