// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MRCAP_PLOT_HPP
#define MRCAP_PLOT_HPP

#include <string>
#include <vector>

#include "power.hpp"

namespace mrcap {

// One labelled trace: a pair of curves (processor solid, dram dashed).
struct PlotSeries {
  std::string label;  // e.g. "group_by_key cap=140"
  PowerTrace trace;
};

// Self-contained SVG, no external tooling. Output bytes are deterministic
// for identical inputs. An input with no samples at all yields a
// placeholder plot with a warning annotation.
std::string render_power_plot_svg(const std::vector<PlotSeries>& series);

void render_power_plot_file(const std::vector<PlotSeries>& series,
                            const std::string& out_path);

// Collects rep-1 trace files written by run_matrix from a directory
// (trace_<app>_u<U>_cap<C>_rep1.csv), labelled "<app> u=<U> cap=<C>",
// sorted by file name. Optional app filter.
std::vector<PlotSeries> collect_plot_series(const std::string& trace_dir,
                                            const std::string& app_filter = "");

}  // namespace mrcap

#endif
