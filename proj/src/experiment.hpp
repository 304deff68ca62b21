// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MRCAP_EXPERIMENT_HPP
#define MRCAP_EXPERIMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "miniapps.hpp"
#include "power.hpp"

namespace mrcap {

enum class BackendKind { Sim, Rapl };

struct ExperimentConfig {
  std::vector<MiniApp> apps = all_miniapps();
  DatasetSpec spec;
  // When set, one sweep point per value replaces spec.unique_words.
  std::vector<std::uint64_t> unique_words_sweep;
  std::uint32_t ranks = 4;
  std::uint64_t buffer_capacity_kvs = 4096;
  std::vector<PowerCap> caps = {PowerCap::unlimited()};
  BackendKind backend = BackendKind::Sim;
  std::optional<std::string> sim_model_path;
  std::optional<std::string> powercap_root;  // rapl fixture override
  std::uint32_t reps = 3;
  double sample_ms = 100;
  std::string csv_path = "results.csv";
  std::optional<std::string> trace_dir;
  bool sampler_enabled = true;

  void validate() const;
};

// One CSV row per (app, unique_words, cap, rep), in that loop order.
struct ResultRow {
  std::string app;
  std::string backend;
  std::uint64_t total_words = 0;
  std::uint64_t unique_words = 0;
  std::uint64_t seed = 0;
  std::uint32_t ranks = 0;
  std::string cap_w;  // "none" or watts
  std::uint32_t rep = 0;
  double runtime_ms = 0;
  double map_ms = 0;
  double shuffle_ms = 0;
  double reduce_ms = 0;
  double proc_energy_j = 0;
  double dram_energy_j = 0;
  double dram_fraction = 0;
  std::uint64_t shuffle_kvs = 0;
  std::uint64_t shuffle_bytes = 0;
  std::uint64_t flush_count = 0;
  double avg_fill_ratio = 0;
};

std::string cap_label(const PowerCap& cap);  // "none" / "140"
std::string result_csv_header();             // without the schema comment

// Executes the full (app x unique_words x cap x rep) matrix sequentially,
// writes the CSV (first line "# schema=1") and one trace file per run when
// trace_dir is set. The first rep's trace is the one plots pick up.
// Per-cell workload failures are reported on stderr and skipped; a backend
// capability failure aborts before any cell runs.
std::vector<ResultRow> run_matrix(const ExperimentConfig& cfg);

std::vector<ResultRow> read_result_csv(const std::string& path);
void write_result_csv(const std::string& path,
                      const std::vector<ResultRow>& rows);

// Per (dataset, cap) comparisons of the three apps, medians over reps.
struct SummaryRow {
  std::uint64_t total_words = 0;
  std::uint64_t unique_words = 0;
  std::uint64_t seed = 0;
  std::uint32_t ranks = 0;
  std::string cap_w;
  // Absent when the comparator rows are missing.
  std::optional<double> reduce_overhead_runtime_pct;  // (GBK-MS)/MS
  std::optional<double> reduce_overhead_energy_pct;
  std::optional<double> combiner_savings_runtime_pct;  // (GBK-RBK)/GBK
  std::optional<double> combiner_savings_energy_pct;
  std::optional<double> joules_saved;  // E_GBK - E_RBK
  std::optional<double> movement_reduction;
  double dram_fraction_min = 0;
  double dram_fraction_max = 0;
};

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
std::string format_summary(const std::vector<SummaryRow>& rows);

// Trace file I/O ("# interval_ms=..." comment + "t_ms,domain,watts" rows).
void write_trace_csv(const std::string& path, const PowerTrace& trace);
PowerTrace read_trace_csv(const std::string& path);

}  // namespace mrcap

#endif
