// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "miniapps.hpp"

#include "error.hpp"

namespace mrcap {

const char* miniapp_name(MiniApp app) {
  switch (app) {
    case MiniApp::MapShuffle: return "map_shuffle";
    case MiniApp::GroupByKey: return "group_by_key";
    case MiniApp::ReduceByKey: return "reduce_by_key";
  }
  return "?";
}

std::optional<MiniApp> miniapp_from_name(const std::string& name) {
  if (name == "map_shuffle") return MiniApp::MapShuffle;
  if (name == "group_by_key") return MiniApp::GroupByKey;
  if (name == "reduce_by_key") return MiniApp::ReduceByKey;
  return std::nullopt;
}

std::vector<MiniApp> all_miniapps() {
  return {MiniApp::MapShuffle, MiniApp::GroupByKey, MiniApp::ReduceByKey};
}

PipelineConfig miniapp_config(MiniApp app, std::uint32_t ranks,
                              std::uint64_t buffer_capacity_kvs) {
  PipelineConfig cfg;
  cfg.num_ranks = ranks;
  cfg.buffer_capacity_kvs = buffer_capacity_kvs;
  switch (app) {
    case MiniApp::MapShuffle:
      cfg.combiner_enabled = false;
      cfg.run_reduce = false;
      break;
    case MiniApp::GroupByKey:
      cfg.combiner_enabled = false;
      cfg.run_reduce = true;
      break;
    case MiniApp::ReduceByKey:
      cfg.combiner_enabled = true;
      cfg.run_reduce = true;
      break;
  }
  return cfg;
}

AppResult run_app(MiniApp app, const DatasetSpec& spec, std::uint32_t ranks,
                  std::uint64_t buffer_capacity_kvs) {
  const PipelineConfig cfg = miniapp_config(app, ranks, buffer_capacity_kvs);
  PipelineResult run = run_pipeline(cfg, spec);

  AppResult result;
  result.metrics = run.metrics;
  if (cfg.run_reduce) {
    std::map<std::string, std::uint64_t> counts;
    for (const auto& rank_kvs : run.per_rank_output)
      for (const KeyValue& kv : rank_kvs) counts[kv.key] += kv.value;
    result.counts = std::move(counts);
  } else {
    result.metrics.reduce_ms = 0;
  }
  return result;
}

double movement_reduction(const DatasetSpec& spec, std::uint32_t ranks,
                          std::uint64_t buffer_capacity_kvs) {
  const std::uint64_t gbk =
      run_app(MiniApp::GroupByKey, spec, ranks, buffer_capacity_kvs)
          .metrics.shuffle_kv_count;
  const std::uint64_t rbk =
      run_app(MiniApp::ReduceByKey, spec, ranks, buffer_capacity_kvs)
          .metrics.shuffle_kv_count;
  if (rbk == 0)
    throw Error(ErrorKind::Internal,
                "movement_reduction: zero combined shuffle volume");
  return static_cast<double>(gbk) / static_cast<double>(rbk);
}

}  // namespace mrcap
