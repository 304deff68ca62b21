// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MRCAP_MINIAPPS_HPP
#define MRCAP_MINIAPPS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "runtime.hpp"

namespace mrcap {

// The three wordcount-derived mini-apps. All are configurations of the same
// pipeline so their runs stay directly comparable:
//   map_shuffle:   combiner off, reduce off
//   group_by_key:  combiner off, reduce on
//   reduce_by_key: combiner on,  reduce on
enum class MiniApp { MapShuffle, GroupByKey, ReduceByKey };

const char* miniapp_name(MiniApp app);
std::optional<MiniApp> miniapp_from_name(const std::string& name);
std::vector<MiniApp> all_miniapps();

PipelineConfig miniapp_config(MiniApp app, std::uint32_t ranks,
                              std::uint64_t buffer_capacity_kvs);

struct AppResult {
  // Absent for map_shuffle (no reduce output).
  std::optional<std::map<std::string, std::uint64_t>> counts;
  RunMetrics metrics;
};

AppResult run_app(MiniApp app, const DatasetSpec& spec, std::uint32_t ranks,
                  std::uint64_t buffer_capacity_kvs);

// shuffle_kv_count(group_by_key) / shuffle_kv_count(reduce_by_key) for
// identical inputs; >= 1, and > 1 whenever any chunk repeats a word.
double movement_reduction(const DatasetSpec& spec, std::uint32_t ranks,
                          std::uint64_t buffer_capacity_kvs);

}  // namespace mrcap

#endif
