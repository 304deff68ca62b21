// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MRCAP_RUNTIME_HPP
#define MRCAP_RUNTIME_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dataset.hpp"

namespace mrcap {

struct KeyValue {
  std::string key;
  std::uint64_t value = 0;

  bool operator==(const KeyValue&) const = default;
};

struct KeyMultiValue {
  std::string key;
  std::vector<std::uint64_t> values;
};

struct PipelineConfig {
  std::uint32_t num_ranks = 1;
  std::uint64_t buffer_capacity_kvs = 4096;  // per destination
  bool combiner_enabled = false;
  bool run_reduce = true;

  void validate() const;
};

struct RunMetrics {
  double map_ms = 0;
  double shuffle_ms = 0;  // combine (if any) + exchange
  double reduce_ms = 0;
  std::uint64_t shuffle_kv_count = 0;
  std::uint64_t shuffle_bytes = 0;
  std::uint64_t flush_count = 0;
  double avg_buffer_fill_ratio = 0;  // total kvs / (flushes * capacity)
};

using MapFn = std::function<void(const std::string& word,
                                 std::vector<KeyValue>& out)>;
using ReduceFn =
    std::function<std::uint64_t(std::uint64_t acc, std::uint64_t value)>;

// Wordcount: one (word, 1) per input word; values fold by addition.
MapFn wordcount_map();
ReduceFn wordcount_reduce();

// FNV-1a 64-bit hash of key, mod num_ranks. Fixed bit-exactly so shuffle
// volume and key placement reproduce across builds.
std::uint64_t fnv1a64(const std::string& key);
std::uint32_t partition(const std::string& key, std::uint32_t num_ranks);

std::vector<KeyValue> map_stage(const WordChunk& chunk, const MapFn& map_fn);

// Local pre-shuffle combiner: one KV per distinct key, values folded,
// keys in first-appearance order.
std::vector<KeyValue> combine_local(const std::vector<KeyValue>& kvs,
                                    const ReduceFn& reduce_fn);

// One KMV per distinct key (first-appearance order), values in arrival
// order. Hash-map iteration order never leaks into outputs.
std::vector<KeyMultiValue> group_by_key(const std::vector<KeyValue>& received);

std::vector<KeyValue> reduce_stage(const std::vector<KeyMultiValue>& kmvs,
                                   const ReduceFn& reduce_fn);

// All-to-all delivery. outboxes[src][dest] holds the KVs rank src sends to
// rank dest; every KV must satisfy partition(key, R) == dest. Delivery is
// per-(src,dest) FIFO, receivers concatenate in sender order, and flushes
// of at most buffer_capacity_kvs are accounted per pair (final flush may be
// partial).
struct ExchangeResult {
  std::vector<std::vector<KeyValue>> received;  // per destination rank
  std::uint64_t kv_count = 0;
  std::uint64_t bytes = 0;  // key_len + 8 per KV
  std::uint64_t flush_count = 0;
  double avg_fill_ratio = 0;
};
ExchangeResult exchange(
    const std::vector<std::vector<std::vector<KeyValue>>>& outboxes,
    const PipelineConfig& cfg);

// Full pipeline over R in-process worker threads:
//   map -> [combine] -> exchange -> [group_by_key -> reduce].
// Map+Shuffle mode (run_reduce=false) stops after delivery; received KVs
// are counted and discarded. Outputs and counted metrics are deterministic
// under any worker interleaving; wall times are not.
struct PipelineResult {
  std::vector<std::vector<KeyValue>> per_rank_output;
  RunMetrics metrics;
};
PipelineResult run_pipeline(const PipelineConfig& cfg,
                            const DatasetSpec& spec);

}  // namespace mrcap

#endif
