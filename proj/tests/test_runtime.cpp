// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "runtime.hpp"

#include <map>

#include <doctest.h>

#include "error.hpp"

using namespace mrcap;

namespace {

// Reference FNV-1a 64, written independently of the implementation under
// test (byte loop over explicit constants from the FNV spec).
std::uint64_t reference_fnv1a64(const std::string& s) {
  const std::uint64_t offset_basis = 14695981039346656037ull;
  const std::uint64_t prime = 1099511628211ull;
  std::uint64_t h = offset_basis;
  for (std::size_t i = 0; i < s.size(); ++i) {
    h = (h ^ static_cast<unsigned char>(s[i])) * prime;
  }
  return h;
}

std::map<std::string, std::uint64_t> global_counts(
    const PipelineResult& run) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& rank_kvs : run.per_rank_output)
    for (const KeyValue& kv : rank_kvs) counts[kv.key] += kv.value;
  return counts;
}

}  // namespace

TEST_CASE("partition is FNV-1a 64 mod R") {
  CHECK(partition("anything", 1) == 0);
  CHECK(partition("word", 8) == partition("word", 8));
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  for (const std::string& key : {"a", "aaaaaa", "zzzzzz", "hello", ""})
    for (std::uint32_t r : {1u, 2u, 4u, 7u})
      CHECK(partition(key, r) == reference_fnv1a64(key) % r);
}

TEST_CASE("map_stage emits one KV per word in order") {
  const WordChunk chunk{0, {"a", "b", "a"}};
  const auto kvs = map_stage(chunk, wordcount_map());
  CHECK(kvs == std::vector<KeyValue>{{"a", 1}, {"b", 1}, {"a", 1}});
  CHECK(map_stage(WordChunk{}, wordcount_map()).empty());
}

TEST_CASE("combine_local folds by key, first-appearance order") {
  const std::vector<KeyValue> kvs{{"a", 1}, {"b", 1}, {"a", 1}};
  CHECK(combine_local(kvs, wordcount_reduce()) ==
        std::vector<KeyValue>{{"a", 2}, {"b", 1}});
  CHECK(combine_local({}, wordcount_reduce()).empty());
  const std::vector<KeyValue> distinct{{"x", 1}, {"y", 2}, {"z", 3}};
  CHECK(combine_local(distinct, wordcount_reduce()) == distinct);
}

TEST_CASE("group_by_key keeps arrival order of values") {
  const auto kmvs = group_by_key({{"a", 1}, {"b", 1}, {"a", 1}});
  REQUIRE(kmvs.size() == 2);
  CHECK(kmvs[0].key == "a");
  CHECK(kmvs[0].values == std::vector<std::uint64_t>{1, 1});
  CHECK(kmvs[1].key == "b");
  CHECK(kmvs[1].values == std::vector<std::uint64_t>{1});
  CHECK(group_by_key({}).empty());
}

TEST_CASE("reduce_stage folds each KMV") {
  const auto out = reduce_stage({{"a", {1, 1}}, {"b", {1}}, {"c", {5}}},
                                wordcount_reduce());
  CHECK(out == std::vector<KeyValue>{{"a", 2}, {"b", 1}, {"c", 5}});
}

TEST_CASE("exchange: identity on one rank") {
  PipelineConfig cfg;
  cfg.num_ranks = 1;
  cfg.buffer_capacity_kvs = 10;
  std::vector<std::vector<std::vector<KeyValue>>> outboxes(1);
  outboxes[0].resize(1);
  outboxes[0][0] = {{"a", 1}, {"b", 1}};
  const ExchangeResult res = mrcap::exchange(outboxes, cfg);
  CHECK(res.received[0] == outboxes[0][0]);
  CHECK(res.kv_count == 2);
  CHECK(res.flush_count == 1);
}

TEST_CASE("exchange: flush accounting") {
  // 25 KVs to one destination at capacity 10: flushes of 10, 10, 5.
  PipelineConfig cfg;
  cfg.num_ranks = 1;
  cfg.buffer_capacity_kvs = 10;
  std::vector<std::vector<std::vector<KeyValue>>> outboxes(1);
  outboxes[0].resize(1);
  for (int i = 0; i < 25; ++i) outboxes[0][0].push_back({"k", 1});
  const ExchangeResult res = mrcap::exchange(outboxes, cfg);
  CHECK(res.flush_count == 3);
  CHECK(res.avg_fill_ratio == doctest::Approx(25.0 / 30.0));
  CHECK(res.bytes == 25 * (1 + 8));
}

TEST_CASE("exchange: cross delivery and misroute abort") {
  PipelineConfig cfg;
  cfg.num_ranks = 2;
  cfg.buffer_capacity_kvs = 4;
  // Keys that land on rank 0 and rank 1 under FNV-1a mod 2.
  std::string to0, to1;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::string key = vocabulary_word(i, 6);
    (partition(key, 2) == 0 ? to0 : to1) = key;
    if (!to0.empty() && !to1.empty()) break;
  }
  REQUIRE(!to0.empty());
  REQUIRE(!to1.empty());

  std::vector<std::vector<std::vector<KeyValue>>> outboxes(
      2, std::vector<std::vector<KeyValue>>(2));
  outboxes[0][1] = {{to1, 1}};
  outboxes[1][0] = {{to0, 1}};
  const ExchangeResult res = mrcap::exchange(outboxes, cfg);
  CHECK(res.received[0] == std::vector<KeyValue>{{to0, 1}});
  CHECK(res.received[1] == std::vector<KeyValue>{{to1, 1}});

  outboxes[0][1] = {{to0, 1}};  // misrouted
  CHECK_THROWS_AS(mrcap::exchange(outboxes, cfg), Error);
}

TEST_CASE("pipeline matches the brute-force oracle") {
  const DatasetSpec spec{20000, 500, 11, 6};
  const auto oracle = expected_counts(spec, 4);

  for (bool combiner : {false, true}) {
    PipelineConfig cfg;
    cfg.num_ranks = 4;
    cfg.buffer_capacity_kvs = 64;
    cfg.combiner_enabled = combiner;
    cfg.run_reduce = true;
    const PipelineResult run = run_pipeline(cfg, spec);
    CHECK(global_counts(run) == oracle);

    // Locality: every output key lives on its partition rank.
    for (std::uint32_t r = 0; r < 4; ++r)
      for (const KeyValue& kv : run.per_rank_output[r])
        CHECK(partition(kv.key, 4) == r);
  }
}

TEST_CASE("shuffle volume: N without combiner, bounded with") {
  const DatasetSpec spec{50000, 72, 3, 6};
  PipelineConfig cfg;
  cfg.num_ranks = 4;
  cfg.buffer_capacity_kvs = 256;

  cfg.combiner_enabled = false;
  const auto plain = run_pipeline(cfg, spec);
  CHECK(plain.metrics.shuffle_kv_count == spec.total_words);
  CHECK(plain.metrics.shuffle_bytes == spec.total_words * (6 + 8));

  cfg.combiner_enabled = true;
  const auto combined = run_pipeline(cfg, spec);
  std::uint64_t distinct_sum = 0;
  for (std::uint32_t r = 0; r < 4; ++r)
    distinct_sum += distinct_words(generate_chunk(spec, r, 4));
  CHECK(combined.metrics.shuffle_kv_count == distinct_sum);
  CHECK(combined.metrics.shuffle_kv_count <= 4 * spec.unique_words);
}

TEST_CASE("counted metrics are identical across repeated runs") {
  const DatasetSpec spec{30000, 1000, 8, 6};
  PipelineConfig cfg;
  cfg.num_ranks = 8;
  cfg.buffer_capacity_kvs = 100;
  const auto a = run_pipeline(cfg, spec);
  const auto b = run_pipeline(cfg, spec);
  CHECK(a.metrics.shuffle_kv_count == b.metrics.shuffle_kv_count);
  CHECK(a.metrics.flush_count == b.metrics.flush_count);
  CHECK(a.metrics.shuffle_bytes == b.metrics.shuffle_bytes);
  for (std::uint32_t r = 0; r < 8; ++r)
    CHECK(a.per_rank_output[r] == b.per_rank_output[r]);
}

TEST_CASE("map+shuffle mode stops after delivery") {
  const DatasetSpec spec{5000, 72, 3, 6};
  PipelineConfig cfg;
  cfg.num_ranks = 2;
  cfg.run_reduce = false;
  const auto run = run_pipeline(cfg, spec);
  CHECK(run.metrics.shuffle_kv_count == spec.total_words);
  CHECK(run.metrics.reduce_ms == 0.0);
  for (const auto& out : run.per_rank_output) CHECK(out.empty());
}

TEST_CASE("conservation: output values sum to N in both reduce modes") {
  const DatasetSpec spec{12345, 300, 17, 6};
  for (bool combiner : {false, true}) {
    PipelineConfig cfg;
    cfg.num_ranks = 4;
    cfg.combiner_enabled = combiner;
    std::uint64_t sum = 0;
    for (const auto& [w, c] : global_counts(run_pipeline(cfg, spec)))
      sum += c;
    CHECK(sum == spec.total_words);
  }
}
