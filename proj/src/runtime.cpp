// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "runtime.hpp"

#include <atomic>
#include <barrier>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "error.hpp"

namespace mrcap {
namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

}  // namespace

void PipelineConfig::validate() const {
  if (num_ranks < 1)
    throw Error(ErrorKind::Config, "pipeline: num_ranks must be >= 1");
  if (buffer_capacity_kvs < 1)
    throw Error(ErrorKind::Config, "pipeline: buffer capacity must be >= 1");
}

MapFn wordcount_map() {
  return [](const std::string& word, std::vector<KeyValue>& out) {
    out.push_back(KeyValue{word, 1});
  };
}

ReduceFn wordcount_reduce() {
  return [](std::uint64_t acc, std::uint64_t v) { return acc + v; };
}

std::uint64_t fnv1a64(const std::string& key) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint32_t partition(const std::string& key, std::uint32_t num_ranks) {
  if (num_ranks < 1)
    throw Error(ErrorKind::Usage, "partition: num_ranks must be >= 1");
  return static_cast<std::uint32_t>(fnv1a64(key) % num_ranks);
}

std::vector<KeyValue> map_stage(const WordChunk& chunk, const MapFn& map_fn) {
  std::vector<KeyValue> out;
  out.reserve(chunk.words.size());
  for (const std::string& w : chunk.words) map_fn(w, out);
  return out;
}

std::vector<KeyValue> combine_local(const std::vector<KeyValue>& kvs,
                                    const ReduceFn& reduce_fn) {
  std::vector<KeyValue> out;
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(kvs.size());
  for (const KeyValue& kv : kvs) {
    auto [it, inserted] = index.try_emplace(kv.key, out.size());
    if (inserted) {
      out.push_back(kv);
    } else {
      KeyValue& acc = out[it->second];
      acc.value = reduce_fn(acc.value, kv.value);
    }
  }
  return out;
}

std::vector<KeyMultiValue> group_by_key(
    const std::vector<KeyValue>& received) {
  std::vector<KeyMultiValue> out;
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(received.size());
  for (const KeyValue& kv : received) {
    auto [it, inserted] = index.try_emplace(kv.key, out.size());
    if (inserted) out.push_back(KeyMultiValue{kv.key, {}});
    out[it->second].values.push_back(kv.value);
  }
  return out;
}

std::vector<KeyValue> reduce_stage(const std::vector<KeyMultiValue>& kmvs,
                                   const ReduceFn& reduce_fn) {
  std::vector<KeyValue> out;
  out.reserve(kmvs.size());
  for (const KeyMultiValue& kmv : kmvs) {
    if (kmv.values.empty())
      throw Error(ErrorKind::Usage, "reduce_stage: KMV with no values");
    std::uint64_t acc = kmv.values.front();
    for (std::size_t i = 1; i < kmv.values.size(); ++i)
      acc = reduce_fn(acc, kmv.values[i]);
    out.push_back(KeyValue{kmv.key, acc});
  }
  return out;
}

ExchangeResult exchange(
    const std::vector<std::vector<std::vector<KeyValue>>>& outboxes,
    const PipelineConfig& cfg) {
  cfg.validate();
  const std::uint32_t ranks = cfg.num_ranks;
  if (outboxes.size() != ranks)
    throw Error(ErrorKind::Usage, "exchange: outbox rank count mismatch");

  ExchangeResult res;
  res.received.resize(ranks);
  const std::uint64_t cap = cfg.buffer_capacity_kvs;
  // Receivers take sender queues in rank order; per-pair FIFO is the
  // append order below.
  for (std::uint32_t dest = 0; dest < ranks; ++dest) {
    for (std::uint32_t src = 0; src < ranks; ++src) {
      const std::vector<KeyValue>& queue = outboxes[src][dest];
      for (const KeyValue& kv : queue) {
        if (partition(kv.key, ranks) != dest)
          throw Error(ErrorKind::Internal,
                      "exchange: misrouted KV for key '" + kv.key + "'");
        res.bytes += kv.key.size() + 8;
      }
      res.kv_count += queue.size();
      res.flush_count += (queue.size() + cap - 1) / cap;
      res.received[dest].insert(res.received[dest].end(), queue.begin(),
                                queue.end());
    }
  }
  res.avg_fill_ratio =
      res.flush_count == 0
          ? 0.0
          : static_cast<double>(res.kv_count) /
                (static_cast<double>(res.flush_count) * static_cast<double>(cap));
  return res;
}

PipelineResult run_pipeline(const PipelineConfig& cfg,
                            const DatasetSpec& spec) {
  cfg.validate();
  spec.validate();
  const std::uint32_t ranks = cfg.num_ranks;
  const MapFn map_fn = wordcount_map();
  const ReduceFn reduce_fn = wordcount_reduce();

  // outboxes[src][dest], filled by each worker for its own src row.
  std::vector<std::vector<std::vector<KeyValue>>> outboxes(
      ranks, std::vector<std::vector<KeyValue>>(ranks));
  ExchangeResult delivered;
  PipelineResult result;
  result.per_rank_output.resize(ranks);

  std::barrier sync(static_cast<std::ptrdiff_t>(ranks));
  Clock::time_point t_start, t_mapped, t_shuffled, t_reduced;
  std::mutex error_mu;
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};

  // Checked after every barrier; a failed peer has already dropped out of
  // the barrier, everyone else must drop too or the protocol hangs.
  auto bail = [&](std::uint32_t) {
    if (!failed.load(std::memory_order_acquire)) return false;
    sync.arrive_and_drop();
    return true;
  };

  auto worker = [&](std::uint32_t rank) {
    try {
      if (rank == 0) t_start = Clock::now();
      sync.arrive_and_wait();
      if (bail(rank)) return;

      std::vector<KeyValue> kvs =
          map_stage(generate_chunk(spec, rank, ranks), map_fn);
      sync.arrive_and_wait();
      if (rank == 0) t_mapped = Clock::now();
      sync.arrive_and_wait();
      if (bail(rank)) return;

      if (cfg.combiner_enabled) kvs = combine_local(kvs, reduce_fn);
      std::vector<std::vector<KeyValue>>& row = outboxes[rank];
      for (KeyValue& kv : kvs)
        row[partition(kv.key, ranks)].push_back(std::move(kv));
      sync.arrive_and_wait();
      if (bail(rank)) return;

      // Collective delivery; rank 0 runs the in-memory transfer while the
      // others wait at the barrier, mirroring an alltoall sync point.
      if (rank == 0) delivered = mrcap::exchange(outboxes, cfg);
      sync.arrive_and_wait();
      if (rank == 0) t_shuffled = Clock::now();
      sync.arrive_and_wait();
      if (bail(rank)) return;

      if (cfg.run_reduce) {
        result.per_rank_output[rank] =
            reduce_stage(group_by_key(delivered.received[rank]), reduce_fn);
      }
      sync.arrive_and_wait();
      if (rank == 0) t_reduced = Clock::now();
    } catch (...) {
      {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
      failed.store(true, std::memory_order_release);
      sync.arrive_and_drop();
    }
  };

  if (ranks == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(ranks);
    for (std::uint32_t r = 0; r < ranks; ++r)
      threads.emplace_back(worker, r);
    for (std::thread& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  result.metrics.map_ms = ms_between(t_start, t_mapped);
  result.metrics.shuffle_ms = ms_between(t_mapped, t_shuffled);
  result.metrics.reduce_ms =
      cfg.run_reduce ? ms_between(t_shuffled, t_reduced) : 0.0;
  result.metrics.shuffle_kv_count = delivered.kv_count;
  result.metrics.shuffle_bytes = delivered.bytes;
  result.metrics.flush_count = delivered.flush_count;
  result.metrics.avg_buffer_fill_ratio = delivered.avg_fill_ratio;
  return result;
}

}  // namespace mrcap
