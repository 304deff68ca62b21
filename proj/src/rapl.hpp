// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MRCAP_RAPL_HPP
#define MRCAP_RAPL_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "power.hpp"

namespace mrcap {

// Linux powercap sysfs layout:
//   <root>/intel-rapl:<P>/energy_uj              monotone uJ counter
//   <root>/intel-rapl:<P>/max_energy_range_uj    wrap modulus
//   <root>/intel-rapl:<P>/constraint_0_power_limit_uw
//   <root>/intel-rapl:<P>:<S>/name == "dram"     DRAM subzone
// <root> is /sys/class/powercap unless overridden (MRCAP_POWERCAP_ROOT or
// an explicit argument), which is how fixture tests drive this code.

// Counter delta with wrap: curr < prev means the counter rolled over at
// max_range.
std::uint64_t energy_delta_uj(std::uint64_t prev, std::uint64_t curr,
                              std::uint64_t max_range);

// delta_uj over dt_ms -> watts.
double watts_from_delta(std::uint64_t delta_uj, double dt_ms);

class RaplZone {
public:
  explicit RaplZone(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::string name() const;
  std::uint64_t read_energy_uj() const;
  std::uint64_t max_energy_range_uj() const;
  void write_power_limit_uw(std::uint64_t uw) const;

private:
  std::filesystem::path dir_;
};

// Resolution order: explicit arg, MRCAP_POWERCAP_ROOT, /sys/class/powercap.
std::filesystem::path powercap_root(
    const std::optional<std::string>& override_root = {});

class RaplBackend {
public:
  // Throws Error(Capability) when no readable package zone exists.
  explicit RaplBackend(const std::optional<std::string>& root = {});

  static bool available(const std::optional<std::string>& root = {});

  // Processor caps go to every package zone, DRAM caps to every dram
  // subzone. Unlimited caps are recorded but nothing is written.
  void set_cap(PowerDomain domain, PowerCap cap);

  // Latch current counters; poll() reports watts since the previous
  // latch. A failed read yields an empty optional for that domain.
  void prime();
  struct Reading {
    std::optional<double> processor_w;
    std::optional<double> dram_w;
  };
  Reading poll(double dt_ms);

  std::size_t package_count() const { return packages_.size(); }
  std::size_t dram_count() const { return drams_.size(); }

private:
  std::vector<RaplZone> packages_;
  std::vector<RaplZone> drams_;
  std::vector<std::uint64_t> prev_package_uj_;
  std::vector<std::uint64_t> prev_dram_uj_;
};

// Fixed-rate sampler thread over a RaplBackend. The sampler is the sole
// writer of the trace between start and stop; failed reads leave gaps and
// are counted, never interpolated.
class RaplSampler {
public:
  explicit RaplSampler(RaplBackend& backend);
  ~RaplSampler();

  void start(double interval_ms);
  PowerTrace stop();  // idempotent
  std::uint64_t failed_reads() const { return failed_reads_; }

private:
  struct Impl;
  RaplBackend& backend_;
  std::unique_ptr<Impl> impl_;
  PowerTrace trace_;
  std::uint64_t failed_reads_ = 0;
};

}  // namespace mrcap

#endif
