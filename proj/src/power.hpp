// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MRCAP_POWER_HPP
#define MRCAP_POWER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mrcap {

enum class PowerDomain { Processor, Dram };

const char* power_domain_name(PowerDomain d);

struct PowerSample {
  double t_ms = 0;  // since run start
  PowerDomain domain = PowerDomain::Processor;
  double watts = 0;
};

struct PowerTrace {
  double interval_ms = 100;
  std::vector<PowerSample> samples;
};

// A per-domain power limit; empty watts means uncapped.
struct PowerCap {
  std::optional<double> watts;

  static PowerCap unlimited() { return {}; }
  static PowerCap limit(double w) { return {w}; }
  bool is_limited() const { return watts.has_value(); }
  void validate() const;  // finite caps must be > 0
};

struct EnergyReport {
  double processor_j = 0;
  double dram_j = 0;
  double total_j = 0;
  double runtime_ms = 0;
  double dram_fraction = 0;
};

// Rectangle rule at the sample interval: each sample contributes
// watts * interval_ms / 1000 joules. runtime_ms = last t + interval.
EnergyReport integrate_energy(const PowerTrace& trace);

// --- Simulated backend ------------------------------------------------

enum class Stage { Map, Shuffle, Reduce, Idle };

struct StagePower {
  double watts = 160;        // nominal processor draw
  double dram_fraction = 0;  // dram share of (proc + dram), in [0, 1)
};

// Deterministic stand-in for hardware. Capping below the nominal draw
// dilates runtime work-proportionally (nominal / effective); power moves
// into time, energy is conserved. This is a model, not a hardware claim.
struct SimPowerModel {
  StagePower map{160, 0.10};
  StagePower shuffle{160, 0.12};
  StagePower reduce{160, 0.06};
  StagePower idle{20, 0.04};
  double flush_latency_ms = 0;  // added to shuffle base time per flush
  // Work rates used to derive base stage durations from counted work.
  // Virtual milliseconds cost no wall time; the defaults are slow enough
  // that a default-size run spans many 100 ms samples.
  double map_kvs_per_ms = 500;
  double shuffle_kvs_per_ms = 500;
  double reduce_kvs_per_ms = 500;

  const StagePower& stage(Stage s) const;
  void validate() const;
  // JSON object with any subset of: map_watts, shuffle_watts, reduce_watts,
  // idle_watts, map_dram_fraction, ..., flush_latency_ms, map_kvs_per_ms, ...
  static SimPowerModel load_file(const std::string& path);
};

struct SimStageResult {
  double duration_ms = 0;  // dilated
  std::vector<PowerSample> samples;
};

// Runs one stage under a processor cap. effective = min(nominal, cap),
// duration = base * nominal / effective. Samples (both domains) land on the
// global grid t = first_sample_ms + k * interval_ms while t < t0 + duration.
// Reported dram watts are absolute: effective * f / (1 - f).
SimStageResult sim_execute_stage(const SimPowerModel& model, Stage stage,
                                 double base_duration_ms, PowerCap cap,
                                 double interval_ms = 100, double t0_ms = 0,
                                 double first_sample_ms = 0);

// Stateful wrapper that strings stages into one virtual-time trace.
class SimBackend {
public:
  explicit SimBackend(SimPowerModel model);

  void set_cap(PowerDomain domain, PowerCap cap);
  PowerCap cap(PowerDomain domain) const;

  void begin_trace(double interval_ms);
  double execute_stage(Stage stage, double base_duration_ms);
  PowerTrace end_trace();  // idempotent until the next begin_trace
  double virtual_time_ms() const { return virtual_ms_; }
  const SimPowerModel& model() const { return model_; }

private:
  SimPowerModel model_;
  PowerCap proc_cap_;
  PowerCap dram_cap_;  // recorded; the sim dilates on the processor cap
  PowerTrace trace_;
  double virtual_ms_ = 0;
  double next_sample_ms_ = 0;
  bool recording_ = false;
};

}  // namespace mrcap

#endif
