// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "power.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace mrcap {

const char* power_domain_name(PowerDomain d) {
  return d == PowerDomain::Processor ? "processor" : "dram";
}

void PowerCap::validate() const {
  if (watts.has_value() && *watts <= 0)
    throw Error(ErrorKind::Config, "power cap must be > 0 watts");
}

EnergyReport integrate_energy(const PowerTrace& trace) {
  EnergyReport report;
  double last_t = -1;
  for (const PowerSample& s : trace.samples) {
    const double joules = s.watts * trace.interval_ms / 1000.0;
    if (s.domain == PowerDomain::Processor)
      report.processor_j += joules;
    else
      report.dram_j += joules;
    last_t = std::max(last_t, s.t_ms);
  }
  report.total_j = report.processor_j + report.dram_j;
  report.runtime_ms = trace.samples.empty() ? 0 : last_t + trace.interval_ms;
  report.dram_fraction =
      report.total_j > 0 ? report.dram_j / report.total_j : 0;
  return report;
}

const StagePower& SimPowerModel::stage(Stage s) const {
  switch (s) {
    case Stage::Map: return map;
    case Stage::Shuffle: return shuffle;
    case Stage::Reduce: return reduce;
    case Stage::Idle: return idle;
  }
  return idle;
}

void SimPowerModel::validate() const {
  for (const StagePower* sp : {&map, &shuffle, &reduce, &idle}) {
    if (sp->watts <= 0)
      throw Error(ErrorKind::Config, "sim model: stage watts must be > 0");
    if (sp->dram_fraction < 0 || sp->dram_fraction >= 1)
      throw Error(ErrorKind::Config,
                  "sim model: dram fraction must be in [0, 1)");
  }
  if (flush_latency_ms < 0)
    throw Error(ErrorKind::Config, "sim model: flush latency must be >= 0");
  for (double rate : {map_kvs_per_ms, shuffle_kvs_per_ms, reduce_kvs_per_ms})
    if (rate <= 0)
      throw Error(ErrorKind::Config, "sim model: work rates must be > 0");
}

SimPowerModel SimPowerModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::Io, "sim model: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config,
                "sim model: invalid JSON in " + path + ": " + e.what());
  }
  SimPowerModel m;
  auto get = [&](const char* key, double& out) {
    if (j.contains(key)) out = j.at(key).get<double>();
  };
  get("map_watts", m.map.watts);
  get("shuffle_watts", m.shuffle.watts);
  get("reduce_watts", m.reduce.watts);
  get("idle_watts", m.idle.watts);
  get("map_dram_fraction", m.map.dram_fraction);
  get("shuffle_dram_fraction", m.shuffle.dram_fraction);
  get("reduce_dram_fraction", m.reduce.dram_fraction);
  get("idle_dram_fraction", m.idle.dram_fraction);
  get("flush_latency_ms", m.flush_latency_ms);
  get("map_kvs_per_ms", m.map_kvs_per_ms);
  get("shuffle_kvs_per_ms", m.shuffle_kvs_per_ms);
  get("reduce_kvs_per_ms", m.reduce_kvs_per_ms);
  m.validate();
  return m;
}

SimStageResult sim_execute_stage(const SimPowerModel& model, Stage stage,
                                 double base_duration_ms, PowerCap cap,
                                 double interval_ms, double t0_ms,
                                 double first_sample_ms) {
  model.validate();
  cap.validate();
  if (base_duration_ms <= 0)
    throw Error(ErrorKind::Usage, "sim stage: base duration must be > 0");

  const StagePower& sp = model.stage(stage);
  const double effective =
      cap.is_limited() ? std::min(sp.watts, *cap.watts) : sp.watts;
  const double dram_watts =
      effective * sp.dram_fraction / (1.0 - sp.dram_fraction);

  SimStageResult res;
  res.duration_ms = base_duration_ms * sp.watts / effective;
  const double end = t0_ms + res.duration_ms;
  for (double t = first_sample_ms; t < end; t += interval_ms) {
    res.samples.push_back({t, PowerDomain::Processor, effective});
    res.samples.push_back({t, PowerDomain::Dram, dram_watts});
  }
  return res;
}

SimBackend::SimBackend(SimPowerModel model) : model_(std::move(model)) {
  model_.validate();
}

void SimBackend::set_cap(PowerDomain domain, PowerCap cap) {
  cap.validate();
  (domain == PowerDomain::Processor ? proc_cap_ : dram_cap_) = cap;
}

PowerCap SimBackend::cap(PowerDomain domain) const {
  return domain == PowerDomain::Processor ? proc_cap_ : dram_cap_;
}

void SimBackend::begin_trace(double interval_ms) {
  if (interval_ms <= 0)
    throw Error(ErrorKind::Config, "sim trace: interval must be > 0");
  trace_ = PowerTrace{interval_ms, {}};
  virtual_ms_ = 0;
  next_sample_ms_ = 0;
  recording_ = true;
}

double SimBackend::execute_stage(Stage stage, double base_duration_ms) {
  if (!recording_)
    throw Error(ErrorKind::Usage, "sim backend: no trace in progress");
  SimStageResult r =
      sim_execute_stage(model_, stage, base_duration_ms, proc_cap_,
                        trace_.interval_ms, virtual_ms_, next_sample_ms_);
  virtual_ms_ += r.duration_ms;
  next_sample_ms_ += trace_.interval_ms * (r.samples.size() / 2);
  trace_.samples.insert(trace_.samples.end(), r.samples.begin(),
                        r.samples.end());
  return r.duration_ms;
}

PowerTrace SimBackend::end_trace() {
  recording_ = false;
  return trace_;
}

}  // namespace mrcap
