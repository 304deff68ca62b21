// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <tuple>

#include "error.hpp"
#include "rapl.hpp"

namespace mrcap {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (apps.empty())
    throw Error(ErrorKind::Config, "experiment: no apps selected");
  if (reps < 1)
    throw Error(ErrorKind::Config, "experiment: reps must be >= 1");
  if (caps.empty())
    throw Error(ErrorKind::Config, "experiment: caps must be nonempty");
  for (const PowerCap& c : caps) c.validate();
  if (sample_ms <= 0)
    throw Error(ErrorKind::Config, "experiment: sample_ms must be > 0");
  DatasetSpec probe = spec;
  for (std::uint64_t u :
       unique_words_sweep.empty() ? std::vector<std::uint64_t>{spec.unique_words}
                                  : unique_words_sweep) {
    probe.unique_words = u;
    probe.validate();
  }
}

std::string cap_label(const PowerCap& cap) {
  if (!cap.is_limited()) return "none";
  const double w = *cap.watts;
  char buf[32];
  if (w == static_cast<double>(static_cast<long long>(w)))
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(w));
  else
    std::snprintf(buf, sizeof(buf), "%g", w);
  return buf;
}

std::string result_csv_header() {
  return "app,backend,total_words,unique_words,seed,ranks,cap_w,rep,"
         "runtime_ms,map_ms,shuffle_ms,reduce_ms,proc_energy_j,dram_energy_j,"
         "dram_fraction,shuffle_kvs,shuffle_bytes,flush_count,avg_fill_ratio";
}

void write_result_csv(const std::string& path,
                      const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << "# schema=1\n" << result_csv_header() << "\n";
  for (const ResultRow& r : rows) {
    out << r.app << ',' << r.backend << ',' << r.total_words << ','
        << r.unique_words << ',' << r.seed << ',' << r.ranks << ',' << r.cap_w
        << ',' << r.rep << ',' << fmt(r.runtime_ms) << ',' << fmt(r.map_ms)
        << ',' << fmt(r.shuffle_ms) << ',' << fmt(r.reduce_ms) << ','
        << fmt(r.proc_energy_j) << ',' << fmt(r.dram_energy_j) << ','
        << fmt(r.dram_fraction) << ',' << r.shuffle_kvs << ','
        << r.shuffle_bytes << ',' << r.flush_count << ','
        << fmt(r.avg_fill_ratio) << "\n";
  }
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path);
}

std::vector<ResultRow> read_result_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::vector<ResultRow> rows;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != result_csv_header())
        throw Error(ErrorKind::Config, "unexpected CSV header in " + path);
      saw_header = true;
      continue;
    }
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 19)
      throw Error(ErrorKind::Config, "malformed CSV row in " + path);
    ResultRow r;
    r.app = f[0];
    r.backend = f[1];
    r.total_words = std::stoull(f[2]);
    r.unique_words = std::stoull(f[3]);
    r.seed = std::stoull(f[4]);
    r.ranks = static_cast<std::uint32_t>(std::stoul(f[5]));
    r.cap_w = f[6];
    r.rep = static_cast<std::uint32_t>(std::stoul(f[7]));
    r.runtime_ms = std::stod(f[8]);
    r.map_ms = std::stod(f[9]);
    r.shuffle_ms = std::stod(f[10]);
    r.reduce_ms = std::stod(f[11]);
    r.proc_energy_j = std::stod(f[12]);
    r.dram_energy_j = std::stod(f[13]);
    r.dram_fraction = std::stod(f[14]);
    r.shuffle_kvs = std::stoull(f[15]);
    r.shuffle_bytes = std::stoull(f[16]);
    r.flush_count = std::stoull(f[17]);
    r.avg_fill_ratio = std::stod(f[18]);
    rows.push_back(std::move(r));
  }
  if (!saw_header)
    throw Error(ErrorKind::Config, "no header row in " + path);
  return rows;
}

void write_trace_csv(const std::string& path, const PowerTrace& trace) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << "# interval_ms=" << fmt(trace.interval_ms) << "\n"
      << "t_ms,domain,watts\n";
  for (const PowerSample& s : trace.samples)
    out << fmt(s.t_ms) << ',' << power_domain_name(s.domain) << ','
        << fmt(s.watts) << "\n";
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path);
}

PowerTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  PowerTrace trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# interval_ms=", 0) == 0) {
      trace.interval_ms = std::stod(line.substr(14));
      continue;
    }
    if (line.empty() || line[0] == '#' || line == "t_ms,domain,watts")
      continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 3)
      throw Error(ErrorKind::Config, "malformed trace row in " + path);
    PowerSample s;
    s.t_ms = std::stod(f[0]);
    s.domain = f[1] == "dram" ? PowerDomain::Dram : PowerDomain::Processor;
    s.watts = std::stod(f[2]);
    trace.samples.push_back(s);
  }
  return trace;
}

namespace {

struct SimStageTimes {
  double map_ms = 0, shuffle_ms = 0, reduce_ms = 0;
};

SimStageTimes sim_base_durations(const SimPowerModel& model,
                                 const DatasetSpec& spec,
                                 const RunMetrics& m, bool run_reduce) {
  SimStageTimes t;
  t.map_ms = static_cast<double>(spec.total_words) / model.map_kvs_per_ms;
  t.shuffle_ms =
      static_cast<double>(m.shuffle_kv_count) / model.shuffle_kvs_per_ms +
      static_cast<double>(m.flush_count) * model.flush_latency_ms;
  t.reduce_ms = run_reduce ? static_cast<double>(m.shuffle_kv_count) /
                                 model.reduce_kvs_per_ms
                           : 0;
  return t;
}

std::string trace_file_name(const std::string& app, std::uint64_t u,
                            const std::string& cap, std::uint32_t rep) {
  return "trace_" + app + "_u" + std::to_string(u) + "_cap" + cap + "_rep" +
         std::to_string(rep) + ".csv";
}

}  // namespace

std::vector<ResultRow> run_matrix(const ExperimentConfig& cfg) {
  cfg.validate();

  std::unique_ptr<SimBackend> sim;
  std::unique_ptr<RaplBackend> rapl;
  if (cfg.backend == BackendKind::Sim) {
    SimPowerModel model = cfg.sim_model_path
                              ? SimPowerModel::load_file(*cfg.sim_model_path)
                              : SimPowerModel{};
    sim = std::make_unique<SimBackend>(model);
  } else {
    // Throws Error(Capability) when the sysfs tree is absent; callers are
    // told to fall back to --backend sim.
    rapl = std::make_unique<RaplBackend>(cfg.powercap_root);
  }

  if (cfg.trace_dir) fs::create_directories(*cfg.trace_dir);

  const std::vector<std::uint64_t> sweep =
      cfg.unique_words_sweep.empty()
          ? std::vector<std::uint64_t>{cfg.spec.unique_words}
          : cfg.unique_words_sweep;

  std::vector<ResultRow> rows;
  for (const MiniApp app : cfg.apps) {
    for (const std::uint64_t u : sweep) {
      DatasetSpec spec = cfg.spec;
      spec.unique_words = u;
      for (const PowerCap& cap : cfg.caps) {
        for (std::uint32_t rep = 1; rep <= cfg.reps; ++rep) {
          try {
            ResultRow row;
            row.app = miniapp_name(app);
            row.backend = cfg.backend == BackendKind::Sim ? "sim" : "rapl";
            row.total_words = spec.total_words;
            row.unique_words = spec.unique_words;
            row.seed = spec.seed;
            row.ranks = cfg.ranks;
            row.cap_w = cap_label(cap);
            row.rep = rep;

            PowerTrace trace;
            trace.interval_ms = cfg.sample_ms;
            if (cfg.backend == BackendKind::Sim) {
              const AppResult res =
                  run_app(app, spec, cfg.ranks, cfg.buffer_capacity_kvs);
              sim->set_cap(PowerDomain::Processor, cap);
              const SimStageTimes base = sim_base_durations(
                  sim->model(), spec, res.metrics,
                  app != MiniApp::MapShuffle);
              if (cfg.sampler_enabled) sim->begin_trace(cfg.sample_ms);
              // Simulated wall clock; counted metrics come from the real run.
              if (cfg.sampler_enabled) {
                row.map_ms = sim->execute_stage(Stage::Map, base.map_ms);
                row.shuffle_ms =
                    sim->execute_stage(Stage::Shuffle, base.shuffle_ms);
                if (base.reduce_ms > 0)
                  row.reduce_ms =
                      sim->execute_stage(Stage::Reduce, base.reduce_ms);
                trace = sim->end_trace();
              } else {
                const PowerCap pc = sim->cap(PowerDomain::Processor);
                row.map_ms = sim_execute_stage(sim->model(), Stage::Map,
                                               base.map_ms, pc, cfg.sample_ms)
                                 .duration_ms;
                row.shuffle_ms =
                    sim_execute_stage(sim->model(), Stage::Shuffle,
                                      base.shuffle_ms, pc, cfg.sample_ms)
                        .duration_ms;
                if (base.reduce_ms > 0)
                  row.reduce_ms =
                      sim_execute_stage(sim->model(), Stage::Reduce,
                                        base.reduce_ms, pc, cfg.sample_ms)
                          .duration_ms;
              }
              row.runtime_ms = row.map_ms + row.shuffle_ms + row.reduce_ms;
              row.shuffle_kvs = res.metrics.shuffle_kv_count;
              row.shuffle_bytes = res.metrics.shuffle_bytes;
              row.flush_count = res.metrics.flush_count;
              row.avg_fill_ratio = res.metrics.avg_buffer_fill_ratio;
            } else {
              rapl->set_cap(PowerDomain::Processor, cap);
              RaplSampler sampler(*rapl);
              if (cfg.sampler_enabled) sampler.start(cfg.sample_ms);
              const AppResult res =
                  run_app(app, spec, cfg.ranks, cfg.buffer_capacity_kvs);
              if (cfg.sampler_enabled) trace = sampler.stop();
              row.map_ms = res.metrics.map_ms;
              row.shuffle_ms = res.metrics.shuffle_ms;
              row.reduce_ms = res.metrics.reduce_ms;
              row.runtime_ms = row.map_ms + row.shuffle_ms + row.reduce_ms;
              row.shuffle_kvs = res.metrics.shuffle_kv_count;
              row.shuffle_bytes = res.metrics.shuffle_bytes;
              row.flush_count = res.metrics.flush_count;
              row.avg_fill_ratio = res.metrics.avg_buffer_fill_ratio;
            }

            const EnergyReport energy = integrate_energy(trace);
            row.proc_energy_j = energy.processor_j;
            row.dram_energy_j = energy.dram_j;
            row.dram_fraction = energy.dram_fraction;

            if (cfg.trace_dir && cfg.sampler_enabled) {
              write_trace_csv(
                  (fs::path(*cfg.trace_dir) /
                   trace_file_name(row.app, u, row.cap_w, rep))
                      .string(),
                  trace);
            }
            rows.push_back(std::move(row));
          } catch (const Error& e) {
            if (e.kind() == ErrorKind::Capability) throw;
            std::cerr << "mrcap: cell failed (app=" << miniapp_name(app)
                      << " u=" << u << " cap=" << cap_label(cap)
                      << " rep=" << rep << "): " << e.what() << "\n";
          }
        }
      }
    }
  }

  write_result_csv(cfg.csv_path, rows);
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  using GroupKey =
      std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, std::uint32_t,
                 std::string>;
  struct AppAgg {
    std::vector<double> runtime_ms;
    std::vector<double> energy_j;
    std::vector<double> shuffle_kvs;
  };
  struct Group {
    std::map<std::string, AppAgg> apps;
    double dram_min = 1e300, dram_max = -1e300;
  };
  std::map<GroupKey, Group> groups;
  for (const ResultRow& r : rows) {
    Group& g = groups[{r.total_words, r.unique_words, r.seed, r.ranks,
                       r.cap_w}];
    AppAgg& a = g.apps[r.app];
    a.runtime_ms.push_back(r.runtime_ms);
    a.energy_j.push_back(r.proc_energy_j + r.dram_energy_j);
    a.shuffle_kvs.push_back(static_cast<double>(r.shuffle_kvs));
    g.dram_min = std::min(g.dram_min, r.dram_fraction);
    g.dram_max = std::max(g.dram_max, r.dram_fraction);
  }

  std::vector<SummaryRow> out;
  for (const auto& [key, g] : groups) {
    SummaryRow s;
    std::tie(s.total_words, s.unique_words, s.seed, s.ranks, s.cap_w) = key;
    s.dram_fraction_min = g.dram_min;
    s.dram_fraction_max = g.dram_max;

    auto agg = [&](const char* app) -> const AppAgg* {
      auto it = g.apps.find(app);
      return it == g.apps.end() ? nullptr : &it->second;
    };
    const AppAgg* ms = agg("map_shuffle");
    const AppAgg* gbk = agg("group_by_key");
    const AppAgg* rbk = agg("reduce_by_key");

    if (gbk && ms) {
      const double t_ms = median(ms->runtime_ms);
      const double t_gbk = median(gbk->runtime_ms);
      const double e_ms = median(ms->energy_j);
      const double e_gbk = median(gbk->energy_j);
      if (t_ms > 0)
        s.reduce_overhead_runtime_pct = (t_gbk - t_ms) / t_ms * 100.0;
      if (e_ms > 0)
        s.reduce_overhead_energy_pct = (e_gbk - e_ms) / e_ms * 100.0;
    }
    if (gbk && rbk) {
      const double t_gbk = median(gbk->runtime_ms);
      const double t_rbk = median(rbk->runtime_ms);
      const double e_gbk = median(gbk->energy_j);
      const double e_rbk = median(rbk->energy_j);
      if (t_gbk > 0)
        s.combiner_savings_runtime_pct = (t_gbk - t_rbk) / t_gbk * 100.0;
      if (e_gbk > 0)
        s.combiner_savings_energy_pct = (e_gbk - e_rbk) / e_gbk * 100.0;
      s.joules_saved = e_gbk - e_rbk;
      const double kv_rbk = median(rbk->shuffle_kvs);
      if (kv_rbk > 0)
        s.movement_reduction = median(gbk->shuffle_kvs) / kv_rbk;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string format_summary(const std::vector<SummaryRow>& rows) {
  auto opt = [](const std::optional<double>& v, const char* unit) {
    if (!v) return std::string("n/a");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f%s", *v, unit);
    return std::string(buf);
  };
  std::ostringstream out;
  for (const SummaryRow& s : rows) {
    out << "dataset N=" << s.total_words << " U=" << s.unique_words
        << " seed=" << s.seed << " R=" << s.ranks << " cap=" << s.cap_w
        << "\n"
        << "  reduce-stage overhead:  runtime "
        << opt(s.reduce_overhead_runtime_pct, "%") << ", energy "
        << opt(s.reduce_overhead_energy_pct, "%") << "\n"
        << "  combiner savings:       runtime "
        << opt(s.combiner_savings_runtime_pct, "%") << ", energy "
        << opt(s.combiner_savings_energy_pct, "%") << " ("
        << opt(s.joules_saved, " J") << ")\n"
        << "  movement reduction:     "
        << opt(s.movement_reduction, "x") << "\n";
    char buf[80];
    std::snprintf(buf, sizeof(buf),
                  "  dram fraction range:    [%.4f, %.4f]\n",
                  s.dram_fraction_min, s.dram_fraction_max);
    out << buf;
  }
  if (rows.empty()) out << "no rows to summarize\n";
  return out.str();
}

}  // namespace mrcap
