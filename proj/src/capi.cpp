// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrcap/mrcap.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "error.hpp"
#include "experiment.hpp"
#include "plot.hpp"

using namespace mrcap;

namespace {

constexpr const char* kVersion = "0.1.0";

thread_local std::string g_last_error;

mrcap_status status_from(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Config:
    case ErrorKind::Usage: return MRCAP_ERR_INVALID;
    case ErrorKind::Capability: return MRCAP_ERR_CAPABILITY;
    case ErrorKind::Io: return MRCAP_ERR_IO;
    case ErrorKind::Internal: return MRCAP_ERR_INTERNAL;
  }
  return MRCAP_ERR_INTERNAL;
}

template <typename Fn>
mrcap_status guarded(std::string& error_out, Fn&& fn) {
  try {
    fn();
    error_out.clear();
    return MRCAP_OK;
  } catch (const Error& e) {
    error_out = e.what();
    return status_from(e);
  } catch (const std::exception& e) {
    error_out = e.what();
    return MRCAP_ERR_INTERNAL;
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

struct mrcap_experiment {
  ExperimentConfig cfg;
  std::string error;
};

extern "C" {

const char* mrcap_version(void) { return kVersion; }

const char* mrcap_last_error(void) { return g_last_error.c_str(); }

mrcap_experiment* mrcap_experiment_new(void) {
  auto* exp = new (std::nothrow) mrcap_experiment;
  if (exp) {
    // Usable defaults; callers normally override the dataset at least.
    exp->cfg.spec = DatasetSpec{1000000, 72, 1, 6};
  }
  return exp;
}

void mrcap_experiment_free(mrcap_experiment* exp) { delete exp; }

const char* mrcap_experiment_error(const mrcap_experiment* exp) {
  return exp ? exp->error.c_str() : "null experiment handle";
}

mrcap_status mrcap_experiment_set_apps(mrcap_experiment* exp,
                                       const char* apps) {
  if (!exp || !apps) return MRCAP_ERR_INVALID;
  return guarded(exp->error, [&] {
    std::vector<MiniApp> parsed;
    for (const std::string& name : split_list(apps)) {
      if (name == "all") {
        parsed = all_miniapps();
        continue;
      }
      const auto app = miniapp_from_name(name);
      if (!app) throw Error(ErrorKind::Usage, "unknown app: " + name);
      parsed.push_back(*app);
    }
    if (parsed.empty()) throw Error(ErrorKind::Usage, "no apps given");
    exp->cfg.apps = std::move(parsed);
  });
}

mrcap_status mrcap_experiment_set_dataset(mrcap_experiment* exp,
                                          uint64_t total_words,
                                          uint64_t unique_words,
                                          uint64_t seed) {
  if (!exp) return MRCAP_ERR_INVALID;
  return guarded(exp->error, [&] {
    exp->cfg.spec.total_words = total_words;
    exp->cfg.spec.unique_words = unique_words;
    exp->cfg.spec.seed = seed;
  });
}

mrcap_status mrcap_experiment_set_unique_words_sweep(mrcap_experiment* exp,
                                                     const uint64_t* values,
                                                     size_t count) {
  if (!exp || (count > 0 && !values)) return MRCAP_ERR_INVALID;
  return guarded(exp->error, [&] {
    exp->cfg.unique_words_sweep.assign(values, values + count);
  });
}

mrcap_status mrcap_experiment_set_ranks(mrcap_experiment* exp,
                                        uint32_t ranks) {
  if (!exp) return MRCAP_ERR_INVALID;
  return guarded(exp->error, [&] {
    if (ranks < 1) throw Error(ErrorKind::Config, "ranks must be >= 1");
    exp->cfg.ranks = ranks;
  });
}

mrcap_status mrcap_experiment_set_buffer_kvs(mrcap_experiment* exp,
                                             uint64_t capacity) {
  if (!exp) return MRCAP_ERR_INVALID;
  return guarded(exp->error, [&] {
    if (capacity < 1)
      throw Error(ErrorKind::Config, "buffer capacity must be >= 1");
    exp->cfg.buffer_capacity_kvs = capacity;
  });
}

mrcap_status mrcap_experiment_set_caps(mrcap_experiment* exp,
                                       const char* caps) {
  if (!exp || !caps) return MRCAP_ERR_INVALID;
  return guarded(exp->error, [&] {
    std::vector<PowerCap> parsed;
    for (const std::string& item : split_list(caps)) {
      if (item == "none") {
        parsed.push_back(PowerCap::unlimited());
        continue;
      }
      std::size_t used = 0;
      double watts = 0;
      try {
        watts = std::stod(item, &used);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Usage, "bad cap value: " + item);
      }
      if (used != item.size())
        throw Error(ErrorKind::Usage, "bad cap value: " + item);
      PowerCap cap = PowerCap::limit(watts);
      cap.validate();
      parsed.push_back(cap);
    }
    if (parsed.empty()) throw Error(ErrorKind::Usage, "no caps given");
    exp->cfg.caps = std::move(parsed);
  });
}

mrcap_status mrcap_experiment_set_backend(mrcap_experiment* exp,
                                          const char* backend) {
  if (!exp || !backend) return MRCAP_ERR_INVALID;
  return guarded(exp->error, [&] {
    const std::string b = backend;
    if (b == "sim")
      exp->cfg.backend = BackendKind::Sim;
    else if (b == "rapl")
      exp->cfg.backend = BackendKind::Rapl;
    else
      throw Error(ErrorKind::Usage, "unknown backend: " + b);
  });
}

mrcap_status mrcap_experiment_set_sim_model_file(mrcap_experiment* exp,
                                                 const char* path) {
  if (!exp) return MRCAP_ERR_INVALID;
  return guarded(exp->error, [&] {
    if (path)
      exp->cfg.sim_model_path = path;
    else
      exp->cfg.sim_model_path.reset();
  });
}

mrcap_status mrcap_experiment_set_powercap_root(mrcap_experiment* exp,
                                                const char* root) {
  if (!exp) return MRCAP_ERR_INVALID;
  return guarded(exp->error, [&] {
    if (root)
      exp->cfg.powercap_root = root;
    else
      exp->cfg.powercap_root.reset();
  });
}

mrcap_status mrcap_experiment_set_sample_ms(mrcap_experiment* exp,
                                            double sample_ms) {
  if (!exp) return MRCAP_ERR_INVALID;
  return guarded(exp->error, [&] {
    if (sample_ms <= 0)
      throw Error(ErrorKind::Config, "sample_ms must be > 0");
    exp->cfg.sample_ms = sample_ms;
  });
}

mrcap_status mrcap_experiment_set_reps(mrcap_experiment* exp, uint32_t reps) {
  if (!exp) return MRCAP_ERR_INVALID;
  return guarded(exp->error, [&] {
    if (reps < 1) throw Error(ErrorKind::Config, "reps must be >= 1");
    exp->cfg.reps = reps;
  });
}

mrcap_status mrcap_experiment_set_sampler_enabled(mrcap_experiment* exp,
                                                  int enabled) {
  if (!exp) return MRCAP_ERR_INVALID;
  return guarded(exp->error,
                 [&] { exp->cfg.sampler_enabled = enabled != 0; });
}

mrcap_status mrcap_experiment_set_output(mrcap_experiment* exp,
                                         const char* csv_path,
                                         const char* trace_dir) {
  if (!exp || !csv_path) return MRCAP_ERR_INVALID;
  return guarded(exp->error, [&] {
    exp->cfg.csv_path = csv_path;
    if (trace_dir)
      exp->cfg.trace_dir = trace_dir;
    else
      exp->cfg.trace_dir.reset();
  });
}

mrcap_status mrcap_experiment_run(mrcap_experiment* exp, size_t* rows_out) {
  if (!exp) return MRCAP_ERR_INVALID;
  return guarded(exp->error, [&] {
    const std::vector<ResultRow> rows = run_matrix(exp->cfg);
    if (rows_out) *rows_out = rows.size();
  });
}

mrcap_status mrcap_summarize_file(const char* csv_path, char** out) {
  if (!csv_path || !out) return MRCAP_ERR_INVALID;
  return guarded(g_last_error, [&] {
    const std::string text =
        format_summary(summarize(read_result_csv(csv_path)));
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw Error(ErrorKind::Internal, "out of memory");
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

mrcap_status mrcap_plot_traces(const char* trace_dir, const char* app_filter,
                               const char* out_svg_path) {
  if (!trace_dir || !out_svg_path) return MRCAP_ERR_INVALID;
  return guarded(g_last_error, [&] {
    render_power_plot_file(
        collect_plot_series(trace_dir, app_filter ? app_filter : ""),
        out_svg_path);
  });
}

void mrcap_string_free(char* s) { std::free(s); }

}  // extern "C"
