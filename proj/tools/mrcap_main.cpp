// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0
//
// mrcap CLI: run experiment matrices, summarize result CSVs, render
// power-vs-time plots. Thin shell over the C API.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mrcap/mrcap.h"

namespace {

struct ExperimentDeleter {
  void operator()(mrcap_experiment* e) const { mrcap_experiment_free(e); }
};
using ExperimentHandle = std::unique_ptr<mrcap_experiment, ExperimentDeleter>;

int fail(const char* what, const char* detail, mrcap_status status) {
  std::fprintf(stderr, "mrcap: %s: %s\n", what, detail);
  if (status == MRCAP_ERR_CAPABILITY)
    std::fprintf(stderr, "mrcap: hint: try --backend sim\n");
  return 1;
}

int run_command(const std::string& apps, std::uint64_t total_words,
                std::uint64_t unique_words,
                const std::vector<std::uint64_t>& sweep, std::uint64_t seed,
                std::uint32_t ranks, std::uint64_t buffer_kvs,
                const std::string& caps, const std::string& backend,
                const std::string& sim_model, double sample_ms,
                std::uint32_t reps, const std::string& out,
                const std::string& trace_dir, bool no_sampler) {
  ExperimentHandle exp(mrcap_experiment_new());
  if (!exp) return fail("run", "out of memory", MRCAP_ERR_INTERNAL);

  auto check = [&](mrcap_status s) {
    if (s != MRCAP_OK)
      throw CLI::ValidationError(mrcap_experiment_error(exp.get()));
  };
  check(mrcap_experiment_set_apps(exp.get(), apps.c_str()));
  check(mrcap_experiment_set_dataset(exp.get(), total_words, unique_words,
                                     seed));
  if (!sweep.empty())
    check(mrcap_experiment_set_unique_words_sweep(exp.get(), sweep.data(),
                                                  sweep.size()));
  check(mrcap_experiment_set_ranks(exp.get(), ranks));
  check(mrcap_experiment_set_buffer_kvs(exp.get(), buffer_kvs));
  check(mrcap_experiment_set_caps(exp.get(), caps.c_str()));
  check(mrcap_experiment_set_backend(exp.get(), backend.c_str()));
  if (!sim_model.empty())
    check(mrcap_experiment_set_sim_model_file(exp.get(), sim_model.c_str()));
  check(mrcap_experiment_set_sample_ms(exp.get(), sample_ms));
  check(mrcap_experiment_set_reps(exp.get(), reps));
  check(mrcap_experiment_set_sampler_enabled(exp.get(), no_sampler ? 0 : 1));
  check(mrcap_experiment_set_output(
      exp.get(), out.c_str(), trace_dir.empty() ? nullptr : trace_dir.c_str()));

  size_t rows = 0;
  const mrcap_status status = mrcap_experiment_run(exp.get(), &rows);
  if (status != MRCAP_OK)
    return fail("run", mrcap_experiment_error(exp.get()), status);
  std::printf("wrote %zu rows to %s\n", rows, out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mrcap - MapReduce mini-app power/energy benchmark harness"};
  app.require_subcommand(1);

  // run
  std::string apps = "all";
  std::uint64_t total_words = 1000000, unique_words = 72, seed = 1;
  std::vector<std::uint64_t> sweep;
  std::uint32_t ranks = 4;
  std::uint64_t buffer_kvs = 4096;
  std::string caps = "none";
  std::string backend = "sim";
  std::string sim_model;
  double sample_ms = 100;
  std::uint32_t reps = 3;
  std::string out = "results.csv";
  std::string trace_dir;
  bool no_sampler = false;

  CLI::App* run = app.add_subcommand("run", "execute an experiment matrix");
  run->add_option("--app", apps,
                  "map_shuffle|group_by_key|reduce_by_key|all, comma list");
  run->add_option("--total-words", total_words, "dataset size N");
  run->add_option("--unique-words", unique_words, "vocabulary size U");
  run->add_option("--unique-words-sweep", sweep,
                  "comma list of U values (overrides --unique-words)")
      ->delimiter(',');
  run->add_option("--seed", seed, "dataset seed");
  run->add_option("--ranks", ranks, "worker ranks R");
  run->add_option("--buffer-kvs", buffer_kvs,
                  "shuffle buffer capacity per destination, in KVs");
  run->add_option("--caps", caps, "comma list of watts or none");
  run->add_option("--backend", backend, "sim|rapl");
  run->add_option("--sim-model", sim_model, "sim power model JSON file");
  run->add_option("--sample-ms", sample_ms, "power sample interval");
  run->add_option("--reps", reps, "replications per cell");
  run->add_option("--out", out, "results CSV path");
  run->add_option("--trace-dir", trace_dir, "directory for per-run traces");
  run->add_flag("--no-sampler", no_sampler, "disable power sampling");

  // summarize
  std::string summarize_csv;
  CLI::App* summarize =
      app.add_subcommand("summarize", "derived comparisons from a results CSV");
  summarize->add_option("csv", summarize_csv, "results CSV")->required();

  // plot
  std::string plot_traces, plot_out = "fig1.svg", plot_app;
  CLI::App* plot =
      app.add_subcommand("plot", "render power-vs-time SVG from traces");
  plot->add_option("--traces", plot_traces, "trace directory")->required();
  plot->add_option("--out", plot_out, "output SVG path");
  plot->add_option("--app", plot_app, "only plot traces of this app");

  try {
    app.parse(argc, argv);

    if (run->parsed()) {
      return run_command(apps, total_words, unique_words, sweep, seed, ranks,
                         buffer_kvs, caps, backend, sim_model, sample_ms,
                         reps, out, trace_dir, no_sampler);
    }
    if (summarize->parsed()) {
      char* text = nullptr;
      const mrcap_status s =
          mrcap_summarize_file(summarize_csv.c_str(), &text);
      if (s != MRCAP_OK) return fail("summarize", mrcap_last_error(), s);
      std::fputs(text, stdout);
      mrcap_string_free(text);
      return 0;
    }
    if (plot->parsed()) {
      const mrcap_status s = mrcap_plot_traces(
          plot_traces.c_str(), plot_app.empty() ? nullptr : plot_app.c_str(),
          plot_out.c_str());
      if (s != MRCAP_OK) return fail("plot", mrcap_last_error(), s);
      std::printf("wrote %s\n", plot_out.c_str());
      return 0;
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return 2;
}
