// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "experiment.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "error.hpp"
#include "plot.hpp"

using namespace mrcap;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("mrcap_exp_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

ExperimentConfig small_config(const TempDir& dir) {
  ExperimentConfig cfg;
  cfg.spec = DatasetSpec{20000, 72, 5, 6};
  cfg.ranks = 2;
  cfg.buffer_capacity_kvs = 512;
  cfg.backend = BackendKind::Sim;
  cfg.reps = 3;
  cfg.caps = {PowerCap::unlimited(), PowerCap::limit(140),
              PowerCap::limit(120)};
  cfg.csv_path = dir.file("results.csv");
  cfg.trace_dir = dir.file("traces");
  return cfg;
}

}  // namespace

TEST_CASE("matrix cardinality: 3 apps x 3 caps x 3 reps = 27 rows") {
  TempDir dir;
  const auto rows = run_matrix(small_config(dir));
  CHECK(rows.size() == 27);
  CHECK(read_result_csv(dir.file("results.csv")).size() == 27);

  // Deterministic row order: app, unique_words, cap, rep.
  CHECK(rows[0].app == "map_shuffle");
  CHECK(rows[0].cap_w == "none");
  CHECK(rows[0].rep == 1);
  CHECK(rows[1].rep == 2);
  CHECK(rows[3].cap_w == "140");
  CHECK(rows[9].app == "group_by_key");
}

TEST_CASE("CSV schema and round trip") {
  TempDir dir;
  auto cfg = small_config(dir);
  cfg.apps = {MiniApp::GroupByKey};
  cfg.caps = {PowerCap::limit(120)};
  cfg.reps = 1;
  const auto rows = run_matrix(cfg);

  std::ifstream in(dir.file("results.csv"));
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "# schema=1");
  REQUIRE(std::getline(in, line));
  CHECK(line == result_csv_header());

  const auto back = read_result_csv(dir.file("results.csv"));
  REQUIRE(back.size() == rows.size());
  CHECK(back[0].shuffle_kvs == rows[0].shuffle_kvs);
  CHECK(back[0].cap_w == "120");
  CHECK(back[0].backend == "sim");
}

TEST_CASE("sim reps are identical in all counted metrics") {
  TempDir dir;
  auto cfg = small_config(dir);
  cfg.apps = {MiniApp::ReduceByKey};
  cfg.caps = {PowerCap::limit(140)};
  const auto rows = run_matrix(cfg);
  REQUIRE(rows.size() == 3);
  for (const ResultRow& r : rows) {
    CHECK(r.shuffle_kvs == rows[0].shuffle_kvs);
    CHECK(r.shuffle_bytes == rows[0].shuffle_bytes);
    CHECK(r.flush_count == rows[0].flush_count);
    CHECK(r.runtime_ms == rows[0].runtime_ms);
  }
}

TEST_CASE("sim runtimes scale with the cap dilation") {
  TempDir dir;
  auto cfg = small_config(dir);
  cfg.apps = {MiniApp::GroupByKey};
  cfg.reps = 1;
  const auto rows = run_matrix(cfg);
  REQUIRE(rows.size() == 3);
  const double base = rows[0].runtime_ms;  // cap none
  CHECK(rows[1].runtime_ms / base == doctest::Approx(160.0 / 140.0));
  CHECK(rows[2].runtime_ms / base == doctest::Approx(160.0 / 120.0));
}

TEST_CASE("trace files are written per run and readable") {
  TempDir dir;
  auto cfg = small_config(dir);
  cfg.apps = {MiniApp::GroupByKey};
  cfg.caps = {PowerCap::limit(120)};
  cfg.reps = 2;
  run_matrix(cfg);
  const PowerTrace t = read_trace_csv(
      dir.file("traces/trace_group_by_key_u72_cap120_rep1.csv"));
  CHECK(fs::exists(dir.file("traces/trace_group_by_key_u72_cap120_rep2.csv")));
  CHECK(t.interval_ms == doctest::Approx(100.0));
  for (const PowerSample& s : t.samples)
    if (s.domain == PowerDomain::Processor) CHECK(s.watts == 120.0);
}

TEST_CASE("rapl backend without sysfs aborts before any run") {
  TempDir dir;
  auto cfg = small_config(dir);
  cfg.backend = BackendKind::Rapl;
  cfg.powercap_root = "/nonexistent/mrcap/powercap";
  CHECK_THROWS_AS(run_matrix(cfg), Error);
  CHECK(!fs::exists(dir.file("results.csv")));
}

TEST_CASE("summarizer reproduces the reference arithmetic") {
  // t_MS = 10 s, t_GBK = 45 s -> 350% reduce-stage runtime overhead;
  // E_GBK = 23,600 J, E_RBK = 11,800 J -> 50% savings, 11,800 J saved.
  auto row = [](const char* app, double rt_ms, double proc_j,
                std::uint64_t kvs) {
    ResultRow r;
    r.app = app;
    r.backend = "sim";
    r.total_words = 1000;
    r.unique_words = 72;
    r.seed = 1;
    r.ranks = 4;
    r.cap_w = "none";
    r.rep = 1;
    r.runtime_ms = rt_ms;
    r.proc_energy_j = proc_j;
    r.dram_fraction = 0.08;
    r.shuffle_kvs = kvs;
    return r;
  };
  const std::vector<ResultRow> rows = {
      row("map_shuffle", 10000, 5000, 1000),
      row("group_by_key", 45000, 23600, 1000),
      row("reduce_by_key", 30000, 11800, 288),
  };
  const auto summary = summarize(rows);
  REQUIRE(summary.size() == 1);
  const SummaryRow& s = summary[0];
  CHECK(*s.reduce_overhead_runtime_pct == doctest::Approx(350.0));
  CHECK(*s.combiner_savings_energy_pct == doctest::Approx(50.0));
  CHECK(*s.joules_saved == doctest::Approx(11800.0));
  CHECK(*s.movement_reduction == doctest::Approx(1000.0 / 288.0));
  CHECK(*s.combiner_savings_runtime_pct ==
        doctest::Approx((45000.0 - 30000.0) / 45000.0 * 100.0));

  const std::string text = format_summary(summary);
  CHECK(text.find("350.00%") != std::string::npos);
  CHECK(text.find("11800.00 J") != std::string::npos);
}

TEST_CASE("summarizer with missing comparators leaves gaps") {
  ResultRow r;
  r.app = "group_by_key";
  r.cap_w = "none";
  r.runtime_ms = 100;
  r.proc_energy_j = 10;
  const auto summary = summarize({r});
  REQUIRE(summary.size() == 1);
  CHECK(!summary[0].reduce_overhead_runtime_pct.has_value());
  CHECK(!summary[0].combiner_savings_runtime_pct.has_value());
  CHECK(format_summary(summary).find("n/a") != std::string::npos);

  CHECK(summarize({}).empty());
  CHECK(format_summary({}).find("no rows") != std::string::npos);
}

TEST_CASE("combiner savings are 0% when GBK and RBK tie") {
  auto row = [](const char* app) {
    ResultRow r;
    r.app = app;
    r.cap_w = "none";
    r.runtime_ms = 100;
    r.proc_energy_j = 10;
    r.shuffle_kvs = 50;
    return r;
  };
  const auto summary = summarize({row("group_by_key"), row("reduce_by_key")});
  REQUIRE(summary.size() == 1);
  CHECK(*summary[0].combiner_savings_runtime_pct == doctest::Approx(0.0));
}

TEST_CASE("plot renders deterministic SVG with a curve pair per cap") {
  TempDir dir;
  auto cfg = small_config(dir);
  cfg.apps = {MiniApp::GroupByKey};
  cfg.reps = 1;
  run_matrix(cfg);

  const auto series = collect_plot_series(dir.file("traces"));
  CHECK(series.size() == 3);  // one rep-1 trace per cap
  const std::string a = render_power_plot_svg(series);
  const std::string b = render_power_plot_svg(series);
  CHECK(a == b);
  // 3 caps x (proc + dram) = 6 curves.
  std::size_t polylines = 0;
  for (std::size_t pos = 0; (pos = a.find("<polyline", pos)) != std::string::npos;
       ++pos)
    ++polylines;
  CHECK(polylines == 6);

  render_power_plot_file(series, dir.file("fig.svg"));
  CHECK(fs::exists(dir.file("fig.svg")));
}

TEST_CASE("empty plot carries a warning annotation") {
  const std::string svg = render_power_plot_svg({});
  CHECK(svg.find("warning") != std::string::npos);
  CHECK(svg.find("<polyline") == std::string::npos);
}

TEST_CASE("constant trace plots horizontal lines") {
  PowerTrace t{100, {}};
  for (int i = 0; i < 5; ++i) {
    t.samples.push_back({i * 100.0, PowerDomain::Processor, 100.0});
    t.samples.push_back({i * 100.0, PowerDomain::Dram, 10.0});
  }
  const std::string svg = render_power_plot_svg({{"cap=none", t}});
  std::size_t polylines = 0;
  for (std::size_t pos = 0;
       (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos)
    ++polylines;
  CHECK(polylines == 2);
  CHECK(svg.find("cap=none proc") != std::string::npos);
  CHECK(svg.find("cap=none dram") != std::string::npos);
}

TEST_CASE("sampler on or off leaves counted outputs identical") {
  TempDir dir;
  auto cfg = small_config(dir);
  cfg.apps = {MiniApp::ReduceByKey};
  cfg.caps = {PowerCap::limit(120)};
  cfg.reps = 1;
  const auto with = run_matrix(cfg);
  cfg.sampler_enabled = false;
  cfg.csv_path = dir.file("results2.csv");
  const auto without = run_matrix(cfg);
  REQUIRE(with.size() == 1);
  REQUIRE(without.size() == 1);
  CHECK(with[0].shuffle_kvs == without[0].shuffle_kvs);
  CHECK(with[0].shuffle_bytes == without[0].shuffle_bytes);
  CHECK(with[0].flush_count == without[0].flush_count);
  CHECK(with[0].runtime_ms == without[0].runtime_ms);
}

TEST_CASE("unique-words sweep runs every point in order") {
  TempDir dir;
  auto cfg = small_config(dir);
  cfg.apps = {MiniApp::ReduceByKey};
  cfg.caps = {PowerCap::unlimited()};
  cfg.reps = 1;
  cfg.spec.total_words = 100000;
  cfg.unique_words_sweep = {72, 4000, 5000, 20000};
  const auto rows = run_matrix(cfg);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(rows[i].unique_words == cfg.unique_words_sweep[i]);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i].shuffle_kvs >= rows[i - 1].shuffle_kvs);
}

TEST_CASE("sim model file overrides calibration") {
  TempDir dir;
  const std::string model_path = dir.file("model.json");
  {
    std::ofstream out(model_path);
    out << R"({"map_watts": 200, "shuffle_watts": 180, "flush_latency_ms": 0.5})";
  }
  const SimPowerModel m = SimPowerModel::load_file(model_path);
  CHECK(m.map.watts == 200);
  CHECK(m.shuffle.watts == 180);
  CHECK(m.flush_latency_ms == 0.5);
  CHECK(m.reduce.watts == 160);  // untouched default

  CHECK_THROWS_AS(SimPowerModel::load_file(dir.file("missing.json")), Error);
  {
    std::ofstream out(dir.file("bad.json"));
    out << "{not json";
  }
  CHECK_THROWS_AS(SimPowerModel::load_file(dir.file("bad.json")), Error);
}
