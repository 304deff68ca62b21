// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "rapl.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <doctest.h>

#include "error.hpp"

using namespace mrcap;
namespace fs = std::filesystem;

namespace {

// Builds <root>/intel-rapl:0 (+ optional dram subzone) mimicking the
// powercap sysfs layout.
struct Fixture {
  fs::path root;

  explicit Fixture(bool with_dram = true) {
    root = fs::temp_directory_path() /
           ("mrcap_rapl_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    const fs::path pkg = root / "intel-rapl:0";
    fs::create_directories(pkg);
    write(pkg / "name", "package-0");
    write(pkg / "energy_uj", "1000000");
    write(pkg / "max_energy_range_uj", "1000000000");
    write(pkg / "constraint_0_power_limit_uw", "215000000");
    if (with_dram) {
      const fs::path dram = pkg / "intel-rapl:0:0";
      fs::create_directories(dram);
      write(dram / "name", "dram");
      write(dram / "energy_uj", "500000");
      write(dram / "max_energy_range_uj", "1000000000");
      write(dram / "constraint_0_power_limit_uw", "0");
    }
  }
  ~Fixture() {
    std::error_code ec;
    fs::remove_all(root, ec);
  }

  static int& counter() {
    static int c = 0;
    return c;
  }
  static void write(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::trunc);
    out << content << "\n";
  }
  void set(const std::string& rel, const std::string& content) const {
    write(root / rel, content);
  }
  std::string get(const std::string& rel) const {
    std::ifstream in(root / rel);
    std::string s;
    std::getline(in, s);
    return s;
  }
};

}  // namespace

TEST_CASE("energy delta handles counter wrap") {
  CHECK(energy_delta_uj(100, 250, 1000) == 150);
  CHECK(energy_delta_uj(999999900, 50, 1000000000) == 150);
  CHECK(energy_delta_uj(7, 7, 1000) == 0);

  // Any wrap stays within [0, max].
  std::mt19937_64 rng(123);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t max = rng() % 1000000000 + 1;
    const std::uint64_t prev = rng() % max;
    const std::uint64_t curr = rng() % (prev + 1);
    const std::uint64_t d = energy_delta_uj(prev, curr, max);
    CHECK(d <= max);
  }
}

TEST_CASE("watts from microjoule delta") {
  CHECK(watts_from_delta(10000, 100) == doctest::Approx(0.1));
  CHECK(watts_from_delta(0, 100) == 0.0);
  CHECK_THROWS_AS(watts_from_delta(1, 0), Error);
}

TEST_CASE("backend discovers package and dram zones") {
  Fixture fx;
  RaplBackend backend(fx.root.string());
  CHECK(backend.package_count() == 1);
  CHECK(backend.dram_count() == 1);
}

TEST_CASE("missing root is a capability error") {
  CHECK_THROWS_AS(RaplBackend("/nonexistent/mrcap/powercap"), Error);
  CHECK(!RaplBackend::available("/nonexistent/mrcap/powercap"));
  Fixture fx;
  CHECK(RaplBackend::available(fx.root.string()));
}

TEST_CASE("cap write lands in microwatts") {
  Fixture fx;
  RaplBackend backend(fx.root.string());
  backend.set_cap(PowerDomain::Processor, PowerCap::limit(140));
  CHECK(fx.get("intel-rapl:0/constraint_0_power_limit_uw") == "140000000");
  backend.set_cap(PowerDomain::Dram, PowerCap::limit(20));
  CHECK(fx.get("intel-rapl:0/intel-rapl:0:0/constraint_0_power_limit_uw") ==
        "20000000");
  // Unlimited records nothing and writes nothing.
  backend.set_cap(PowerDomain::Processor, PowerCap::unlimited());
  CHECK(fx.get("intel-rapl:0/constraint_0_power_limit_uw") == "140000000");
}

TEST_CASE("poll reports watts from counter deltas, with wrap") {
  Fixture fx;
  RaplBackend backend(fx.root.string());

  fx.set("intel-rapl:0/energy_uj", "1010000");  // +10000 uJ
  fx.set("intel-rapl:0/intel-rapl:0:0/energy_uj", "501000");
  RaplBackend::Reading r = backend.poll(100);
  REQUIRE(r.processor_w.has_value());
  CHECK(*r.processor_w == doctest::Approx(0.1));
  REQUIRE(r.dram_w.has_value());
  CHECK(*r.dram_w == doctest::Approx(0.01));

  // Wrap: 999,999,900 -> 50 at max 1e9 is a 150 uJ delta.
  fx.set("intel-rapl:0/energy_uj", "999999900");
  backend.prime();
  fx.set("intel-rapl:0/energy_uj", "50");
  r = backend.poll(100);
  REQUIRE(r.processor_w.has_value());
  CHECK(*r.processor_w == doctest::Approx(150.0 / 100.0 / 1000.0));
}

TEST_CASE("failed reads yield gaps, not values") {
  Fixture fx;
  RaplBackend backend(fx.root.string());
  fx.set("intel-rapl:0/energy_uj", "not-a-number");
  const RaplBackend::Reading r = backend.poll(100);
  CHECK(!r.processor_w.has_value());
}

TEST_CASE("MRCAP_POWERCAP_ROOT env override resolves the root") {
  Fixture fx;
  ::setenv("MRCAP_POWERCAP_ROOT", fx.root.c_str(), 1);
  CHECK(powercap_root() == fx.root);
  RaplBackend backend;  // no explicit root
  CHECK(backend.package_count() == 1);
  ::unsetenv("MRCAP_POWERCAP_ROOT");
  CHECK(powercap_root({std::string("/explicit")}) == fs::path("/explicit"));
  CHECK(powercap_root() == fs::path("/sys/class/powercap"));
}

TEST_CASE("sampler collects a trace from a live fixture") {
  Fixture fx;
  RaplBackend backend(fx.root.string());
  RaplSampler sampler(backend);
  sampler.start(20);
  // Feed the counter while the sampler runs: ~2000 uJ per 20 ms is 0.1 W.
  for (int i = 1; i <= 8; ++i) {
    fx.set("intel-rapl:0/energy_uj", std::to_string(1000000 + i * 2000));
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  const PowerTrace trace = sampler.stop();
  CHECK(sampler.stop().samples.size() == trace.samples.size());  // idempotent
  CHECK(trace.interval_ms == 20);
  CHECK(!trace.samples.empty());
  for (const PowerSample& s : trace.samples) CHECK(s.watts >= 0.0);
  double prev_proc_t = -1;
  for (const PowerSample& s : trace.samples) {
    if (s.domain != PowerDomain::Processor) continue;
    CHECK(s.t_ms > prev_proc_t);
    prev_proc_t = s.t_ms;
  }
}
