// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "rapl.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

#include "error.hpp"

namespace mrcap {

namespace fs = std::filesystem;

std::uint64_t energy_delta_uj(std::uint64_t prev, std::uint64_t curr,
                              std::uint64_t max_range) {
  if (curr >= prev) return curr - prev;
  return (max_range - prev) + curr;
}

double watts_from_delta(std::uint64_t delta_uj, double dt_ms) {
  if (dt_ms <= 0)
    throw Error(ErrorKind::Usage, "rapl: nonpositive sample interval");
  return static_cast<double>(delta_uj) / dt_ms / 1000.0;
}

namespace {

std::string read_line(const fs::path& file) {
  std::ifstream in(file);
  std::string line;
  if (!in || !std::getline(in, line))
    throw Error(ErrorKind::Capability, "rapl: cannot read " + file.string());
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r'))
    line.pop_back();
  return line;
}

std::uint64_t read_u64(const fs::path& file) {
  const std::string line = read_line(file);
  try {
    return std::stoull(line);
  } catch (const std::exception&) {
    throw Error(ErrorKind::Capability,
                "rapl: non-numeric content in " + file.string());
  }
}

}  // namespace

RaplZone::RaplZone(fs::path dir) : dir_(std::move(dir)) {}

std::string RaplZone::name() const { return read_line(dir_ / "name"); }

std::uint64_t RaplZone::read_energy_uj() const {
  return read_u64(dir_ / "energy_uj");
}

std::uint64_t RaplZone::max_energy_range_uj() const {
  return read_u64(dir_ / "max_energy_range_uj");
}

void RaplZone::write_power_limit_uw(std::uint64_t uw) const {
  const fs::path file = dir_ / "constraint_0_power_limit_uw";
  std::ofstream out(file, std::ios::trunc);
  if (!out)
    throw Error(ErrorKind::Capability, "rapl: cannot write " + file.string());
  out << uw;
  out.flush();
  if (!out)
    throw Error(ErrorKind::Capability, "rapl: write failed " + file.string());
}

fs::path powercap_root(const std::optional<std::string>& override_root) {
  if (override_root) return *override_root;
  if (const char* env = std::getenv("MRCAP_POWERCAP_ROOT")) return env;
  return "/sys/class/powercap";
}

RaplBackend::RaplBackend(const std::optional<std::string>& root) {
  const fs::path base = powercap_root(root);
  std::error_code ec;
  if (!fs::is_directory(base, ec))
    throw Error(ErrorKind::Capability,
                "rapl: powercap root not found: " + base.string());

  const std::regex package_re("intel-rapl:[0-9]+");
  std::vector<fs::path> package_dirs;
  for (const auto& entry : fs::directory_iterator(base, ec)) {
    if (std::regex_match(entry.path().filename().string(), package_re))
      package_dirs.push_back(entry.path());
  }
  std::sort(package_dirs.begin(), package_dirs.end());

  for (const fs::path& pkg : package_dirs) {
    if (!fs::exists(pkg / "energy_uj")) continue;
    packages_.emplace_back(pkg);
    const std::regex sub_re("intel-rapl:[0-9]+:[0-9]+");
    std::vector<fs::path> subdirs;
    for (const auto& entry : fs::directory_iterator(pkg, ec))
      if (std::regex_match(entry.path().filename().string(), sub_re))
        subdirs.push_back(entry.path());
    std::sort(subdirs.begin(), subdirs.end());
    for (const fs::path& sub : subdirs) {
      RaplZone zone(sub);
      try {
        if (zone.name() == "dram") drams_.push_back(zone);
      } catch (const Error&) {
        // unreadable subzone, skip
      }
    }
  }
  if (packages_.empty())
    throw Error(ErrorKind::Capability,
                "rapl: no readable intel-rapl package zones under " +
                    base.string());
  prime();
}

bool RaplBackend::available(const std::optional<std::string>& root) {
  try {
    RaplBackend probe(root);
    return true;
  } catch (const Error&) {
    return false;
  }
}

void RaplBackend::set_cap(PowerDomain domain, PowerCap cap) {
  cap.validate();
  if (!cap.is_limited()) return;
  const auto uw = static_cast<std::uint64_t>(*cap.watts * 1e6);
  const std::vector<RaplZone>& zones =
      domain == PowerDomain::Processor ? packages_ : drams_;
  if (zones.empty())
    throw Error(ErrorKind::Capability,
                std::string("rapl: no zones for domain ") +
                    power_domain_name(domain));
  for (const RaplZone& z : zones) z.write_power_limit_uw(uw);
}

void RaplBackend::prime() {
  prev_package_uj_.clear();
  prev_dram_uj_.clear();
  for (const RaplZone& z : packages_) prev_package_uj_.push_back(z.read_energy_uj());
  for (const RaplZone& z : drams_) prev_dram_uj_.push_back(z.read_energy_uj());
}

RaplBackend::Reading RaplBackend::poll(double dt_ms) {
  Reading r;
  auto poll_set = [&](const std::vector<RaplZone>& zones,
                      std::vector<std::uint64_t>& prev) -> std::optional<double> {
    if (zones.empty()) return std::nullopt;
    double watts = 0;
    for (std::size_t i = 0; i < zones.size(); ++i) {
      try {
        const std::uint64_t curr = zones[i].read_energy_uj();
        const std::uint64_t delta =
            energy_delta_uj(prev[i], curr, zones[i].max_energy_range_uj());
        prev[i] = curr;
        watts += watts_from_delta(delta, dt_ms);
      } catch (const Error&) {
        return std::nullopt;
      }
    }
    return watts;
  };
  r.processor_w = poll_set(packages_, prev_package_uj_);
  r.dram_w = poll_set(drams_, prev_dram_uj_);
  return r;
}

// --- sampler ----------------------------------------------------------

struct RaplSampler::Impl {
  std::thread thread;
  std::atomic<bool> stop{false};
  std::vector<PowerSample> samples;
  std::atomic<std::uint64_t> failures{0};
  double interval_ms = 100;
};

RaplSampler::RaplSampler(RaplBackend& backend) : backend_(backend) {}

RaplSampler::~RaplSampler() {
  if (impl_) stop();
}

void RaplSampler::start(double interval_ms) {
  if (interval_ms <= 0)
    throw Error(ErrorKind::Config, "sampler: interval must be > 0");
  if (impl_)
    throw Error(ErrorKind::Usage, "sampler: already running");
  backend_.prime();
  impl_ = std::make_unique<Impl>();
  impl_->interval_ms = interval_ms;
  Impl* impl = impl_.get();
  RaplBackend* backend = &backend_;
  impl->thread = std::thread([impl, backend] {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    auto last = start;
    std::uint64_t tick = 0;
    while (!impl->stop.load(std::memory_order_acquire)) {
      const auto next =
          start + std::chrono::duration_cast<clock::duration>(
                      std::chrono::duration<double, std::milli>(
                          (tick + 1) * impl->interval_ms));
      std::this_thread::sleep_until(next);
      if (impl->stop.load(std::memory_order_acquire)) break;
      const auto now = clock::now();
      const double dt =
          std::chrono::duration<double, std::milli>(now - last).count();
      last = now;
      const RaplBackend::Reading r = backend->poll(dt);
      const double t = static_cast<double>(tick) * impl->interval_ms;
      if (r.processor_w)
        impl->samples.push_back({t, PowerDomain::Processor, *r.processor_w});
      else
        impl->failures.fetch_add(1);
      if (r.dram_w)
        impl->samples.push_back({t, PowerDomain::Dram, *r.dram_w});
      ++tick;
    }
  });
}

PowerTrace RaplSampler::stop() {
  if (impl_) {
    impl_->stop.store(true, std::memory_order_release);
    if (impl_->thread.joinable()) impl_->thread.join();
    trace_ = PowerTrace{impl_->interval_ms, std::move(impl_->samples)};
    failed_reads_ = impl_->failures.load();
    impl_.reset();
  }
  return trace_;
}

}  // namespace mrcap
