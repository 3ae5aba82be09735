#include "vrmec/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace vrmec {

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double PathLoss::gain(double distance_m) const {
  return ref_gain * std::pow(std::max(distance_m, ref_distance_m), -exponent);
}

GenerationConfig GenerationConfig::desk_preset() { return GenerationConfig{}; }

GenerationConfig GenerationConfig::large_preset() {
  GenerationConfig c;
  c.sbs_count = 40;
  c.hmd_count = 100;
  c.viewpoint_count = 100;
  c.size_min_bits = 10e6;
  c.size_max_bits = 30e6;
  c.mes_cache_bits = 240e6;
  c.hmd_cache_bits = 80e6;
  c.mes_energy_budget_j = 200.0;
  c.hmd_energy_budget_j = 5.0;
  return c;
}

double Scenario::mes_compute_delay(std::size_t i) const {
  return viewpoints[i].mv_size_bits * viewpoints[i].cycles_per_bit / mes_cpu_hz;
}

double Scenario::hmd_compute_delay(std::size_t i) const {
  return viewpoints[i].mv_size_bits * viewpoints[i].cycles_per_bit / hmd_cpu_hz;
}

double Scenario::mes_task_energy(std::size_t i) const {
  return mes_energy_coeff * mes_cpu_hz * mes_cpu_hz * viewpoints[i].mv_size_bits *
         viewpoints[i].cycles_per_bit;
}

double Scenario::hmd_task_energy(std::size_t i) const {
  return hmd_energy_coeff * hmd_cpu_hz * hmd_cpu_hz * viewpoints[i].mv_size_bits *
         viewpoints[i].cycles_per_bit;
}

std::size_t Scenario::nearest_sbs(std::size_t u) const {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < sbs_count; ++m) {
    const double dist = distance(sbs_positions[m], hmd_positions[u]);
    if (dist < best_dist) {
      best_dist = dist;
      best = m;
    }
  }
  return best;
}

std::vector<double> zipf_popularity(std::size_t n, double lambda) {
  if (n == 0) throw DomainError("zipf_popularity: empty catalog");
  if (!(lambda >= 0.0)) throw DomainError("zipf_popularity: lambda must be >= 0");
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = std::pow(static_cast<double>(i + 1), -lambda);
  // Sum smallest terms first.
  double total = 0.0;
  for (std::size_t i = n; i-- > 0;) total += q[i];
  for (double& v : q) v /= total;
  return q;
}

namespace {

void check_config(const GenerationConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  if (c.sbs_count == 0) throw ConfigError("sbs_count must be >= 1");
  if (c.hmd_count == 0) throw ConfigError("hmd_count must be >= 1");
  if (c.viewpoint_count == 0) throw ConfigError("viewpoint_count must be >= 1");
  positive(c.area_side_m, "area_side_m");
  positive(c.size_min_bits, "size_min_bits");
  positive(c.size_max_bits, "size_max_bits");
  if (c.size_max_bits < c.size_min_bits) throw ConfigError("size_max_bits < size_min_bits");
  positive(c.cycles_per_bit, "cycles_per_bit");
  positive(c.total_bandwidth_hz, "total_bandwidth_hz");
  if (c.bandwidth_per_hmd_hz) positive(*c.bandwidth_per_hmd_hz, "bandwidth_per_hmd_hz");
  positive(c.noise_power_w, "noise_power_w");
  positive(c.mes_cpu_hz, "mes_cpu_hz");
  positive(c.hmd_cpu_hz, "hmd_cpu_hz");
  positive(c.path_loss.ref_gain, "path_loss.ref_gain");
  positive(c.path_loss.ref_distance_m, "path_loss.ref_distance_m");
  positive(c.path_loss.exponent, "path_loss.exponent");
  if (c.zipf_lambda < 0.0) throw ConfigError("zipf_lambda must be >= 0");
  if (c.mes_cache_bits < 0.0 || c.hmd_cache_bits < 0.0) throw ConfigError("cache sizes must be >= 0");
}

}  // namespace

Scenario generate_scenario(const GenerationConfig& config, std::uint64_t seed) {
  check_config(config);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, config.area_side_m);
  std::uniform_real_distribution<double> size(config.size_min_bits, config.size_max_bits);

  Scenario s;
  s.sbs_count = config.sbs_count;
  s.hmd_count = config.hmd_count;
  s.seed = seed;
  s.generation = config;

  // Draw order is part of the determinism contract: SBSs, HMDs, sizes.
  s.sbs_positions.resize(s.sbs_count);
  for (auto& p : s.sbs_positions) {
    p.x = coord(rng);
    p.y = coord(rng);
  }
  s.hmd_positions.resize(s.hmd_count);
  for (auto& p : s.hmd_positions) {
    p.x = coord(rng);
    p.y = coord(rng);
  }

  const auto q = zipf_popularity(config.viewpoint_count, config.zipf_lambda);
  s.viewpoints.resize(config.viewpoint_count);
  for (std::size_t i = 0; i < config.viewpoint_count; ++i) {
    s.viewpoints[i].id = i + 1;
    s.viewpoints[i].mv_size_bits = size(rng);
    s.viewpoints[i].cycles_per_bit = config.cycles_per_bit;
    s.viewpoints[i].popularity = q[i];
  }

  s.channel_gain.resize(s.sbs_count * s.hmd_count);
  for (std::size_t m = 0; m < s.sbs_count; ++m)
    for (std::size_t u = 0; u < s.hmd_count; ++u)
      s.channel_gain[m * s.hmd_count + u] =
          config.path_loss.gain(distance(s.sbs_positions[m], s.hmd_positions[u]));

  s.sv_ratio = config.sv_ratio;
  s.bandwidth_per_hmd_hz = config.bandwidth_per_hmd_hz.value_or(
      config.total_bandwidth_hz / static_cast<double>(config.hmd_count));
  s.noise_power_w = config.noise_power_w;
  s.orthogonality = config.orthogonality;
  s.total_power_w = std::pow(10.0, config.total_power_dbm / 10.0) * 1e-3;
  s.mes_cpu_hz = config.mes_cpu_hz;
  s.hmd_cpu_hz = config.hmd_cpu_hz;
  s.mes_energy_coeff = config.mes_energy_coeff;
  s.hmd_energy_coeff = config.hmd_energy_coeff;
  s.mes_cache_bits.assign(s.sbs_count, config.mes_cache_bits);
  s.hmd_cache_bits.assign(s.hmd_count, config.hmd_cache_bits);
  s.mes_energy_budget_j.assign(s.sbs_count, config.mes_energy_budget_j);
  s.hmd_energy_budget_j.assign(s.hmd_count, config.hmd_energy_budget_j);
  s.backhaul_delay_s = config.backhaul_delay_s;
  return s;
}

std::vector<Violation> validate_scenario(const Scenario& s) {
  std::vector<Violation> out;
  auto add = [&out](std::string field, std::string message) {
    out.push_back({std::move(field), std::move(message)});
  };
  auto positive = [&add](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) add(field, "must be finite and > 0");
  };
  auto all_at_least = [&add](const std::vector<double>& v, std::size_t n, double floor, bool strict,
                            const char* field) {
    if (v.size() != n) {
      std::ostringstream os;
      os << "expected " << n << " entries, got " << v.size();
      add(field, os.str());
      return;
    }
    for (double x : v)
      if (!std::isfinite(x) || (strict ? !(x > floor) : !(x >= floor))) {
        add(field, strict ? "every entry must be finite and > 0" : "every entry must be finite and >= 0");
        return;
      }
  };

  if (s.sbs_count == 0) add("sbs_count", "must be >= 1");
  if (s.hmd_count == 0) add("hmd_count", "must be >= 1");
  if (s.viewpoints.empty()) add("viewpoints", "catalog must be non-empty");
  if (!(s.sv_ratio > 2.0)) add("sv_ratio", "sv_ratio must exceed 2");
  if (!(s.orthogonality >= 0.0 && s.orthogonality <= 1.0)) add("orthogonality", "must lie in [0,1]");

  if (s.channel_gain.size() != s.sbs_count * s.hmd_count) {
    add("channel_gain", "dimensions must be exactly M x U");
  } else {
    for (double h : s.channel_gain)
      if (!(h > 0.0) || !std::isfinite(h)) {
        add("channel_gain", "every gain must be finite and > 0");
        break;
      }
  }

  positive(s.bandwidth_per_hmd_hz, "bandwidth_per_hmd_hz");
  positive(s.noise_power_w, "noise_power_w");
  positive(s.total_power_w, "total_power_w");
  positive(s.mes_cpu_hz, "mes_cpu_hz");
  positive(s.hmd_cpu_hz, "hmd_cpu_hz");
  positive(s.mes_energy_coeff, "mes_energy_coeff");
  positive(s.hmd_energy_coeff, "hmd_energy_coeff");
  positive(s.backhaul_delay_s, "backhaul_delay_s");
  // A cache of capacity zero is a legitimate sweep point.
  all_at_least(s.mes_cache_bits, s.sbs_count, 0.0, false, "mes_cache_bits");
  all_at_least(s.hmd_cache_bits, s.hmd_count, 0.0, false, "hmd_cache_bits");
  all_at_least(s.mes_energy_budget_j, s.sbs_count, 0.0, true, "mes_energy_budget_j");
  all_at_least(s.hmd_energy_budget_j, s.hmd_count, 0.0, true, "hmd_energy_budget_j");

  double total_q = 0.0;
  for (const auto& v : s.viewpoints) {
    if (!(v.mv_size_bits > 0.0)) add("viewpoints.mv_size_bits", "must be > 0");
    if (!(v.cycles_per_bit > 0.0)) add("viewpoints.cycles_per_bit", "must be > 0");
    if (!(v.popularity > 0.0 && v.popularity <= 1.0)) add("viewpoints.popularity", "must lie in (0,1]");
    total_q += v.popularity;
  }
  if (!s.viewpoints.empty() && std::abs(total_q - 1.0) > 1e-9)
    add("viewpoints.popularity", "popularities must sum to 1 within 1e-9");
  return out;
}

}  // namespace vrmec
