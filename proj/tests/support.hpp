// support.hpp
//
// Scenario builders and hand-rolled random generators shared by the tests.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "vrmec/decision.hpp"
#include "vrmec/latency.hpp"
#include "vrmec/model.hpp"
#include "vrmec/radio.hpp"

namespace vrmec::testing {

// Hand-set scenario: unit gains 1e-6, n0 1e-9, W 1e6 Hz, P_T 1 W, f_M 1e10,
// f_V 2e9, k = 1e-27, 1 Mb viewpoints of 50 cycles/bit, uniform popularity,
// generous caches and budgets.
inline Scenario manual_scenario(std::size_t M, std::size_t U, std::size_t N) {
  Scenario s;
  s.sbs_count = M;
  s.hmd_count = U;
  s.viewpoints.resize(N);
  for (std::size_t i = 0; i < N; ++i) s.viewpoints[i] = {i + 1, 1e6, 50.0, 1.0 / static_cast<double>(N)};
  s.sv_ratio = 4.0;
  s.channel_gain.assign(M * U, 1e-6);
  s.bandwidth_per_hmd_hz = 1e6;
  s.noise_power_w = 1e-9;
  s.orthogonality = 0.5;
  s.total_power_w = 1.0;
  s.mes_cpu_hz = 1e10;
  s.hmd_cpu_hz = 2e9;
  s.mes_energy_coeff = 1e-27;
  s.hmd_energy_coeff = 1e-27;
  s.mes_cache_bits.assign(M, 1e9);
  s.hmd_cache_bits.assign(U, 1e9);
  s.mes_energy_budget_j.assign(M, 1e9);
  s.hmd_energy_budget_j.assign(U, 1e9);
  s.backhaul_delay_s = 0.1;
  s.sbs_positions.assign(M, {});
  s.hmd_positions.assign(U, {});
  return s;
}

// Small generated instance with tight enough caches that every solver has to
// trade off paths.
inline GenerationConfig tiny_config(std::size_t M, std::size_t U, std::size_t N) {
  GenerationConfig g;
  g.sbs_count = M;
  g.hmd_count = U;
  g.viewpoint_count = N;
  g.mes_cache_bits = 6e6;
  g.hmd_cache_bits = 3e6;
  return g;
}

// Caches and energy budgets large enough that only structural constraints bind.
inline Scenario generous(Scenario s) {
  s.mes_cache_bits.assign(s.sbs_count, 1e12);
  s.hmd_cache_bits.assign(s.hmd_count, 1e12);
  s.mes_energy_budget_j.assign(s.sbs_count, 1e12);
  s.hmd_energy_budget_j.assign(s.hmd_count, 1e12);
  return s;
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::uint64_t seed() { return rng_(); }

  // Random scenario with log-uniform gains and mixed capacities.
  Scenario scenario(std::size_t M, std::size_t U, std::size_t N) {
    Scenario s = manual_scenario(M, U, N);
    for (double& h : s.channel_gain) h = std::pow(10.0, uniform(-9.0, -5.0));
    const auto q = zipf_popularity(N, uniform(0.0, 1.5));
    for (std::size_t i = 0; i < N; ++i) {
      s.viewpoints[i].mv_size_bits = uniform(0.5e6, 2e6);
      s.viewpoints[i].popularity = q[i];
    }
    for (double& c : s.mes_cache_bits) c = uniform(0.0, 10e6);
    for (double& c : s.hmd_cache_bits) c = uniform(0.0, 6e6);
    for (double& e : s.mes_energy_budget_j) e = uniform(0.5, 10.0);
    for (double& e : s.hmd_energy_budget_j) e = uniform(0.05, 1.0);
    return s;
  }

  // Random binary tensors, unconstrained.
  Decision any_decision(const Scenario& s, double density = 0.3) {
    Decision d(s);
    for (auto* v : {&d.cache_mes_mv, &d.cache_mes_sv, &d.cache_hmd_mv, &d.cache_hmd_sv, &d.offload_mes,
                    &d.offload_cloud})
      for (auto& b : *v) b = coin(density);
    for (double& p : d.power.p) p = uniform(0.0, s.total_power_w / static_cast<double>(s.hmd_count));
    return d;
  }

  // A decision that satisfies every constraint when caches and budgets are
  // generous: each request is served locally, from an MES or from the cloud,
  // every MES holds the SV of what it serves, and power is split equally.
  Decision structured_decision(const Scenario& s) {
    const std::size_t N = s.viewpoint_count(), M = s.sbs_count, U = s.hmd_count;
    Decision d(s);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t u = 0; u < U; ++u) {
        const std::size_t m = index(M);
        switch (index(3)) {
          case 0: d.hmd_sv(i, u) = 1; break;
          case 1:
            d.to_mes(i, m, u) = 1;
            d.mes_sv(i, m) = 1;
            break;
          default: d.to_cloud(i, m, u) = 1; break;
        }
      }
    d.power = equal_split(s, link_load(s, d));
    return d;
  }

 private:
  std::mt19937_64 rng_;
};

// Scenario and decision for the constraint mutation harness: every request is
// served from the HMD's SV cache, which fills each HMD cache exactly.
struct MutationBase {
  Scenario scenario;
  Decision decision;
};

inline MutationBase mutation_base(std::size_t M, std::size_t U, std::size_t N) {
  MutationBase b{manual_scenario(M, U, N), Decision{}};
  b.scenario.hmd_cache_bits.assign(U, static_cast<double>(N) * b.scenario.sv_size(0));
  b.scenario.mes_cache_bits.assign(M, 1.5 * b.scenario.sv_size(0));
  b.decision = Decision(b.scenario);
  for (auto& c : b.decision.cache_hmd_sv) c = 1;
  return b;
}

// Breaks exactly one constraint of a mutation_base pair at request (i, u)
// through SBS m (and a second SBS other != m where two are needed). Energy
// violations lower the budget of the affected device.
inline void inject_violation(Constraint c, Scenario& s, Decision& d, std::size_t i, std::size_t m,
                             std::size_t other, std::size_t u) {
  const std::size_t U = s.hmd_count;
  switch (c) {
    case Constraint::ExclusivePath:
      d.to_mes(i, m, u) = 1;
      d.mes_sv(i, m) = 1;
      d.to_cloud(i, m, u) = 1;
      break;
    case Constraint::SingleMesOffload:
      d.to_mes(i, m, u) = d.to_mes(i, other, u) = 1;
      d.mes_sv(i, m) = d.mes_sv(i, other) = 1;
      break;
    case Constraint::SingleCloudOffload: d.to_cloud(i, m, u) = d.to_cloud(i, other, u) = 1; break;
    case Constraint::MesCache:
      d.mes_sv(i, m) = 1;
      d.mes_sv((i + 1) % s.viewpoint_count(), m) = 1;
      break;
    case Constraint::HmdCache: d.hmd_mv(i, u) = 1; break;
    case Constraint::MesEnergy:
      d.to_mes(i, m, u) = 1;
      d.mes_mv(i, m) = 1;
      s.mes_energy_budget_j[m] = 0.5 * s.popularity(i) * s.mes_task_energy(i);
      break;
    case Constraint::HmdEnergy:
      d.hmd_sv(i, u) = 0;
      d.hmd_mv(i, u) = 1;
      s.hmd_energy_budget_j[u] = 0.5 * s.popularity(i) * s.hmd_task_energy(i);
      break;
    case Constraint::PowerEntries: d.power(m, u) = -0.1 * s.total_power_w; break;
    case Constraint::PowerBudget:
      d.power(m, u) = 0.7 * s.total_power_w;
      d.power(m, (u + 1) % U) += 0.7 * s.total_power_w;
      break;
    case Constraint::MesCoupling: d.to_mes(i, m, u) = 1; break;
    case Constraint::ServiceCoverage: d.hmd_sv(i, u) = 0; break;
  }
}

inline bool near_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace vrmec::testing
