#include "vrmec/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <list>
#include <numeric>
#include <random>

#include "vrmec/latency.hpp"

namespace vrmec {

namespace {

bool fits(double used, double extra, double capacity) {
  return used + extra <= capacity + kBudgetSlack * std::max(1.0, capacity);
}

std::vector<std::size_t> by_popularity(const Scenario& s) {
  std::vector<std::size_t> order(s.viewpoint_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.popularity(a) > s.popularity(b); });
  return order;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SolveResult from_outcome(const Scenario& s, std::string name, GreedyOutcome out) {
  SolveResult r;
  r.algorithm = std::move(name);
  r.feasible = out.feasible;
  r.best_decision = std::move(out.decision);
  if (r.feasible) {
    r.best_value = out.value;
    r.global_lower_bound = out.value;
  } else {
    r.best_decision = Decision(s);
    r.note = out.reason;
  }
  return r;
}

}  // namespace

RequestTrace make_trace(const Scenario& s, std::uint64_t seed, std::size_t length) {
  const std::size_t N = s.viewpoint_count(), U = s.hmd_count;
  if (length == 0) length = 20 * N * U;
  RequestTrace trace;
  trace.seed = seed;
  if (U == 0 || N == 0) return trace;
  std::vector<double> q(N);
  for (std::size_t i = 0; i < N; ++i) q[i] = s.popularity(i);
  std::discrete_distribution<std::size_t> pick(q.begin(), q.end());
  std::mt19937_64 rng(seed);
  trace.entries.reserve(length);
  for (std::size_t t = 0; t < length; ++t) trace.entries.push_back({t, t % U, pick(rng)});
  return trace;
}

SolveResult solve_nearest_offloading(const Scenario& s, const PowerOptions& power) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t M = s.sbs_count, U = s.hmd_count;
  Decision d(s);
  const auto order = by_popularity(s);

  // HMD caches by popularity: the SV when it fits, else the MV within energy.
  for (std::size_t u = 0; u < U; ++u) {
    double used = 0.0, energy = 0.0;
    for (std::size_t i : order) {
      const double e = s.popularity(i) * s.hmd_task_energy(i);
      if (fits(used, s.sv_size(i), s.hmd_cache_bits[u])) {
        d.hmd_sv(i, u) = 1;
        used += s.sv_size(i);
      } else if (fits(used, s.mv_size(i), s.hmd_cache_bits[u]) && fits(energy, e, s.hmd_energy_budget_j[u])) {
        d.hmd_mv(i, u) = 1;
        used += s.mv_size(i);
        energy += e;
      }
    }
  }

  // Everything else goes to the nearest MES when it admits, else the cloud.
  std::vector<double> used(M, 0.0), energy(M, 0.0);
  for (std::size_t i : order)
    for (std::size_t u = 0; u < U; ++u) {
      if (d.hmd_sv(i, u) || d.hmd_mv(i, u)) continue;
      const std::size_t m = s.nearest_sbs(u);
      const double e = s.popularity(i) * s.mes_task_energy(i);
      bool admitted = false;
      if (d.mes_sv(i, m)) {
        admitted = true;
      } else if (d.mes_mv(i, m)) {
        if (fits(energy[m], e, s.mes_energy_budget_j[m])) energy[m] += e, admitted = true;
      } else if (fits(used[m], s.mv_size(i), s.mes_cache_bits[m]) && fits(energy[m], e, s.mes_energy_budget_j[m])) {
        d.mes_mv(i, m) = 1;
        used[m] += s.mv_size(i);
        energy[m] += e;
        admitted = true;
      } else if (fits(used[m], s.sv_size(i), s.mes_cache_bits[m])) {
        d.mes_sv(i, m) = 1;
        used[m] += s.sv_size(i);
        admitted = true;
      }
      if (admitted)
        d.to_mes(i, m, u) = 1;
      else
        d.to_cloud(i, m, u) = 1;
    }

  PowerSpec spec;
  spec.options = power;
  GreedyOutcome out = greedy_cache_power(s, d, nullptr, spec);
  if (!out.feasible) {
    // The reservation above is itself a valid caching for this offload.
    GreedyOutcome own;
    own.decision = d;
    own.decision.power = allocate_power(s, d, power);
    const auto report = check_feasibility(s, own.decision);
    own.value = objective(s, own.decision);
    own.feasible = report.feasible() && !is_unreachable(own.value);
    own.reason = own.feasible ? "" : "nearest offloading found no feasible caching:\n" + report.to_table();
    out = std::move(own);
  }
  SolveResult r = from_outcome(s, "no", std::move(out));
  r.wall_time_s = seconds_since(t0);
  return r;
}

PowerAllocation equal_power(const Scenario& s, double coverage_m) {
  const double threshold = s.generation.path_loss.gain(coverage_m);
  PowerAllocation p(s.sbs_count, s.hmd_count);
  for (std::size_t m = 0; m < s.sbs_count; ++m) {
    std::size_t covered = 0;
    for (std::size_t u = 0; u < s.hmd_count; ++u) covered += s.gain(m, u) >= threshold;
    if (covered == 0) continue;
    for (std::size_t u = 0; u < s.hmd_count; ++u)
      if (s.gain(m, u) >= threshold) p(m, u) = s.total_power_w / static_cast<double>(covered);
  }
  return p;
}

SolveResult solve_power_equal(const Scenario& s, const SolverConfig& cfg, double coverage_m) {
  SolverConfig pinned = cfg;
  pinned.pinned_power = equal_power(s, coverage_m);
  pinned.algorithm = "pea";
  return jcpt_solve(s, pinned);
}

SolveResult solve_popularity_first(const Scenario& s, const SolverConfig& cfg) {
  SolverConfig pinned = cfg;
  pinned.pinned_caches = popularity_caches(s);
  pinned.algorithm = "pf";
  return jcpt_solve(s, pinned);
}

namespace {

enum class Version : std::uint8_t { Mv, Sv };

// One LRU cache node; front of the list is most recently used.
class LruNode {
 public:
  LruNode(std::size_t n, double capacity, double budget)
      : capacity_(capacity), budget_(budget), where_(n), present_(n, 0), version_(n, Version::Mv) {}

  bool holds(std::size_t i) const { return present_[i] != 0; }
  Version version(std::size_t i) const { return version_[i]; }

  void touch(std::size_t i) { entries_.splice(entries_.begin(), entries_, where_[i]); }

  // Inserts i at the given footprint and energy, evicting from the back until
  // both fit. Returns false (leaving the node unchanged) if it never can.
  bool insert(std::size_t i, Version v, double bits, double energy, const std::vector<double>& sizes,
              const std::vector<double>& energies) {
    if (!fits(0.0, bits, capacity_) || !fits(0.0, energy, budget_)) return false;
    while (!fits(used_, bits, capacity_) || !fits(spent_, energy, budget_)) {
      const std::size_t victim = entries_.back();
      used_ -= sizes[victim];
      spent_ -= energies[victim];
      present_[victim] = 0;
      entries_.pop_back();
    }
    entries_.push_front(i);
    where_[i] = entries_.begin();
    present_[i] = 1;
    version_[i] = v;
    used_ += bits;
    spent_ += energy;
    return true;
  }

 private:
  double capacity_, budget_;
  double used_ = 0.0, spent_ = 0.0;
  std::list<std::size_t> entries_;
  std::vector<std::list<std::size_t>::iterator> where_;
  std::vector<std::uint8_t> present_;
  std::vector<Version> version_;
};

}  // namespace

SolveResult solve_lru(const Scenario& s, const RequestTrace& trace, const PowerOptions& power) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t N = s.viewpoint_count(), M = s.sbs_count, U = s.hmd_count;
  for (const auto& e : trace.entries)
    if (e.viewpoint >= N || e.hmd >= U) throw DomainError("solve_lru: trace references an unknown viewpoint or HMD");

  std::vector<std::size_t> nearest(U), associated(M, 0);
  for (std::size_t u = 0; u < U; ++u) {
    nearest[u] = s.nearest_sbs(u);
    ++associated[nearest[u]];
  }

  // Power for the nearest-association load; rates stay fixed over the trace.
  std::vector<double> load(M * U, 0.0);
  for (std::size_t u = 0; u < U; ++u)
    for (std::size_t i = 0; i < N; ++i) load[nearest[u] * U + u] += s.popularity(i) * s.sv_size(i);
  const PowerAllocation p = allocate_power(s, load, power);
  const auto rates = link_rates(s, p);

  // Per-entry footprint and energy for each node kind; an MV at an MES is
  // charged for every HMD it may serve.
  std::vector<double> mv_bits(N), sv_bits(N), hmd_mv_energy(N), zero(N, 0.0);
  std::vector<std::vector<double>> mes_mv_energy(M, std::vector<double>(N));
  for (std::size_t i = 0; i < N; ++i) {
    mv_bits[i] = s.mv_size(i);
    sv_bits[i] = s.sv_size(i);
    hmd_mv_energy[i] = s.popularity(i) * s.hmd_task_energy(i);
    for (std::size_t m = 0; m < M; ++m)
      mes_mv_energy[m][i] = static_cast<double>(associated[m]) * s.popularity(i) * s.mes_task_energy(i);
  }
  std::vector<LruNode> hmd, mes;
  std::vector<std::vector<double>> hmd_size(U, std::vector<double>(N, 0.0)), mes_size(M, std::vector<double>(N, 0.0));
  std::vector<std::vector<double>> hmd_energy(U, std::vector<double>(N, 0.0)),
      mes_energy(M, std::vector<double>(N, 0.0));
  for (std::size_t u = 0; u < U; ++u) hmd.emplace_back(N, s.hmd_cache_bits[u], s.hmd_energy_budget_j[u]);
  for (std::size_t m = 0; m < M; ++m) mes.emplace_back(N, s.mes_cache_bits[m], s.mes_energy_budget_j[m]);

  auto admit = [&](LruNode& node, std::vector<double>& sizes, std::vector<double>& energies, std::size_t i,
                   double mv_energy) {
    sizes[i] = sv_bits[i];
    energies[i] = 0.0;
    if (node.insert(i, Version::Sv, sv_bits[i], 0.0, sizes, energies)) return;
    sizes[i] = mv_bits[i];
    energies[i] = mv_energy;
    if (!node.insert(i, Version::Mv, mv_bits[i], mv_energy, sizes, energies)) sizes[i] = energies[i] = 0.0;
  };

  const std::size_t warm_from = trace.entries.size() / 2;
  double warm_latency = 0.0;
  std::size_t warm_count = 0, warm_hits = 0;
  for (std::size_t t = 0; t < trace.entries.size(); ++t) {
    const std::size_t u = trace.entries[t].hmd, i = trace.entries[t].viewpoint, m = nearest[u];
    const double r = rates[m * U + u];
    const double transfer = r > 0.0 ? s.sv_size(i) / r : kUnreachable;
    double latency;
    bool hit = true;
    if (hmd[u].holds(i)) {
      latency = hmd[u].version(i) == Version::Sv ? 0.0 : s.hmd_compute_delay(i);
      hmd[u].touch(i);
    } else {
      if (mes[m].holds(i)) {
        latency = transfer + (mes[m].version(i) == Version::Sv ? 0.0 : s.mes_compute_delay(i));
        mes[m].touch(i);
      } else {
        latency = transfer + s.backhaul_delay_s;
        hit = false;
        admit(mes[m], mes_size[m], mes_energy[m], i, mes_mv_energy[m][i]);
      }
      admit(hmd[u], hmd_size[u], hmd_energy[u], i, hmd_mv_energy[i]);
    }
    if (t >= warm_from) {
      warm_latency += latency;
      warm_hits += hit;
      ++warm_count;
    }
  }

  // End-of-trace snapshot as a regular decision.
  Decision d(s);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t m = 0; m < M; ++m)
      if (mes[m].holds(i)) (mes[m].version(i) == Version::Sv ? d.mes_sv(i, m) : d.mes_mv(i, m)) = 1;
    for (std::size_t u = 0; u < U; ++u) {
      if (hmd[u].holds(i)) {
        (hmd[u].version(i) == Version::Sv ? d.hmd_sv(i, u) : d.hmd_mv(i, u)) = 1;
        continue;
      }
      const std::size_t m = nearest[u];
      (mes[m].holds(i) ? d.to_mes(i, m, u) : d.to_cloud(i, m, u)) = 1;
    }
  }
  d.power = p;

  SolveResult r;
  r.algorithm = "lru";
  r.best_decision = std::move(d);
  const auto report = check_feasibility(s, r.best_decision);
  r.feasible = report.feasible() && warm_count > 0 && std::isfinite(warm_latency);
  if (r.feasible) {
    r.best_value = static_cast<double>(U) * warm_latency / static_cast<double>(warm_count);
    r.global_lower_bound = r.best_value;
    r.trace_hit_ratio = static_cast<double>(warm_hits) / static_cast<double>(warm_count);
  } else {
    r.note = warm_count == 0 ? "empty trace" : "end-of-trace snapshot violates constraints:\n" + report.to_table();
  }
  r.wall_time_s = seconds_since(t0);
  return r;
}

}  // namespace vrmec
