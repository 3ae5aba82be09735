#include "vrmec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vrmec/latency.hpp"
#include "vrmec/radio.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vrmec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTolerance = 1e-12;

bool fits(double used, double capacity) { return used <= capacity + kBudgetSlack * std::max(1.0, std::abs(capacity)); }

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return b > std::numeric_limits<std::uint64_t>::max() - a ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

bool ties(double a, double b) { return std::abs(a - b) <= kTieTolerance * std::max(std::abs(a), std::abs(b)); }

// Per-request offload options: local, MES m, cloud via m, MES m + cloud via m'.
struct Option {
  std::size_t mes = 0, cloud = 0;
  bool to_mes = false, to_cloud = false;
};

std::vector<Option> request_options(std::size_t M) {
  std::vector<Option> out{Option{}};
  for (std::size_t m = 0; m < M; ++m) out.push_back({m, 0, true, false});
  for (std::size_t m = 0; m < M; ++m) out.push_back({0, m, false, true});
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t c = 0; c < M; ++c)
      if (m != c) out.push_back({m, c, true, true});
  return out;
}

// Best cache subset of one node for the given demand.
struct NodeBest {
  double cost = kInf;
  std::uint64_t feasible = 0;
  std::uint64_t argmin = 0;
  std::vector<std::uint8_t> mv, sv;  // lexicographically smallest argmin
};

// demand[i]: number of requests this node must compute for viewpoint i
// (MES: offloads to it; HMD: 1 if the request stays local).
NodeBest best_node(const Scenario& s, const std::vector<std::size_t>& demand, double capacity, double budget,
                   double delay_per_task(const Scenario&, std::size_t), double energy_per_task(const Scenario&, std::size_t)) {
  const std::size_t N = s.viewpoint_count();
  NodeBest best;
  std::vector<std::uint8_t> mv(N), sv(N);
  // Enumerate mv then sv bits so that iteration order is lexicographic in (mv, sv).
  const std::uint64_t total = std::uint64_t{1} << (2 * N);
  for (std::uint64_t code = 0; code < total; ++code) {
    for (std::size_t i = 0; i < N; ++i) {
      mv[i] = (code >> (2 * N - 1 - i)) & 1;
      sv[i] = (code >> (N - 1 - i)) & 1;
    }
    double used = 0.0, energy = 0.0, cost = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < N && ok; ++i) {
      used += mv[i] * s.mv_size(i) + sv[i] * s.sv_size(i);
      if (demand[i] == 0) continue;
      if (!mv[i] && !sv[i]) ok = false;
      const double q = s.popularity(i) * static_cast<double>(demand[i]);
      if (!sv[i]) energy += q * energy_per_task(s, i);
      if (mv[i]) cost += q * delay_per_task(s, i);
    }
    if (!ok || !fits(used, capacity) || !fits(energy, budget)) continue;
    ++best.feasible;
    if (best.argmin > 0 && ties(cost, best.cost)) {
      ++best.argmin;
    } else if (cost < best.cost) {
      best.cost = cost;
      best.argmin = 1;
      best.mv = mv;
      best.sv = sv;
    }
  }
  return best;
}

double mes_delay(const Scenario& s, std::size_t i) { return s.mes_compute_delay(i); }
double hmd_delay(const Scenario& s, std::size_t i) { return s.hmd_compute_delay(i); }
double mes_energy(const Scenario& s, std::size_t i) { return s.mes_task_energy(i); }
double hmd_energy(const Scenario& s, std::size_t i) { return s.hmd_task_energy(i); }

struct PowerBest {
  double cost = kInf;
  std::uint64_t points = 0;
  std::uint64_t argmin = 0;
  PowerAllocation p;
};

PowerBest best_power(const Scenario& s, const std::vector<double>& load, std::size_t levels) {
  const std::size_t M = s.sbs_count, U = s.hmd_count;
  std::vector<std::vector<std::size_t>> links(M);
  std::vector<std::vector<std::vector<std::size_t>>> splits(M);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t u = 0; u < U; ++u)
      if (load[m * U + u] > 0.0) links[m].push_back(u);
    splits[m] = grid_splits(links[m].size(), levels);
  }
  const double step = s.total_power_w / static_cast<double>(levels - 1);
  PowerBest best;
  PowerAllocation p(M, U);
  std::vector<std::size_t> odo(M, 0);
  for (;;) {
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t j = 0; j < links[m].size(); ++j) p(m, links[m][j]) = step * static_cast<double>(splits[m][odo[m]][j]);
    ++best.points;
    const double c = transmission_cost(s, load, p);
    if (std::isfinite(c)) {
      if (best.argmin > 0 && ties(c, best.cost)) {
        ++best.argmin;
        if (std::lexicographical_compare(p.p.begin(), p.p.end(), best.p.p.begin(), best.p.p.end())) best.p = p;
      } else if (c < best.cost) {
        best.cost = c;
        best.argmin = 1;
        best.p = p;
      }
    }
    std::size_t m = 0;
    for (; m < M; ++m) {
      if (++odo[m] < splits[m].size()) break;
      odo[m] = 0;
    }
    if (m == M) break;
  }
  return best;
}

struct Shard {
  double value = kInf;
  std::uint64_t argmin = 0;
  std::uint64_t enumerated = 0;
  std::vector<Decision> decisions;
};

void keep(Shard& shard, double value, Decision d, std::uint64_t count, std::size_t max_decisions) {
  if (shard.argmin > 0 && ties(value, shard.value)) {
    shard.argmin = saturating_add(shard.argmin, count);
    shard.value = std::min(shard.value, value);
  } else if (value < shard.value) {
    shard.value = value;
    shard.argmin = count;
    shard.decisions.clear();
  } else {
    return;
  }
  auto pos = std::lower_bound(shard.decisions.begin(), shard.decisions.end(), d, lexicographically_less);
  shard.decisions.insert(pos, std::move(d));
  if (shard.decisions.size() > max_decisions) shard.decisions.pop_back();
}

void evaluate_offload(const Scenario& s, const std::vector<Option>& options, std::uint64_t code,
                      const OracleOptions& opt, Shard& shard) {
  const std::size_t N = s.viewpoint_count(), M = s.sbs_count, U = s.hmd_count;
  const std::size_t K = options.size();
  Decision d(s);
  std::vector<double> load(M * U, 0.0);
  std::vector<std::vector<std::size_t>> mes_demand(M, std::vector<std::size_t>(N, 0));
  std::vector<std::vector<std::size_t>> hmd_demand(U, std::vector<std::size_t>(N, 0));
  double backhaul = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t u = 0; u < U; ++u) {
      const Option& o = options[code % K];
      code /= K;
      const double q = s.popularity(i);
      if (o.to_mes) {
        d.to_mes(i, o.mes, u) = 1;
        load[o.mes * U + u] += q * s.sv_size(i);
        ++mes_demand[o.mes][i];
      }
      if (o.to_cloud) {
        d.to_cloud(i, o.cloud, u) = 1;
        load[o.cloud * U + u] += q * s.sv_size(i);
        backhaul += q * s.backhaul_delay_s;
      }
      if (!o.to_mes && !o.to_cloud) hmd_demand[u][i] = 1;
    }

  double value = backhaul;
  std::uint64_t lattice = 1, argmin = 1;
  for (std::size_t m = 0; m < M; ++m) {
    NodeBest b = best_node(s, mes_demand[m], s.mes_cache_bits[m], s.mes_energy_budget_j[m], mes_delay, mes_energy);
    if (b.feasible == 0) return;
    lattice = saturating_mul(lattice, b.feasible);
    argmin = saturating_mul(argmin, b.argmin);
    value += b.cost;
    for (std::size_t i = 0; i < N; ++i) d.mes_mv(i, m) = b.mv[i], d.mes_sv(i, m) = b.sv[i];
  }
  for (std::size_t u = 0; u < U; ++u) {
    NodeBest b = best_node(s, hmd_demand[u], s.hmd_cache_bits[u], s.hmd_energy_budget_j[u], hmd_delay, hmd_energy);
    if (b.feasible == 0) return;
    lattice = saturating_mul(lattice, b.feasible);
    argmin = saturating_mul(argmin, b.argmin);
    value += b.cost;
    for (std::size_t i = 0; i < N; ++i) d.hmd_mv(i, u) = b.mv[i], d.hmd_sv(i, u) = b.sv[i];
  }
  PowerBest pb = best_power(s, load, opt.power_levels);
  shard.enumerated = saturating_add(shard.enumerated, saturating_mul(lattice, pb.points));
  if (pb.argmin == 0) return;
  value += pb.cost;
  d.power = pb.p;
  keep(shard, value, std::move(d), saturating_mul(argmin, pb.argmin), opt.max_decisions);
}

OracleResult solve(const Scenario& s, const OracleOptions& opt, bool parallel) {
  if (opt.power_levels < 2) throw DomainError("brute_force_solve: at least 2 power levels are required");
  const double estimate = oracle_work_estimate(s, opt.power_levels);
  if (!(estimate <= static_cast<double>(opt.cap)))
    throw OracleRefused("brute_force_solve: work estimate " + std::to_string(estimate) + " exceeds cap " +
                            std::to_string(opt.cap),
                        estimate);

  const auto options = request_options(s.sbs_count);
  std::uint64_t offloads = 1;
  for (std::size_t k = 0; k < s.viewpoint_count() * s.hmd_count; ++k) offloads *= options.size();

  int shards = 1;
#ifdef _OPENMP
  if (parallel) shards = omp_get_max_threads();
#endif
  std::vector<Shard> parts(static_cast<std::size_t>(shards));
  const std::uint64_t per = (offloads + static_cast<std::uint64_t>(shards) - 1) / static_cast<std::uint64_t>(shards);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < shards; ++t) {
      const std::uint64_t lo = per * static_cast<std::uint64_t>(t), hi = std::min(offloads, lo + per);
      for (std::uint64_t code = lo; code < hi; ++code) evaluate_offload(s, options, code, opt, parts[t]);
    }
  } else {
    for (std::uint64_t code = 0; code < offloads; ++code) evaluate_offload(s, options, code, opt, parts[0]);
  }

  // Deterministic merge: smallest value, ties by lexicographic order.
  OracleResult result;
  double best = kInf;
  for (const auto& p : parts) best = std::min(best, p.value);
  for (auto& p : parts) {
    result.enumerated_count = saturating_add(result.enumerated_count, p.enumerated);
    if (p.argmin == 0 || !ties(p.value, best)) continue;
    result.argmin_count = saturating_add(result.argmin_count, p.argmin);
    for (auto& d : p.decisions) result.optimal_decisions.push_back(std::move(d));
  }
  std::sort(result.optimal_decisions.begin(), result.optimal_decisions.end(), lexicographically_less);
  if (result.optimal_decisions.size() > opt.max_decisions) result.optimal_decisions.resize(opt.max_decisions);
  if (!result.optimal_decisions.empty()) result.optimal_value = best;
  return result;
}

}  // namespace

double oracle_work_estimate(const Scenario& s, std::size_t power_levels) {
  const double M = static_cast<double>(s.sbs_count), U = static_cast<double>(s.hmd_count);
  const double N = static_cast<double>(s.viewpoint_count());
  const double options = 1.0 + 2.0 * M + M * (M - 1.0);
  const double offloads = std::pow(options, N * U);
  // Level vectors over U links summing to at most L - 1: C(U + L - 1, L - 1).
  double per_sbs = 1.0;
  for (std::size_t k = 1; k < power_levels; ++k) per_sbs *= (U + static_cast<double>(k)) / static_cast<double>(k);
  const double grid = std::pow(per_sbs, M);
  const double caches = (M + U) * std::pow(4.0, N);
  return offloads * (grid + caches);
}

OracleResult brute_force_solve(const Scenario& s, const OracleOptions& options) { return solve(s, options, options.parallel); }

OracleResult brute_force_solve_serial(const Scenario& s, const OracleOptions& options) { return solve(s, options, false); }

}  // namespace vrmec
