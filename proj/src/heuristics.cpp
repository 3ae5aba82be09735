#include "vrmec/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "vrmec/latency.hpp"

namespace vrmec {

namespace {

constexpr std::uint8_t kMv = 1;
constexpr std::uint8_t kSv = 2;

bool fits(double used, double extra, double capacity) {
  return used + extra <= capacity + kBudgetSlack * std::max(1.0, capacity);
}

Pin pin_or_free(const Pins* pins, const std::vector<Pin> Pins::*field, std::size_t k) {
  return pins ? (pins->*field)[k] : Pin::Free;
}

// One cache node (MES or HMD) seen by the greedy.
struct NodeItem {
  Pin pin_mv = Pin::Free;
  Pin pin_sv = Pin::Free;
  bool required = false;
  double mv_size = 0.0;
  double sv_size = 0.0;
  double latency_gain = 0.0;  // weighted delay removed when the MV is dropped for the SV
  double energy = 0.0;        // energy charged while the SV is not held
};

struct NodeChoice {
  std::vector<std::uint8_t> mv, sv;
};

std::optional<NodeChoice> fill_node(const std::vector<NodeItem>& items, double capacity, double budget,
                                    std::string& reason) {
  const std::size_t n = items.size();
  NodeChoice c{std::vector<std::uint8_t>(n, 0), std::vector<std::uint8_t>(n, 0)};
  double used = 0.0, energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& it = items[i];
    c.mv[i] = it.pin_mv == Pin::One;
    c.sv[i] = it.pin_sv == Pin::One;
    if (it.required && !c.mv[i] && !c.sv[i]) {
      if (it.pin_mv != Pin::Zero)
        c.mv[i] = 1;
      else if (it.pin_sv != Pin::Zero)
        c.sv[i] = 1;
      else {
        reason = "required viewpoint is pinned out of the cache";
        return std::nullopt;
      }
    }
    used += c.mv[i] * it.mv_size + c.sv[i] * it.sv_size;
    if (it.required && !c.sv[i]) energy += it.energy;
  }
  if (!fits(used, 0.0, capacity)) {
    reason = "cache capacity cannot hold the required viewpoints";
    return std::nullopt;
  }

  struct Upgrade {
    std::size_t item;
    double extra;
    bool drop_mv;
  };
  std::vector<Upgrade> upgrades;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& it = items[i];
    if (!it.required || c.sv[i] || it.pin_sv == Pin::Zero) continue;
    const bool drop_mv = c.mv[i] && it.pin_mv != Pin::One;
    upgrades.push_back({i, it.sv_size - (drop_mv ? it.mv_size : 0.0), drop_mv});
  }
  struct State {
    NodeChoice c;
    double used, energy;
    std::vector<std::uint8_t> applied;
  };
  State st{std::move(c), used, energy, std::vector<std::uint8_t>(upgrades.size(), 0)};
  auto apply = [&](State& x, std::size_t k) {
    const auto& up = upgrades[k];
    x.applied[k] = 1;
    x.used += up.extra;
    x.energy -= items[up.item].energy;
    x.c.sv[up.item] = 1;
    if (up.drop_mv) x.c.mv[up.item] = 0;
  };

  // Energy repair: most joules saved per extra bit first.
  auto repair = [&](State& x) {
    while (!fits(x.energy, 0.0, budget)) {
      std::size_t best = upgrades.size();
      double best_ratio = -1.0;
      for (std::size_t k = 0; k < upgrades.size(); ++k) {
        if (x.applied[k] || !fits(x.used, upgrades[k].extra, capacity)) continue;
        const double ratio = items[upgrades[k].item].energy / std::max(upgrades[k].extra, 1e-12);
        if (ratio > best_ratio) {
          best_ratio = ratio;
          best = k;
        }
      }
      if (best == upgrades.size()) return false;
      apply(x, best);
    }
    return true;
  };
  const State start = st;
  if (!repair(st)) {
    // Ratio order can overshoot the capacity; retry with each upgrade taken
    // first and keep the repair that leaves the most room.
    std::optional<State> best;
    for (std::size_t f = 0; f < upgrades.size(); ++f) {
      State x = start;
      if (x.applied[f] || !fits(x.used, upgrades[f].extra, capacity)) continue;
      apply(x, f);
      if (repair(x) && (!best || x.used < best->used)) best = std::move(x);
    }
    if (!best) {
      reason = "energy budget cannot be met within cache capacity";
      return std::nullopt;
    }
    st = std::move(*best);
  }

  // Latency: lazy max-heap on delay saved per extra bit; entries are
  // re-validated against the remaining capacity when popped.
  using Entry = std::pair<double, std::size_t>;
  auto cmp = [](const Entry& a, const Entry& b) { return a.first < b.first || (a.first == b.first && a.second > b.second); };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
  for (std::size_t k = 0; k < upgrades.size(); ++k) {
    const double gain = upgrades[k].drop_mv ? items[upgrades[k].item].latency_gain : 0.0;
    if (!st.applied[k] && gain > 0.0) heap.push({gain / std::max(upgrades[k].extra, 1e-12), k});
  }
  while (!heap.empty()) {
    const auto [ratio, k] = heap.top();
    heap.pop();
    if (st.applied[k] || !fits(st.used, upgrades[k].extra, capacity)) continue;
    apply(st, k);
  }
  return std::move(st.c);
}

}  // namespace

GreedyOutcome greedy_cache(const Scenario& s, const Decision& offload, const Pins* pins) {
  const std::size_t N = s.viewpoint_count(), M = s.sbs_count, U = s.hmd_count;
  GreedyOutcome out;
  out.decision = offload;
  Decision& d = out.decision;
  std::fill(d.cache_mes_mv.begin(), d.cache_mes_mv.end(), 0);
  std::fill(d.cache_mes_sv.begin(), d.cache_mes_sv.end(), 0);
  std::fill(d.cache_hmd_mv.begin(), d.cache_hmd_mv.end(), 0);
  std::fill(d.cache_hmd_sv.begin(), d.cache_hmd_sv.end(), 0);

  std::vector<NodeItem> items(N);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t i = 0; i < N; ++i) {
      auto& it = items[i];
      const std::size_t k = d.mes_index(i, m);
      it = NodeItem{};
      it.pin_mv = pin_or_free(pins, &Pins::mes_mv, k);
      it.pin_sv = pin_or_free(pins, &Pins::mes_sv, k);
      it.mv_size = s.mv_size(i);
      it.sv_size = s.sv_size(i);
      for (std::size_t u = 0; u < U; ++u)
        if (offload.to_mes(i, m, u)) {
          it.required = true;
          it.latency_gain += s.popularity(i) * s.mes_compute_delay(i);
          it.energy += s.popularity(i) * s.mes_task_energy(i);
        }
    }
    auto choice = fill_node(items, s.mes_cache_bits[m], s.mes_energy_budget_j[m], out.reason);
    if (!choice) {
      out.reason += " (MES " + std::to_string(m) + ")";
      return out;
    }
    for (std::size_t i = 0; i < N; ++i) {
      d.mes_mv(i, m) = choice->mv[i];
      d.mes_sv(i, m) = choice->sv[i];
    }
  }
  for (std::size_t u = 0; u < U; ++u) {
    for (std::size_t i = 0; i < N; ++i) {
      auto& it = items[i];
      const std::size_t k = d.hmd_index(i, u);
      it = NodeItem{};
      it.pin_mv = pin_or_free(pins, &Pins::hmd_mv, k);
      it.pin_sv = pin_or_free(pins, &Pins::hmd_sv, k);
      it.mv_size = s.mv_size(i);
      it.sv_size = s.sv_size(i);
      it.required = !offload.offloaded(i, u);
      it.latency_gain = s.popularity(i) * s.hmd_compute_delay(i);
      it.energy = s.popularity(i) * s.hmd_task_energy(i);
    }
    auto choice = fill_node(items, s.hmd_cache_bits[u], s.hmd_energy_budget_j[u], out.reason);
    if (!choice) {
      out.reason += " (HMD " + std::to_string(u) + ")";
      return out;
    }
    for (std::size_t i = 0; i < N; ++i) {
      d.hmd_mv(i, u) = choice->mv[i];
      d.hmd_sv(i, u) = choice->sv[i];
    }
  }
  out.feasible = true;
  return out;
}

namespace {

GreedyOutcome finish(const Scenario& s, GreedyOutcome out, const PowerSpec& power) {
  Decision& d = out.decision;
  d.power = power.pinned ? *power.pinned : allocate_power(s, d, power.options);
  const auto report = check_feasibility(s, d);
  if (!report.feasible()) {
    out.feasible = false;
    out.reason = "constraint check failed:\n" + report.to_table();
    return out;
  }
  out.value = objective(s, d);
  if (is_unreachable(out.value)) {
    out.feasible = false;
    out.reason = "a serving link has zero rate";
    return out;
  }
  out.feasible = true;
  return out;
}

}  // namespace

GreedyOutcome greedy_cache_power(const Scenario& s, const Decision& offload, const Pins* pins,
                                 const PowerSpec& power) {
  GreedyOutcome out = greedy_cache(s, offload, pins);
  if (!out.feasible) return out;
  return finish(s, std::move(out), power);
}

std::vector<double> nominal_rates(const Scenario& s) {
  const std::size_t M = s.sbs_count, U = s.hmd_count;
  std::vector<std::size_t> assoc(U), count(M, 0);
  for (std::size_t u = 0; u < U; ++u) {
    assoc[u] = s.nearest_sbs(u);
    ++count[assoc[u]];
  }
  PowerAllocation nominal(M, U);
  for (std::size_t u = 0; u < U; ++u)
    nominal(assoc[u], u) = s.total_power_w / static_cast<double>(count[assoc[u]]);

  std::vector<double> rx(M * U), row(M, 0.0), col(U, 0.0);
  double total = 0.0;
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t u = 0; u < U; ++u) {
      rx[m * U + u] = nominal(m, u) * s.gain(m, u);
      row[m] += rx[m * U + u];
      col[u] += rx[m * U + u];
      total += rx[m * U + u];
    }
  std::vector<double> rates(M * U);
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t u = 0; u < U; ++u) {
      const double own_rx = rx[m * U + u];
      const double share = assoc[u] == m ? nominal(m, u) : s.total_power_w / static_cast<double>(count[m] + 1);
      const double inter = std::max(0.0, total - row[m] - col[u] + own_rx);
      const double intra = std::max(0.0, row[m] - own_rx);
      const double gamma = share * s.gain(m, u) / (inter + s.orthogonality * intra + s.noise_power_w);
      rates[m * U + u] = link_rate(s, gamma);
    }
  return rates;
}

namespace {

struct Node {
  std::vector<std::uint8_t> held;  // kMv | kSv bits per viewpoint
  double used = 0.0;
  double energy = 0.0;
  double capacity = 0.0;
  double budget = 0.0;
};

}  // namespace

Decision popularity_caches(const Scenario& s) {
  Decision d(s);
  std::vector<std::size_t> order(s.viewpoint_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.popularity(a) > s.popularity(b); });
  auto fill = [&](double capacity, auto&& mv, auto&& sv) {
    double used = 0.0;
    for (std::size_t i : order) {
      if (fits(used, s.sv_size(i), capacity)) {
        sv(i) = 1;
        used += s.sv_size(i);
      } else if (fits(used, s.mv_size(i), capacity)) {
        mv(i) = 1;
        used += s.mv_size(i);
      }
    }
  };
  for (std::size_t m = 0; m < s.sbs_count; ++m)
    fill(
        s.mes_cache_bits[m], [&](std::size_t i) -> std::uint8_t& { return d.mes_mv(i, m); },
        [&](std::size_t i) -> std::uint8_t& { return d.mes_sv(i, m); });
  for (std::size_t u = 0; u < s.hmd_count; ++u)
    fill(
        s.hmd_cache_bits[u], [&](std::size_t i) -> std::uint8_t& { return d.hmd_mv(i, u); },
        [&](std::size_t i) -> std::uint8_t& { return d.hmd_sv(i, u); });
  return d;
}

std::optional<Decision> complete_offload(const Scenario& s, const Pins& pins, std::span<const double> rates,
                                         std::span<const std::size_t> association, std::mt19937_64* rng,
                                         double noise_sigma) {
  if (!association.empty() && association.size() != s.hmd_count)
    throw DomainError("complete_offload: association has wrong size");
  const std::size_t N = s.viewpoint_count(), M = s.sbs_count, U = s.hmd_count;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Decision d(s);

  std::vector<Node> mes(M), hmd(U);
  for (std::size_t m = 0; m < M; ++m) {
    mes[m].held.assign(N, 0);
    mes[m].capacity = s.mes_cache_bits[m];
    mes[m].budget = s.mes_energy_budget_j[m];
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t k = pins.mes_index(i, m);
      if (pins.mes_mv[k] == Pin::One) mes[m].held[i] |= kMv, mes[m].used += s.mv_size(i);
      if (pins.mes_sv[k] == Pin::One) mes[m].held[i] |= kSv, mes[m].used += s.sv_size(i);
    }
  }
  for (std::size_t u = 0; u < U; ++u) {
    hmd[u].held.assign(N, 0);
    hmd[u].capacity = s.hmd_cache_bits[u];
    hmd[u].budget = s.hmd_energy_budget_j[u];
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t k = pins.hmd_index(i, u);
      if (pins.hmd_mv[k] == Pin::One) hmd[u].held[i] |= kMv, hmd[u].used += s.mv_size(i);
      if (pins.hmd_sv[k] == Pin::One) hmd[u].held[i] |= kSv, hmd[u].used += s.sv_size(i);
    }
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  auto noise = [&]() { return rng ? std::exp(noise_sigma * gauss(*rng)) : 1.0; };

  struct Request {
    double key;
    std::size_t i, u;
  };
  std::vector<Request> order;
  order.reserve(N * U);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t u = 0; u < U; ++u) order.push_back({s.popularity(i) * s.mv_size(i) * noise(), i, u});
  std::stable_sort(order.begin(), order.end(), [](const Request& a, const Request& b) { return a.key > b.key; });

  // Version a node would have to add to hold viewpoint i (0 if it already does).
  enum class Add { Nothing, Mv, Sv, Impossible };
  auto mes_add = [&](std::size_t i, std::size_t m) {
    if (mes[m].held[i]) return Add::Nothing;
    const std::size_t k = pins.mes_index(i, m);
    if (pins.mes_mv[k] != Pin::Zero && fits(mes[m].used, s.mv_size(i), mes[m].capacity)) return Add::Mv;
    if (pins.mes_sv[k] != Pin::Zero && fits(mes[m].used, s.sv_size(i), mes[m].capacity)) return Add::Sv;
    return Add::Impossible;
  };
  auto place = [&](Node& node, std::size_t i, Add add) {
    if (add == Add::Mv) node.held[i] |= kMv, node.used += s.mv_size(i);
    if (add == Add::Sv) node.held[i] |= kSv, node.used += s.sv_size(i);
  };
  auto mes_energy = [&](std::size_t i, std::size_t m, Add add) {
    const bool sv = (mes[m].held[i] & kSv) || add == Add::Sv;
    return sv ? 0.0 : s.popularity(i) * s.mes_task_energy(i);
  };

  for (const auto& req : order) {
    const std::size_t i = req.i, u = req.u;
    bool forced = false;
    for (std::size_t m = 0; m < M; ++m) {
      const std::size_t k = pins.task_index(i, m, u);
      if (pins.to_cloud[k] == Pin::One) {
        d.to_cloud(i, m, u) = 1;
        forced = true;
      }
      if (pins.to_mes[k] == Pin::One) {
        const Add add = mes_add(i, m);
        if (add == Add::Impossible) return std::nullopt;
        place(mes[m], i, add);
        mes[m].energy += mes_energy(i, m, Add::Nothing);
        d.to_mes(i, m, u) = 1;
        forced = true;
      }
    }
    if (forced) continue;

    enum class Path { None, Local, Mes, Cloud };
    Path best = Path::None;
    std::size_t best_m = 0;
    Add best_add = Add::Nothing;
    double best_cost = kInf;
    auto consider = [&](double cost, Path path, std::size_t m, Add add) {
      cost *= noise();
      if (cost < best_cost) {
        best_cost = cost;
        best = path;
        best_m = m;
        best_add = add;
      }
    };

    {
      const std::size_t k = pins.hmd_index(i, u);
      Node& h = hmd[u];
      const double e_mv = s.popularity(i) * s.hmd_task_energy(i);
      if (h.held[i] & kSv)
        consider(0.0, Path::Local, 0, Add::Nothing);
      else if (h.held[i] & kMv) {
        if (fits(h.energy, e_mv, h.budget)) consider(s.hmd_compute_delay(i), Path::Local, 0, Add::Nothing);
      } else if (pins.hmd_sv[k] != Pin::Zero && fits(h.used, s.sv_size(i), h.capacity))
        consider(0.0, Path::Local, 0, Add::Sv);
      else if (pins.hmd_mv[k] != Pin::Zero && fits(h.used, s.mv_size(i), h.capacity) && fits(h.energy, e_mv, h.budget))
        consider(s.hmd_compute_delay(i), Path::Local, 0, Add::Mv);
    }
    for (std::size_t m = 0; m < M; ++m) {
      if (!association.empty() && association[u] != m) continue;
      const std::size_t k = pins.task_index(i, m, u);
      const double r = rates[m * U + u];
      if (r <= 0.0) continue;
      const double transfer = s.sv_size(i) / r;
      if (pins.to_mes[k] != Pin::Zero) {
        const Add add = mes_add(i, m);
        if (add != Add::Impossible && fits(mes[m].energy, mes_energy(i, m, add), mes[m].budget)) {
          const bool sv = (mes[m].held[i] & kSv) || add == Add::Sv;
          consider(transfer + (sv ? 0.0 : s.mes_compute_delay(i)), Path::Mes, m, add);
        }
      }
      if (pins.to_cloud[k] != Pin::Zero) consider(transfer + s.backhaul_delay_s, Path::Cloud, m, Add::Nothing);
    }

    switch (best) {
      case Path::None: return std::nullopt;
      case Path::Local: {
        Node& h = hmd[u];
        place(h, i, best_add);
        if (!(h.held[i] & kSv)) h.energy += s.popularity(i) * s.hmd_task_energy(i);
        break;
      }
      case Path::Mes:
        mes[best_m].energy += mes_energy(i, best_m, best_add);
        place(mes[best_m], i, best_add);
        d.to_mes(i, best_m, u) = 1;
        break;
      case Path::Cloud: d.to_cloud(i, best_m, u) = 1; break;
    }
  }

  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t m = 0; m < M; ++m) {
      d.mes_mv(i, m) = (mes[m].held[i] & kMv) != 0;
      d.mes_sv(i, m) = (mes[m].held[i] & kSv) != 0;
    }
    for (std::size_t u = 0; u < U; ++u) {
      d.hmd_mv(i, u) = (hmd[u].held[i] & kMv) != 0;
      d.hmd_sv(i, u) = (hmd[u].held[i] & kSv) != 0;
    }
  }
  return d;
}

}  // namespace vrmec
