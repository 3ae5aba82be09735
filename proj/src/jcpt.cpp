#include "vrmec/jcpt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>

#include "vrmec/heuristics.hpp"
#include "vrmec/latency.hpp"

namespace vrmec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMemoLimit = 200000;

bool fits(double used, double capacity) { return used <= capacity + kBudgetSlack * std::max(1.0, capacity); }

Decision offload_of(const Pins& pins) {
  Decision d(pins.viewpoint_count, pins.sbs_count, pins.hmd_count);
  for (std::size_t k = 0; k < pins.to_mes.size(); ++k) {
    d.offload_mes[k] = pins.to_mes[k] == Pin::One;
    d.offload_cloud[k] = pins.to_cloud[k] == Pin::One;
  }
  return d;
}

Decision decision_of(const Pins& pins) {
  Decision d = offload_of(pins);
  auto copy = [](const std::vector<Pin>& from, std::vector<std::uint8_t>& to) {
    for (std::size_t k = 0; k < from.size(); ++k) to[k] = from[k] == Pin::One;
  };
  copy(pins.mes_mv, d.cache_mes_mv);
  copy(pins.mes_sv, d.cache_mes_sv);
  copy(pins.hmd_mv, d.cache_hmd_mv);
  copy(pins.hmd_sv, d.cache_hmd_sv);
  return d;
}

}  // namespace

BoundContext::BoundContext(const Scenario& s, const SolverConfig& cfg)
    : s_(s), cfg_(cfg), space_(s), optimistic_(optimistic_rates(s)) {
  if (cfg_.pinned_power) {
    pinned_rates_ = link_rates(s, *cfg_.pinned_power);
    estimate_ = *pinned_rates_;
  } else {
    estimate_ = nominal_rates(s);
  }
}

PowerAllocation BoundContext::power_for(const Decision& d) const {
  if (cfg_.pinned_power) return *cfg_.pinned_power;
  auto load = link_load(s_, d);
  {
    std::lock_guard<std::mutex> lock(memo_mutex_);
    if (auto it = power_memo_.find(load); it != power_memo_.end()) return it->second;
  }
  PowerAllocation p = allocate_power(s_, load, cfg_.power);
  std::lock_guard<std::mutex> lock(memo_mutex_);
  if (power_memo_.size() >= kMemoLimit) power_memo_.clear();
  power_memo_.emplace(std::move(load), p);
  return p;
}

std::vector<double> BoundContext::bounding_rates(const Pins& pins) const {
  if (pinned_rates_) return *pinned_rates_;
  if (pins.offloads_decided()) return link_rates(s_, power_for(offload_of(pins)));
  return optimistic_;
}

double BoundContext::pair_bound(const Pins& pins, std::span<const double> rates, std::size_t i,
                                std::size_t u) const {
  const std::size_t M = s_.sbs_count, U = s_.hmd_count;
  const double sv = s_.sv_size(i);
  auto transfer = [&](std::size_t m) {
    const double r = rates[m * U + u];
    return r > 0.0 ? sv / r : kInf;
  };
  auto mes_cost = [&](std::size_t m) {
    const double compute = pins.mes_mv[pins.mes_index(i, m)] == Pin::One ? s_.mes_compute_delay(i) : 0.0;
    return compute + transfer(m);
  };
  auto cloud_cost = [&](std::size_t m) { return transfer(m) + s_.backhaul_delay_s; };

  bool forced = false;
  double forced_cost = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    const std::size_t k = pins.task_index(i, m, u);
    if (pins.to_mes[k] == Pin::One) forced = true, forced_cost += mes_cost(m);
    if (pins.to_cloud[k] == Pin::One) forced = true, forced_cost += cloud_cost(m);
  }
  if (forced) return s_.popularity(i) * forced_cost;

  double best = kInf;
  const std::size_t h = pins.hmd_index(i, u);
  if (!(pins.hmd_mv[h] == Pin::Zero && pins.hmd_sv[h] == Pin::Zero))
    best = pins.hmd_mv[h] == Pin::One ? s_.hmd_compute_delay(i) : 0.0;
  for (std::size_t m = 0; m < M && best > 0.0; ++m) {
    const std::size_t k = pins.task_index(i, m, u);
    const std::size_t c = pins.mes_index(i, m);
    if (pins.to_mes[k] == Pin::Free && !(pins.mes_mv[c] == Pin::Zero && pins.mes_sv[c] == Pin::Zero))
      best = std::min(best, mes_cost(m));
    if (pins.to_cloud[k] == Pin::Free) best = std::min(best, cloud_cost(m));
  }
  return s_.popularity(i) * best;
}

double lower_bound(const BoundContext& ctx, const Pins& pins) {
  const Scenario& s = ctx.scenario();
  const auto rates = ctx.bounding_rates(pins);
  double total = 0.0;
  for (std::size_t i = 0; i < s.viewpoint_count(); ++i)
    for (std::size_t u = 0; u < s.hmd_count; ++u) total += ctx.pair_bound(pins, rates, i, u);
  return total;
}

namespace {

class Reducer {
 public:
  Reducer(const BoundContext& ctx, Pins& pins, double threshold)
      : ctx_(ctx), s_(ctx.scenario()), p_(pins), threshold_(threshold) {}

  // false when the pins admit no useful point.
  bool run() {
    for (;;) {
      do {
        changed_ = false;
        structural();
        if (infeasible_) return false;
      } while (changed_);
      if (!std::isfinite(threshold_)) return true;
      changed_ = false;
      eliminate_by_bound();
      if (infeasible_) return false;
      if (!changed_) return true;
    }
  }

 private:
  void set(Pin& pin, Pin value) {
    if (pin == value) return;
    if (pin != Pin::Free) {
      infeasible_ = true;
      return;
    }
    pin = value;
    changed_ = true;
  }

  void structural() {
    const std::size_t N = s_.viewpoint_count(), U = s_.hmd_count;
    for (std::size_t i = 0; i < N && !infeasible_; ++i) {
      for (std::size_t u = 0; u < U; ++u) exclusivity(i, u);
      for (std::size_t m = 0; m < s_.sbs_count; ++m) mes_coupling(i, m);
      for (std::size_t u = 0; u < U; ++u) service(i, u);
    }
    for (std::size_t m = 0; m < s_.sbs_count && !infeasible_; ++m) mes_budgets(m);
    for (std::size_t u = 0; u < U && !infeasible_; ++u) hmd_budgets(u);
  }

  void exclusivity(std::size_t i, std::size_t u) {
    const std::size_t M = s_.sbs_count;
    std::size_t mes_one = M, cloud_one = M;
    for (std::size_t m = 0; m < M; ++m) {
      const std::size_t k = p_.task_index(i, m, u);
      if (p_.to_mes[k] == Pin::One) {
        if (mes_one != M) infeasible_ = true;
        mes_one = m;
      }
      if (p_.to_cloud[k] == Pin::One) {
        if (cloud_one != M) infeasible_ = true;
        cloud_one = m;
      }
    }
    for (std::size_t m = 0; m < M; ++m) {
      const std::size_t k = p_.task_index(i, m, u);
      if (mes_one != M && m != mes_one) set(p_.to_mes[k], Pin::Zero);
      if (cloud_one != M && m != cloud_one) set(p_.to_cloud[k], Pin::Zero);
    }
    if (mes_one != M) set(p_.to_cloud[p_.task_index(i, mes_one, u)], Pin::Zero);
    if (cloud_one != M) set(p_.to_mes[p_.task_index(i, cloud_one, u)], Pin::Zero);
  }

  void mes_coupling(std::size_t i, std::size_t m) {
    const std::size_t c = p_.mes_index(i, m);
    Pin& mv = p_.mes_mv[c];
    Pin& sv = p_.mes_sv[c];
    for (std::size_t u = 0; u < s_.hmd_count; ++u) {
      Pin& t = p_.to_mes[p_.task_index(i, m, u)];
      if (mv == Pin::Zero && sv == Pin::Zero) set(t, Pin::Zero);
      if (t == Pin::One) {
        if (mv == Pin::Zero) set(sv, Pin::One);
        if (sv == Pin::Zero) set(mv, Pin::One);
      }
    }
  }

  void service(std::size_t i, std::size_t u) {
    const std::size_t M = s_.sbs_count;
    std::size_t free_count = 0;
    Pin* last_free = nullptr;
    for (std::size_t m = 0; m < M; ++m) {
      const std::size_t k = p_.task_index(i, m, u);
      if (p_.to_mes[k] == Pin::One || p_.to_cloud[k] == Pin::One) return;
      for (Pin* t : {&p_.to_mes[k], &p_.to_cloud[k]})
        if (*t == Pin::Free) ++free_count, last_free = t;
    }
    const std::size_t h = p_.hmd_index(i, u);
    Pin& mv = p_.hmd_mv[h];
    Pin& sv = p_.hmd_sv[h];
    if (mv == Pin::Zero && sv == Pin::Zero) {
      if (free_count == 0) infeasible_ = true;
      if (free_count == 1) set(*last_free, Pin::One);
    } else if (free_count == 0) {
      if (mv == Pin::Zero) set(sv, Pin::One);
      if (sv == Pin::Zero) set(mv, Pin::One);
    }
  }

  // Smallest footprint viewpoint i can take at a node given its pins.
  double footprint(std::size_t i, Pin mv, Pin sv, bool required) const {
    double bits = (mv == Pin::One ? s_.mv_size(i) : 0.0) + (sv == Pin::One ? s_.sv_size(i) : 0.0);
    if (required && mv != Pin::One && sv != Pin::One) bits += mv != Pin::Zero ? s_.mv_size(i) : s_.sv_size(i);
    return bits;
  }

  bool mes_required(std::size_t i, std::size_t m) const {
    for (std::size_t u = 0; u < s_.hmd_count; ++u)
      if (p_.to_mes[p_.task_index(i, m, u)] == Pin::One) return true;
    return false;
  }

  bool hmd_required(std::size_t i, std::size_t u) const {
    for (std::size_t m = 0; m < s_.sbs_count; ++m) {
      const std::size_t k = p_.task_index(i, m, u);
      if (p_.to_mes[k] != Pin::Zero || p_.to_cloud[k] != Pin::Zero) return false;
    }
    return true;
  }

  void mes_budgets(std::size_t m) {
    const std::size_t N = s_.viewpoint_count(), U = s_.hmd_count;
    const double cap = s_.mes_cache_bits[m], budget = s_.mes_energy_budget_j[m];
    std::vector<double> foot(N), forced_energy(N, 0.0);
    std::vector<std::uint8_t> required(N);
    double used = 0.0, energy = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t c = p_.mes_index(i, m);
      required[i] = mes_required(i, m);
      foot[i] = footprint(i, p_.mes_mv[c], p_.mes_sv[c], required[i]);
      used += foot[i];
      for (std::size_t u = 0; u < U; ++u)
        if (p_.to_mes[p_.task_index(i, m, u)] == Pin::One) forced_energy[i] += s_.popularity(i) * s_.mes_task_energy(i);
      if (p_.mes_sv[c] == Pin::Zero) energy += forced_energy[i];
    }
    if (!fits(used, cap) || !fits(energy, budget)) {
      infeasible_ = true;
      return;
    }
    for (std::size_t i = 0; i < N && !infeasible_; ++i) {
      const std::size_t c = p_.mes_index(i, m);
      Pin& mv = p_.mes_mv[c];
      Pin& sv = p_.mes_sv[c];
      if (mv == Pin::Free && !fits(used - foot[i] + footprint(i, Pin::One, sv, required[i]), cap)) set(mv, Pin::Zero);
      if (sv == Pin::Free && !fits(used - foot[i] + footprint(i, mv, Pin::One, required[i]), cap)) set(sv, Pin::Zero);
      if (sv == Pin::Free && !fits(energy + forced_energy[i], budget)) set(sv, Pin::One);
      const double task_energy = s_.popularity(i) * s_.mes_task_energy(i);
      const bool grow_fits = fits(used - foot[i] + footprint(i, mv, sv, true), cap);
      for (std::size_t u = 0; u < U; ++u) {
        Pin& t = p_.to_mes[p_.task_index(i, m, u)];
        if (t != Pin::Free) continue;
        if (!required[i] && !grow_fits) set(t, Pin::Zero);
        if (sv == Pin::Zero && !fits(energy + task_energy, budget)) set(t, Pin::Zero);
      }
      const double refreshed = footprint(i, mv, sv, mes_required(i, m));
      used += refreshed - foot[i];
      foot[i] = refreshed;
    }
  }

  void hmd_budgets(std::size_t u) {
    const std::size_t N = s_.viewpoint_count();
    const double cap = s_.hmd_cache_bits[u], budget = s_.hmd_energy_budget_j[u];
    std::vector<double> foot(N);
    std::vector<std::uint8_t> required(N);
    double used = 0.0, energy = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t h = p_.hmd_index(i, u);
      required[i] = hmd_required(i, u);
      foot[i] = footprint(i, p_.hmd_mv[h], p_.hmd_sv[h], required[i]);
      used += foot[i];
      if (required[i] && p_.hmd_sv[h] == Pin::Zero) energy += s_.popularity(i) * s_.hmd_task_energy(i);
    }
    if (!fits(used, cap) || !fits(energy, budget)) {
      infeasible_ = true;
      return;
    }
    for (std::size_t i = 0; i < N && !infeasible_; ++i) {
      const std::size_t h = p_.hmd_index(i, u);
      Pin& mv = p_.hmd_mv[h];
      Pin& sv = p_.hmd_sv[h];
      if (mv == Pin::Free && !fits(used - foot[i] + footprint(i, Pin::One, sv, required[i]), cap)) set(mv, Pin::Zero);
      if (sv == Pin::Free && !fits(used - foot[i] + footprint(i, mv, Pin::One, required[i]), cap)) set(sv, Pin::Zero);
      if (sv == Pin::Free && required[i] && !fits(energy + s_.popularity(i) * s_.hmd_task_energy(i), budget))
        set(sv, Pin::One);
      const double refreshed = footprint(i, mv, sv, required[i]);
      used += refreshed - foot[i];
      foot[i] = refreshed;
    }
  }

  // Pins every free variable whose opposite value cannot reach below the
  // threshold. Only the requests a variable touches are re-bounded.
  void eliminate_by_bound() {
    const std::size_t N = s_.viewpoint_count(), M = s_.sbs_count, U = s_.hmd_count;
    const auto rates = ctx_.bounding_rates(p_);
    std::vector<double> pair(N * U);
    double total = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t u = 0; u < U; ++u) total += pair[i * U + u] = ctx_.pair_bound(p_, rates, i, u);
    if (!(total < threshold_)) {
      infeasible_ = true;
      return;
    }

    // Bound with `pin` tentatively set, touching requests (i, u) for u in hmds.
    auto trial = [&](Pin& pin, Pin value, std::size_t i, std::size_t u_lo, std::size_t u_hi) {
      const Pin saved = pin;
      pin = value;
      double t = total;
      for (std::size_t u = u_lo; u < u_hi; ++u) t += ctx_.pair_bound(p_, rates, i, u) - pair[i * U + u];
      pin = saved;
      return t;
    };
    auto test = [&](Pin& pin, std::size_t i, std::size_t u_lo, std::size_t u_hi) {
      if (pin != Pin::Free) return;
      const bool zero_ok = trial(pin, Pin::Zero, i, u_lo, u_hi) < threshold_;
      const bool one_ok = trial(pin, Pin::One, i, u_lo, u_hi) < threshold_;
      if (!zero_ok && !one_ok) {
        infeasible_ = true;
        return;
      }
      if (zero_ok && one_ok) return;
      set(pin, zero_ok ? Pin::Zero : Pin::One);
      total = 0.0;
      for (std::size_t u = u_lo; u < u_hi; ++u) pair[i * U + u] = ctx_.pair_bound(p_, rates, i, u);
      for (double v : pair) total += v;
    };

    for (std::size_t i = 0; i < N && !infeasible_; ++i) {
      for (std::size_t m = 0; m < M && !infeasible_; ++m) {
        for (std::size_t u = 0; u < U && !infeasible_; ++u) {
          const std::size_t k = p_.task_index(i, m, u);
          test(p_.to_mes[k], i, u, u + 1);
          if (!infeasible_) test(p_.to_cloud[k], i, u, u + 1);
        }
        const std::size_t c = p_.mes_index(i, m);
        if (!infeasible_) test(p_.mes_mv[c], i, 0, U);
        if (!infeasible_) test(p_.mes_sv[c], i, 0, U);
      }
      for (std::size_t u = 0; u < U && !infeasible_; ++u) {
        const std::size_t h = p_.hmd_index(i, u);
        test(p_.hmd_mv[h], i, u, u + 1);
        if (!infeasible_) test(p_.hmd_sv[h], i, u, u + 1);
      }
    }
  }

  const BoundContext& ctx_;
  const Scenario& s_;
  Pins& p_;
  double threshold_;
  bool changed_ = false;
  bool infeasible_ = false;
};

}  // namespace

std::optional<Box> reduce(const BoundContext& ctx, Box box, double threshold) {
  Pins pins = pins_of(ctx.space(), box);
  Reducer reducer(ctx, pins, threshold);
  if (!reducer.run()) return std::nullopt;
  apply_pins(ctx.space(), pins, box);
  return box;
}

namespace {

struct Candidate {
  double value = kInf;
  std::optional<Decision> decision;
};

Candidate evaluate(const BoundContext& ctx, Decision d) {
  const Scenario& s = ctx.scenario();
  d.power = ctx.power_for(d);
  if (!check_feasibility(s, d).feasible()) return {};
  const double v = objective(s, d);
  if (is_unreachable(v)) return {};
  return {v, std::move(d)};
}

std::vector<std::size_t> nearest_association(const Scenario& s) {
  std::vector<std::size_t> a(s.hmd_count);
  for (std::size_t u = 0; u < s.hmd_count; ++u) a[u] = s.nearest_sbs(u);
  return a;
}

// Each HMD picks the SBS with the largest gain under log-normal noise.
std::vector<std::size_t> noisy_association(const Scenario& s, std::mt19937_64& rng, double sigma) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::size_t> a(s.hmd_count);
  for (std::size_t u = 0; u < s.hmd_count; ++u) {
    double best = -1.0;
    for (std::size_t m = 0; m < s.sbs_count; ++m) {
      const double g = s.gain(m, u) * std::exp(sigma * gauss(rng));
      if (g > best) best = g, a[u] = m;
    }
  }
  return a;
}

// The SBS carrying most of each HMD's transmission load, nearest if none.
std::vector<std::size_t> association_of(const Scenario& s, const Decision& d) {
  const auto load = link_load(s, d);
  std::vector<std::size_t> a = nearest_association(s);
  for (std::size_t u = 0; u < s.hmd_count; ++u) {
    double best = 0.0;
    for (std::size_t m = 0; m < s.sbs_count; ++m)
      if (load[m * s.hmd_count + u] > best) best = load[m * s.hmd_count + u], a[u] = m;
  }
  return a;
}

Candidate complete(const BoundContext& ctx, const Pins& pins, std::span<const std::size_t> association,
                   std::mt19937_64* rng) {
  const Scenario& s = ctx.scenario();
  const auto completion =
      complete_offload(s, pins, ctx.estimate_rates(), association, rng, ctx.config().restart_noise);
  if (!completion) return {};
  GreedyOutcome greedy = greedy_cache(s, *completion, &pins);
  if (greedy.feasible) {
    Candidate c = evaluate(ctx, greedy.decision);
    if (c.decision) return c;
  }
  return evaluate(ctx, *completion);
}

// Restart 0 serves every HMD from its nearest SBS, restart 1 leaves paths
// free; later restarts alternate between a noisy association and free paths
// with noisy ordering and costs.
Candidate restart(const BoundContext& ctx, const Pins& pins, const Box& box, std::size_t r) {
  const Scenario& s = ctx.scenario();
  const SolverConfig& cfg = ctx.config();
  if (r == 0) return complete(ctx, pins, nearest_association(s), nullptr);
  if (r == 1) return complete(ctx, pins, {}, nullptr);
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(box.id), static_cast<std::uint32_t>(box.id >> 32),
                    static_cast<std::uint32_t>(r)};
  std::mt19937_64 rng(seq);
  if (r % 2 == 0) {
    const auto a = noisy_association(s, rng, cfg.restart_noise);
    return complete(ctx, pins, a, &rng);
  }
  return complete(ctx, pins, {}, &rng);
}

// Single-HMD association moves from the start's association, best move per
// HMD, repeated while a full pass improves.
Candidate associate_descent(const BoundContext& ctx, const Pins& pins, Candidate start, bool parallel) {
  const Scenario& s = ctx.scenario();
  if (!start.decision) return start;
  auto a = association_of(s, *start.decision);
  const std::size_t M = s.sbs_count;
  for (std::size_t pass = 0; pass < ctx.config().association_passes; ++pass) {
    bool improved = false;
    for (std::size_t u = 0; u < s.hmd_count; ++u) {
      std::vector<Candidate> moves(M);
      auto try_move = [&](std::size_t m) {
        if (m == a[u]) return;
        auto next = a;
        next[u] = m;
        moves[m] = complete(ctx, pins, next, nullptr);
      };
      if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::size_t m = 0; m < M; ++m) try_move(m);
      } else {
        for (std::size_t m = 0; m < M; ++m) try_move(m);
      }
      for (std::size_t m = 0; m < M; ++m)
        if (moves[m].decision && moves[m].value < start.value) {
          start = std::move(moves[m]);
          a[u] = m;
          improved = true;
        }
    }
    if (!improved) break;
  }
  return start;
}

// Association descent from the best root_starts distinct restarts and from a
// transmission-first start, which settles associations with MES offload
// closed and then reopens it. Run with the root's pins and again inside
// popularity-first caches when the root admits them; the best result wins.
Candidate root_search(const BoundContext& ctx, const Pins& root_pins, const Box& root, Candidate incumbent) {
  const Scenario& s = ctx.scenario();
  const SolverConfig& cfg = ctx.config();

  auto transmission_first = [&](const Pins& pins) -> Candidate {
    Pins no_mes = pins;
    for (Pin& p : no_mes.to_mes)
      if (p == Pin::Free) p = Pin::Zero;
    Candidate cloud =
        associate_descent(ctx, no_mes, complete(ctx, no_mes, nearest_association(s), nullptr), cfg.parallel);
    if (!cloud.decision) return {};
    Candidate reopened = complete(ctx, pins, association_of(s, *cloud.decision), nullptr);
    return reopened.value < cloud.value ? reopened : cloud;
  };

  auto search = [&](const Pins& pins) -> Candidate {
    std::vector<Candidate> starts;
    for (std::size_t r = 0; r < std::max<std::size_t>(1, cfg.restarts); ++r)
      if (Candidate c = restart(ctx, pins, root, r); c.decision) starts.push_back(std::move(c));
    std::stable_sort(starts.begin(), starts.end(),
                     [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
    std::vector<Candidate> chosen;
    for (auto& c : starts) {
      if (chosen.size() >= cfg.root_starts) break;
      const bool duplicate =
          std::any_of(chosen.begin(), chosen.end(), [&](const Candidate& o) { return o.value == c.value; });
      if (!duplicate) chosen.push_back(std::move(c));
    }
    if (Candidate c = transmission_first(pins); c.decision) chosen.push_back(std::move(c));
    Candidate best;
    for (auto& c : chosen) {
      Candidate d = associate_descent(ctx, pins, std::move(c), cfg.parallel);
      if (d.value < best.value) best = std::move(d);
    }
    return best;
  };

  Candidate best = std::move(incumbent);
  auto take = [&](Candidate c) {
    if (c.decision && c.value < best.value && root_pins.admits(*c.decision)) best = std::move(c);
  };
  take(search(root_pins));
  Pins seeded = root_pins;
  seeded.pin_caches(popularity_caches(s));
  const bool distinct = seeded.mes_mv != root_pins.mes_mv || seeded.mes_sv != root_pins.mes_sv ||
                        seeded.hmd_mv != root_pins.hmd_mv || seeded.hmd_sv != root_pins.hmd_sv;
  if (distinct) take(search(seeded));
  return best;
}

BoundResult run_bound(const BoundContext& ctx, const Box& box, const std::optional<Decision>& parent,
                      bool parallel) {
  const Pins pins = pins_of(ctx.space(), box);
  BoundResult result;
  result.lower = std::max(box.lower_bound, lower_bound(ctx, pins));

  auto take = [&](Candidate c) {
    if (c.decision && c.value < result.upper) {
      result.upper = c.value;
      result.incumbent = std::move(c.decision);
    }
  };

  if (pins.all_decided()) {
    take(evaluate(ctx, decision_of(pins)));
    if (result.incumbent) result.lower = result.upper;
    return result;
  }

  if (parent && pins.admits(*parent)) take(evaluate(ctx, *parent));

  const std::size_t R = std::max<std::size_t>(1, ctx.config().restarts);
  std::vector<Candidate> found(R);
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t r = 0; r < R; ++r) found[r] = restart(ctx, pins, box, r);
  } else {
    for (std::size_t r = 0; r < R; ++r) found[r] = restart(ctx, pins, box, r);
  }
  for (auto& c : found) take(std::move(c));
  result.lower = std::min(result.lower, result.upper);
  return result;
}

}  // namespace

BoundResult bound(const BoundContext& ctx, const Box& box, const std::optional<Decision>& parent) {
  return run_bound(ctx, box, parent, ctx.config().parallel);
}

BoundResult bound_serial(const BoundContext& ctx, const Box& box, const std::optional<Decision>& parent) {
  return run_bound(ctx, box, parent, false);
}

std::size_t choose_dimension(const BoundContext& ctx, const Box& box) {
  const Scenario& s = ctx.scenario();
  const std::size_t N = s.viewpoint_count();
  const std::size_t block = N ? ctx.space().dims() / N : 0;
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.popularity(a) * s.mv_size(a) > s.popularity(b) * s.mv_size(b);
  });
  for (std::size_t i : order)
    for (std::size_t k = i * block; k < (i + 1) * block; ++k)
      if (!box.decided(k)) return k;
  throw BranchError("choose_dimension: box is fully decided");
}

namespace {

struct QueueEntry {
  double lower;
  std::uint64_t sequence;
  std::size_t slot;
};

struct QueueOrder {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.lower != b.lower) return a.lower > b.lower;
    return a.sequence > b.sequence;
  }
};

}  // namespace

SolveResult jcpt_solve(const Scenario& s, const SolverConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  SolveResult result;
  result.algorithm = cfg.algorithm;
  result.best_decision = Decision(s);
  auto finish = [&]() {
    result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
  };

  if (const auto violations = validate_scenario(s); !violations.empty())
    throw ConfigError("jcpt_solve: invalid scenario: " + violations.front().field + ": " + violations.front().message);

  const BoundContext ctx(s, cfg);
  const CoordinateSpace& space = ctx.space();
  const double eps = std::max(0.0, cfg.tolerance);
  auto threshold = [&](double incumbent) { return std::isfinite(incumbent) ? incumbent * (1.0 - eps) : kInf; };

  double incumbent = kInf;
  std::optional<Decision> best;
  // Lowest bound among boxes dropped only because of the tolerance.
  double dropped_floor = kInf;
  double global_lower = 0.0;
  std::uint64_t next_id = 0;

  Box root = full_box(space);
  if (cfg.pinned_caches) {
    Pins pins(s.viewpoint_count(), s.sbs_count, s.hmd_count);
    pins.pin_caches(*cfg.pinned_caches);
    apply_pins(space, pins, root);
  }
  root.id = next_id++;

  std::vector<Box> slots;
  std::vector<std::size_t> free_slots;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> open;
  auto push = [&](Box box) {
    std::size_t slot;
    if (!free_slots.empty()) {
      slot = free_slots.back();
      free_slots.pop_back();
      slots[slot] = std::move(box);
    } else {
      slot = slots.size();
      slots.push_back(std::move(box));
    }
    open.push({slots[slot].lower_bound, slots[slot].id, slot});
  };

  // Bounds a reduced box, updates the incumbent and queues it if useful. New
  // incumbents found below the root are polished by association descent.
  std::size_t explored = 0;
  std::optional<Pins> root_pins;
  auto process = [&](Box box, const std::optional<Decision>& parent, double& iteration_upper) {
    ++explored;
    BoundResult b = bound(ctx, box, parent);
    box.lower_bound = b.lower;
    box.upper_bound = b.upper;
    iteration_upper = std::min(iteration_upper, b.upper);
    if (b.incumbent && b.upper < incumbent) {
      incumbent = b.upper;
      best = b.incumbent;
      if (root_pins) {
        Candidate polished = associate_descent(ctx, *root_pins, {incumbent, best}, cfg.parallel);
        if (polished.value < incumbent) {
          incumbent = polished.value;
          best = std::move(polished.decision);
          iteration_upper = incumbent;
        }
      }
    }
    box.incumbent = std::move(b.incumbent);
    if (box.undecided_count() == 0) return;
    if (box.lower_bound >= threshold(incumbent)) {
      if (box.lower_bound < incumbent) dropped_floor = std::min(dropped_floor, box.lower_bound);
      return;
    }
    push(std::move(box));
  };

  auto record = [&](std::size_t iteration, double iteration_upper) {
    double open_min = open.empty() ? incumbent : open.top().lower;
    double floor = std::min({open_min, dropped_floor, incumbent});
    if (std::isfinite(floor)) global_lower = std::max(global_lower, floor);
    if (std::isfinite(incumbent)) global_lower = std::min(global_lower, incumbent);
    result.bound_trace.push_back({iteration, global_lower, iteration_upper, incumbent, open.size()});
  };

  double root_upper = kInf;
  if (auto reduced = reduce(ctx, std::move(root), kInf)) {
    const Pins pins = pins_of(space, *reduced);
    const Box root_box = *reduced;
    process(std::move(*reduced), std::nullopt, root_upper);
    Candidate polished = root_search(ctx, pins, root_box, {incumbent, best});
    root_pins = pins;
    if (polished.value < incumbent) {
      incumbent = polished.value;
      best = std::move(polished.decision);
      root_upper = incumbent;
    }
  }
  record(0, root_upper);

  std::size_t iteration = 0;
  while (!open.empty() && iteration < cfg.max_iterations) {
    if (std::isfinite(incumbent) && incumbent - global_lower <= eps * incumbent) break;
    const QueueEntry top = open.top();
    open.pop();
    Box box = std::move(slots[top.slot]);
    free_slots.push_back(top.slot);
    if (box.lower_bound >= threshold(incumbent)) {
      if (box.lower_bound < incumbent) dropped_floor = std::min(dropped_floor, box.lower_bound);
      continue;
    }
    ++iteration;
    const std::size_t k = choose_dimension(ctx, box);
    auto [left, right] = branch(box, k);
    double iteration_upper = kInf;
    for (Box* child : {&left, &right}) {
      child->id = next_id++;
      if (auto reduced = reduce(ctx, std::move(*child), threshold(incumbent)))
        process(std::move(*reduced), box.incumbent, iteration_upper);
    }
    record(iteration, iteration_upper);
  }

  result.iterations = iteration;
  result.boxes_explored = explored;
  if (!best) {
    result.feasible = false;
    result.global_lower_bound = global_lower;
    result.note = open.empty() ? "no feasible decision exists" : "no feasible decision found within the iteration limit";
    return finish();
  }
  if (open.empty()) global_lower = std::max(global_lower, std::min(dropped_floor, incumbent));
  result.feasible = true;
  result.best_decision = std::move(*best);
  result.best_value = incumbent;
  result.global_lower_bound = std::min(global_lower, incumbent);
  return finish();
}

}  // namespace vrmec
