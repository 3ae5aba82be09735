#include "vrmec/radio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vrmec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Received-power bookkeeping s_bv = p_bv h_bv with row/column/total sums, so
// each link's interference is O(1):
//   I_inter(m,u) = total - row[m] - col[u] + s_mu
//   I_intra(m,u) = row[m] - s_mu
class InterferenceState {
 public:
  InterferenceState(const Scenario& s, const PowerAllocation& p)
      : s_(s), m_(s.sbs_count), u_(s.hmd_count), rx_(m_ * u_), row_(m_), col_(u_) {
    for (std::size_t m = 0; m < m_; ++m)
      for (std::size_t u = 0; u < u_; ++u) rx_[m * u_ + u] = p(m, u) * s.gain(m, u);
    recompute();
  }

  void recompute() {
    std::fill(row_.begin(), row_.end(), 0.0);
    std::fill(col_.begin(), col_.end(), 0.0);
    total_ = 0.0;
    for (std::size_t m = 0; m < m_; ++m)
      for (std::size_t u = 0; u < u_; ++u) {
        const double v = rx_[m * u_ + u];
        row_[m] += v;
        col_[u] += v;
      }
    for (double r : row_) total_ += r;
  }

  void set_power(std::size_t m, std::size_t u, double power) {
    const std::size_t k = m * u_ + u;
    const double next = power * s_.gain(m, u);
    const double delta = next - rx_[k];
    rx_[k] = next;
    row_[m] += delta;
    col_[u] += delta;
    total_ += delta;
  }

  double rate(std::size_t m, std::size_t u) const {
    const std::size_t k = m * u_ + u;
    const double own = rx_[k];
    if (own <= 0.0) return 0.0;
    const double inter = std::max(0.0, total_ - row_[m] - col_[u] + own);
    const double intra = std::max(0.0, row_[m] - own);
    const double gamma = own / (inter + s_.orthogonality * intra + s_.noise_power_w);
    return s_.bandwidth_per_hmd_hz * std::log2(1.0 + gamma);
  }

  double cost(std::span<const double> load, std::span<const std::size_t> active) const {
    double c = 0.0;
    for (std::size_t k : active) {
      const double r = rate(k / u_, k % u_);
      if (r <= 0.0) return kInf;
      c += load[k] / r;
    }
    return c;
  }

 private:
  const Scenario& s_;
  std::size_t m_, u_;
  std::vector<double> rx_, row_, col_;
  double total_ = 0.0;
};

std::vector<std::size_t> active_links(std::span<const double> load) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < load.size(); ++k)
    if (load[k] > 0.0) out.push_back(k);
  return out;
}

PowerAllocation coordinate_descent(const Scenario& s, std::span<const double> load,
                                   const PowerOptions& opt) {
  const auto active = active_links(load);
  PowerAllocation p = equal_split(s, load);
  if (active.empty()) return p;

  InterferenceState state(s, p);
  double current = state.cost(load, active);
  const double eps = opt.relative_epsilon * (std::isfinite(current) ? current : 1.0);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const std::size_t U = s.hmd_count;

  for (int cycle = 0; cycle < opt.max_cycles; ++cycle) {
    const double before = current;
    for (std::size_t k : active) {
      const std::size_t m = k / U, u = k % U;
      const double residual = std::max(0.0, s.total_power_w - (p.sbs_total(m) - p(m, u)));
      auto eval = [&](double x) {
        state.set_power(m, u, x);
        return state.cost(load, active);
      };
      double lo = 0.0, hi = residual;
      double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
      double f1 = eval(x1), f2 = eval(x2);
      for (int it = 0; it < opt.golden_iterations; ++it) {
        if (f1 <= f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - phi * (hi - lo);
          f1 = eval(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + phi * (hi - lo);
          f2 = eval(x2);
        }
      }
      double best_x = p(m, u), best_f = current;
      for (double x : {0.5 * (lo + hi), residual}) {
        const double f = eval(x);
        if (f < best_f) {
          best_f = f;
          best_x = x;
        }
      }
      p(m, u) = best_x;
      state.set_power(m, u, best_x);
      current = best_f;
    }
    state.recompute();
    current = state.cost(load, active);
    if (!(before - current >= eps)) break;
  }
  return p;
}

PowerAllocation grid_search(const Scenario& s, std::span<const double> load, const PowerOptions& opt) {
  if (opt.grid_levels < 2) throw DomainError("grid power search needs at least 2 levels");
  const std::size_t M = s.sbs_count, U = s.hmd_count;
  std::vector<std::vector<std::size_t>> links(M);
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t u = 0; u < U; ++u)
      if (load[m * U + u] > 0.0) links[m].push_back(u);

  std::vector<std::vector<std::vector<std::size_t>>> splits(M);
  double combos = 1.0;
  for (std::size_t m = 0; m < M; ++m) {
    splits[m] = grid_splits(links[m].size(), opt.grid_levels);
    combos *= static_cast<double>(splits[m].size());
  }
  if (combos > 1e7) throw DomainError("grid power search: too many level combinations");

  const double step = s.total_power_w / static_cast<double>(opt.grid_levels - 1);
  PowerAllocation p(M, U), best(M, U);
  double best_cost = kInf;
  std::vector<std::size_t> odo(M, 0);
  bool first = true;
  while (true) {
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t j = 0; j < links[m].size(); ++j)
        p(m, links[m][j]) = step * static_cast<double>(splits[m][odo[m]][j]);
    const double c = transmission_cost(s, load, p);
    if (first || c < best_cost) {
      best_cost = c;
      best = p;
      first = false;
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

}  // namespace

double sinr(const Scenario& s, const PowerAllocation& p, std::size_t m, std::size_t u) {
  if (m >= s.sbs_count || u >= s.hmd_count) throw std::out_of_range("sinr: link index out of range");
  if (p.sbs_count != s.sbs_count || p.hmd_count != s.hmd_count)
    throw DomainError("sinr: power matrix dimensions do not match scenario");
  double inter = 0.0, intra = 0.0;
  for (std::size_t b = 0; b < s.sbs_count; ++b)
    for (std::size_t v = 0; v < s.hmd_count; ++v) {
      if (v == u) continue;
      if (b == m)
        intra += p(b, v) * s.gain(b, v);
      else
        inter += p(b, v) * s.gain(b, v);
    }
  return p(m, u) * s.gain(m, u) / (inter + s.orthogonality * intra + s.noise_power_w);
}

double link_rate(const Scenario& s, double gamma) {
  if (!(gamma >= 0.0)) throw DomainError("link_rate: negative SINR");
  return s.bandwidth_per_hmd_hz * std::log2(1.0 + gamma);
}

std::vector<double> link_rates(const Scenario& s, const PowerAllocation& p) {
  InterferenceState state(s, p);
  std::vector<double> r(s.sbs_count * s.hmd_count);
  for (std::size_t m = 0; m < s.sbs_count; ++m)
    for (std::size_t u = 0; u < s.hmd_count; ++u) r[m * s.hmd_count + u] = state.rate(m, u);
  return r;
}

std::vector<double> optimistic_rates(const Scenario& s) {
  std::vector<double> r(s.sbs_count * s.hmd_count);
  for (std::size_t m = 0; m < s.sbs_count; ++m)
    for (std::size_t u = 0; u < s.hmd_count; ++u)
      r[m * s.hmd_count + u] = link_rate(s, s.total_power_w * s.gain(m, u) / s.noise_power_w);
  return r;
}

std::vector<double> link_load(const Scenario& s, const Decision& d) {
  const std::size_t M = s.sbs_count, U = s.hmd_count;
  std::vector<double> load(M * U, 0.0);
  for (std::size_t i = 0; i < s.viewpoint_count(); ++i) {
    const double w = s.popularity(i) * s.sv_size(i);
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t u = 0; u < U; ++u)
        if (d.to_mes(i, m, u) || d.to_cloud(i, m, u))
          load[m * U + u] += w * (static_cast<double>(d.to_mes(i, m, u)) + d.to_cloud(i, m, u));
  }
  return load;
}

double transmission_cost(const Scenario& s, std::span<const double> load, const PowerAllocation& p) {
  InterferenceState state(s, p);
  const auto active = active_links(load);
  return state.cost(load, active);
}

PowerAllocation equal_split(const Scenario& s, std::span<const double> load) {
  const std::size_t M = s.sbs_count, U = s.hmd_count;
  PowerAllocation p(M, U);
  for (std::size_t m = 0; m < M; ++m) {
    std::size_t n = 0;
    for (std::size_t u = 0; u < U; ++u) n += load[m * U + u] > 0.0;
    if (n == 0) continue;
    for (std::size_t u = 0; u < U; ++u)
      if (load[m * U + u] > 0.0) p(m, u) = s.total_power_w / static_cast<double>(n);
  }
  return p;
}

PowerAllocation allocate_power(const Scenario& s, std::span<const double> load, const PowerOptions& options) {
  if (load.size() != s.sbs_count * s.hmd_count) throw DomainError("allocate_power: load has wrong size");
  return options.mode == PowerOptions::Mode::Grid ? grid_search(s, load, options)
                                                  : coordinate_descent(s, load, options);
}

PowerAllocation allocate_power(const Scenario& s, const Decision& d, const PowerOptions& options) {
  const auto load = link_load(s, d);
  return allocate_power(s, load, options);
}

std::vector<std::vector<std::size_t>> grid_splits(std::size_t links, std::size_t levels) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(links, 0);
  const std::size_t cap = levels - 1;
  // Enumerate in lexicographic order with the running-sum pruned.
  auto rec = [&](auto&& self, std::size_t j, std::size_t used) -> void {
    if (j == links) {
      out.push_back(cur);
      return;
    }
    for (std::size_t k = 0; used + k <= cap; ++k) {
      cur[j] = k;
      self(self, j + 1, used + k);
    }
  };
  rec(rec, 0, 0);
  return out;
}

}  // namespace vrmec
