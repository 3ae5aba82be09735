// radio.hpp
//
// Downlink SINR and Shannon rates under universal frequency reuse, plus the
// continuous power-allocation subproblem for a fixed caching/offloading
// configuration.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vrmec/decision.hpp"
#include "vrmec/model.hpp"

namespace vrmec {

// p_mu h_mu / (I_inter + zeta I_intra + n0), with
//   I_inter = sum_{b != m} sum_{v != u} p_bv h_bv
//   I_intra = sum_{v != u} p_mv h_mv
double sinr(const Scenario& s, const PowerAllocation& p, std::size_t m, std::size_t u);

// W log2(1 + gamma).
double link_rate(const Scenario& s, double gamma);

// Rates of every link, row-major M x U.
std::vector<double> link_rates(const Scenario& s, const PowerAllocation& p);

// Interference-free rate at full budget. No feasible allocation can beat it
// on any link, so it is the optimistic rate used for lower bounds.
std::vector<double> optimistic_rates(const Scenario& s);

// Transmission demand carried by each link:
//   load_mu = sum_i q_i alpha d_i (T^M_imu + T^C_imu).
// A link is active iff its load is positive.
std::vector<double> link_load(const Scenario& s, const Decision& d);

// sum over loaded links of load / rate; +inf if a loaded link has rate 0.
double transmission_cost(const Scenario& s, std::span<const double> load, const PowerAllocation& p);

// P_T split equally over each SBS's active links.
PowerAllocation equal_split(const Scenario& s, std::span<const double> load);

struct PowerOptions {
  enum class Mode { CoordinateDescent, Grid };
  Mode mode = Mode::CoordinateDescent;
  // Coordinate descent stops when a full cycle improves by less than
  // relative_epsilon * (cost at the equal split).
  double relative_epsilon = 1e-6;
  int golden_iterations = 40;
  int max_cycles = 500;
  // Grid mode: per-link levels {0, P_T/(L-1), ..., P_T}, each SBS's levels
  // summing to at most P_T.
  std::size_t grid_levels = 4;

  static PowerOptions grid(std::size_t levels) {
    PowerOptions o;
    o.mode = Mode::Grid;
    o.grid_levels = levels;
    return o;
  }
};

// Inactive links get zero power. Coordinate descent visits active links in
// ascending (m, u) order and runs a golden-section search on each over
// [0, residual budget]; it never returns anything worse than the equal split.
// Grid mode enumerates every admissible level combination on active links.
PowerAllocation allocate_power(const Scenario& s, std::span<const double> load,
                               const PowerOptions& options = {});
PowerAllocation allocate_power(const Scenario& s, const Decision& d, const PowerOptions& options = {});

// Level combinations of k active links whose levels sum to at most L - 1.
std::vector<std::vector<std::size_t>> grid_splits(std::size_t links, std::size_t levels);

}  // namespace vrmec
