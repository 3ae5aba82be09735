// oracle.hpp
//
// Exhaustive ground truth on tiny instances. For a fixed offload the
// objective splits into transmission (depends only on power), backhaul, and
// one compute term per cache node (depends only on that node's cache), so
// the search enumerates every offload and, for each, every power grid point
// and every cache subset of every node independently. The result equals the
// minimum over the full decision lattice times the power grid.

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "vrmec/decision.hpp"
#include "vrmec/model.hpp"

namespace vrmec {

struct OracleOptions {
  std::size_t power_levels = 4;  // per-link levels {0, P_T/(L-1), ..., P_T}
  // Refuse when the work estimate (evaluations) exceeds this.
  std::uint64_t cap = std::uint64_t{1} << 24;
  std::size_t max_decisions = 64;
  bool parallel = true;
};

struct OracleResult {
  double optimal_value = std::numeric_limits<double>::infinity();
  // The lexicographically smallest argmin decision of each optimal offload,
  // smallest first, at most max_decisions of them.
  std::vector<Decision> optimal_decisions;
  // Exact number of argmin points (saturating).
  std::uint64_t argmin_count = 0;
  // Feasible lattice points times power grid points (saturating). Links
  // with no load hold zero power, so only loaded links span the grid.
  std::uint64_t enumerated_count = 0;

  bool feasible() const { return !optimal_decisions.empty(); }
};

class OracleRefused : public std::runtime_error {
 public:
  OracleRefused(const std::string& what, double estimate) : std::runtime_error(what), estimate(estimate) {}
  double estimate;
};

// Evaluations the oracle would perform: offloads x (power grid points + cache
// subsets over all nodes).
double oracle_work_estimate(const Scenario& s, std::size_t power_levels);

OracleResult brute_force_solve(const Scenario& s, const OracleOptions& options = {});
OracleResult brute_force_solve_serial(const Scenario& s, const OracleOptions& options = {});

}  // namespace vrmec
