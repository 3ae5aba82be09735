// heuristics.hpp
//
// Greedy caching/power completion for a fixed offload, and randomized
// offload completion inside a partially pinned decision. Shared by the
// baselines and by JCPT's upper-bounding step.

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "vrmec/coords.hpp"
#include "vrmec/decision.hpp"
#include "vrmec/model.hpp"
#include "vrmec/radio.hpp"

namespace vrmec {

struct PowerSpec {
  PowerOptions options;
  std::optional<PowerAllocation> pinned;  // used verbatim when set
};

struct GreedyOutcome {
  bool feasible = false;
  Decision decision;
  double value = kInfinity;
  std::string reason;  // why the outcome is infeasible

  static constexpr double kInfinity = std::numeric_limits<double>::infinity();
};

// Caching for a fixed offload. Every MES/HMD that must hold viewpoint i gets
// the MV first; MV->SV upgrades are then taken by energy saved per extra bit
// until energy budgets hold, and by latency saved per extra bit while
// capacity remains. Pinned cache variables are honoured. Power is left
// untouched.
GreedyOutcome greedy_cache(const Scenario& s, const Decision& offload, const Pins* pins = nullptr);

// greedy_cache followed by power allocation and a full feasibility check.
GreedyOutcome greedy_cache_power(const Scenario& s, const Decision& offload, const Pins* pins = nullptr,
                                 const PowerSpec& power = {});

// Rates under a nominal load: every HMD served by its nearest SBS with the
// budget split equally; a link outside that association is rated as if it
// got one more equal share. Used only to rank paths before power is known.
std::vector<double> nominal_rates(const Scenario& s);

// Each cache scans viewpoints by popularity (ties to the lower index) and
// takes the SV if it fits, else the MV if that fits. Offload and power are
// left empty.
Decision popularity_caches(const Scenario& s);

// Picks one path for every (i, u) consistent with the pins, tracking cache
// capacity and energy as it goes. Requests are visited by descending q_i d_i;
// with rng set, both the visiting order and the path costs are perturbed by
// log-normal noise of the given sigma. The returned decision carries the
// tentative cache placement it reserved (always feasible for the offload).
// A non-empty association restricts free MES/cloud paths of HMD u to SBS
// association[u].
std::optional<Decision> complete_offload(const Scenario& s, const Pins& pins, std::span<const double> rates,
                                         std::span<const std::size_t> association = {},
                                         std::mt19937_64* rng = nullptr, double noise_sigma = 0.5);

}  // namespace vrmec
