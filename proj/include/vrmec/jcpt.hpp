// jcpt.hpp
//
// Joint caching, power allocation and task offloading (JCPT) by discrete
// branch-reduce-and-bound over the complemented binary lattice of
// coords.hpp. Power is not a box dimension: every bound evaluation solves
// the inner power problem for its candidate configuration.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vrmec/coords.hpp"
#include "vrmec/decision.hpp"
#include "vrmec/model.hpp"
#include "vrmec/radio.hpp"
#include "vrmec/result.hpp"

namespace vrmec {

struct SolverConfig {
  double tolerance = 0.02;  // stop when incumbent - lower <= tolerance * incumbent
  std::size_t max_iterations = 5000;
  std::size_t restarts = 8;
  std::uint64_t seed = 1;
  double restart_noise = 0.5;  // log-normal sigma of randomized restarts
  // Local search by single-HMD association moves: passes per descent, and
  // how many distinct root restarts it starts from.
  std::size_t association_passes = 5;
  std::size_t root_starts = 8;
  PowerOptions power;
  // Restricted variants: power fixed verbatim, or every cache variable
  // fixed to the cache part of the given decision.
  std::optional<PowerAllocation> pinned_power;
  std::optional<Decision> pinned_caches;
  bool parallel = true;  // OpenMP over restarts
  std::string algorithm = "jcpt";
};

// Per-solve immutable data plus a memo of power allocations by link load.
class BoundContext {
 public:
  BoundContext(const Scenario& s, const SolverConfig& cfg);

  const Scenario& scenario() const { return s_; }
  const SolverConfig& config() const { return cfg_; }
  const CoordinateSpace& space() const { return space_; }

  // Rates used for lower bounds: the pinned allocation's rates, the inner
  // solver's rates once every offload is decided, otherwise interference-free
  // rates at full budget.
  std::vector<double> bounding_rates(const Pins& pins) const;
  // Rates used to rank paths during offload completion.
  const std::vector<double>& estimate_rates() const { return estimate_; }

  PowerAllocation power_for(const Decision& d) const;

  // Lower bound on q_i tau_iu over every completion of the pins; +inf when
  // no path for (i, u) remains.
  double pair_bound(const Pins& pins, std::span<const double> rates, std::size_t i, std::size_t u) const;

 private:
  const Scenario& s_;
  SolverConfig cfg_;
  CoordinateSpace space_;
  std::vector<double> optimistic_;
  std::vector<double> estimate_;
  std::optional<std::vector<double>> pinned_rates_;
  mutable std::map<std::vector<double>, PowerAllocation> power_memo_;
  mutable std::mutex memo_mutex_;
};

// Sum of pair bounds; +inf when some request has no remaining path.
double lower_bound(const BoundContext& ctx, const Pins& pins);

// Fixes undecided coordinates whose other value breaks a structural
// constraint or cannot beat the threshold (prune level derived from the
// incumbent), to a fixpoint. nullopt when the box holds no useful point.
std::optional<Box> reduce(const BoundContext& ctx, Box box, double threshold);

struct BoundResult {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  std::optional<Decision> incumbent;
};

// Lower bound plus the best of the restarts (and the parent's incumbent if
// the box still admits it). The serial variant is the reference for tests.
BoundResult bound(const BoundContext& ctx, const Box& box, const std::optional<Decision>& parent = std::nullopt);
BoundResult bound_serial(const BoundContext& ctx, const Box& box,
                         const std::optional<Decision>& parent = std::nullopt);

// Undecided coordinate of the viewpoint with the largest q_i d_i (ties to
// the lower index), lowest index within that viewpoint's block.
std::size_t choose_dimension(const BoundContext& ctx, const Box& box);

SolveResult jcpt_solve(const Scenario& s, const SolverConfig& cfg = {});

}  // namespace vrmec
