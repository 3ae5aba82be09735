// baselines.hpp
//
// Benchmark strategies compared against JCPT:
//   NO   nearest offloading, greedy caching, optimized power
//   PEA  equal power over covered HMDs, JCPT for the rest
//   PF   popularity-first caching, JCPT for the rest
//   LRU  trace-driven least-recently-used caches
// Each returns the same SolveResult record as jcpt_solve.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vrmec/decision.hpp"
#include "vrmec/heuristics.hpp"
#include "vrmec/jcpt.hpp"
#include "vrmec/model.hpp"
#include "vrmec/radio.hpp"
#include "vrmec/result.hpp"

namespace vrmec {

struct TraceRequest {
  std::size_t step = 0;
  std::size_t hmd = 0;
  std::size_t viewpoint = 0;
};

struct RequestTrace {
  std::uint64_t seed = 0;
  std::vector<TraceRequest> entries;
};

// HMDs take turns (u = t mod U); each draws its viewpoint i.i.d. from q.
// length 0 means 20 N U requests.
RequestTrace make_trace(const Scenario& s, std::uint64_t seed, std::size_t length = 0);

SolveResult solve_nearest_offloading(const Scenario& s, const PowerOptions& power = {});

// HMD u is covered by SBS m when h_mu is at least the path-loss gain at the
// coverage distance.
inline constexpr double kDefaultCoverageM = 50.0;
PowerAllocation equal_power(const Scenario& s, double coverage_m = kDefaultCoverageM);
SolveResult solve_power_equal(const Scenario& s, const SolverConfig& cfg = {}, double coverage_m = kDefaultCoverageM);

SolveResult solve_popularity_first(const Scenario& s, const SolverConfig& cfg = {});

// Requests are served by the HMD cache, else the nearest MES if it holds the
// viewpoint, else the cloud through the nearest SBS. A miss inserts the SV
// (the MV if the SV cannot fit) at the missing node, evicting least recently
// used entries. Objective and hit ratio are averaged over the second half of
// the trace; best_decision is the end-of-trace snapshot.
SolveResult solve_lru(const Scenario& s, const RequestTrace& trace, const PowerOptions& power = {});

}  // namespace vrmec
