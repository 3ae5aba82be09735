// result.hpp
//
// Uniform solve record shared by JCPT and every baseline.

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vrmec/decision.hpp"

namespace vrmec {

struct TraceEntry {
  std::size_t iteration = 0;
  double f_min = 0.0;  // global lower bound after the iteration
  double f_max = std::numeric_limits<double>::infinity();  // best upper bound found in the iteration
  double incumbent = std::numeric_limits<double>::infinity();
  std::size_t boxes_open = 0;
};

struct SolveResult {
  std::string algorithm;
  bool feasible = false;
  Decision best_decision;
  double best_value = std::numeric_limits<double>::infinity();
  double global_lower_bound = 0.0;
  std::size_t iterations = 0;
  std::size_t boxes_explored = 0;
  double wall_time_s = 0.0;
  std::vector<TraceEntry> bound_trace;
  // Trace-driven strategies report warm-cache averages instead of the
  // snapshot decision's metrics.
  std::optional<double> trace_hit_ratio;
  std::string note;
};

}  // namespace vrmec
