// experiment.hpp
//
// Experiment harness: runs every (sweep value, seed, algorithm) cell on a
// freshly generated scenario and tabulates objective, sum of delays and
// cache hit ratio, plus per-point mean/std summaries.

#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "vrmec/jcpt.hpp"
#include "vrmec/model.hpp"
#include "vrmec/serialize.hpp"

namespace vrmec {

enum class Algorithm { Jcpt, No, Pea, Pf, Lru };
enum class SweepAxis { MesCacheCapacity, SbsCount, ZipfLambda, HmdCacheCapacity };

std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);  // ConfigError if unknown
std::string axis_name(SweepAxis a);
SweepAxis parse_axis(const std::string& name);  // ConfigError if unknown

inline const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all = {Algorithm::Jcpt, Algorithm::No, Algorithm::Pea, Algorithm::Pf,
                                             Algorithm::Lru};
  return all;
}

struct ExperimentConfig {
  GenerationConfig generation = GenerationConfig::desk_preset();
  std::vector<Algorithm> algorithms = all_algorithms();
  SweepAxis axis = SweepAxis::MesCacheCapacity;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  SolverConfig solver;
  bool parallel = true;  // OpenMP over cells
};

// ConfigError on empty lists, duplicate algorithms or values an axis cannot take.
void validate_experiment(const ExperimentConfig& cfg);

// Keys: generation (object), algorithms, axis, values, seeds,
// solver {tolerance, max_iterations, restarts, seed}. Missing keys keep
// defaults.
ExperimentConfig experiment_config_from_json(const Json& j);

// The generation config with one axis set to value.
GenerationConfig apply_axis(GenerationConfig g, SweepAxis axis, double value);

SolveResult run_algorithm(const Scenario& s, Algorithm a, const SolverConfig& solver);

struct ResultRow {
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::Jcpt;
  bool feasible = false;
  double objective = 0.0;        // popularity-weighted latency, s
  double delay_sum = 0.0;        // unweighted sum of delays, s
  double hit_ratio = 0.0;
  double lower_bound = 0.0;
  std::size_t iterations = 0;
  std::size_t boxes_explored = 0;
  double wall_time_s = 0.0;
  GenerationConfig generation;  // effective parameters of the cell
  std::vector<TraceEntry> bound_trace;
};

// Rows ordered by (axis value, seed, algorithm) regardless of scheduling.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// run_experiment with axis and values replaced.
std::vector<ResultRow> sweep_parameter(ExperimentConfig cfg, SweepAxis axis, std::vector<double> values);

struct SummaryRow {
  double axis_value = 0.0;
  Algorithm algorithm = Algorithm::Jcpt;
  std::size_t runs = 0;
  std::size_t feasible_runs = 0;
  double objective_mean = 0.0, objective_std = 0.0;
  double delay_sum_mean = 0.0, delay_sum_std = 0.0;
  double hit_ratio_mean = 0.0, hit_ratio_std = 0.0;
};

// Mean and sample standard deviation over feasible runs.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

// Wall time is not written so that identical configs give identical files.
void write_rows_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<SummaryRow>& rows);

}  // namespace vrmec
