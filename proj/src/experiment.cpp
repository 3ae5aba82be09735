#include "vrmec/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "vrmec/baselines.hpp"
#include "vrmec/latency.hpp"

namespace vrmec {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Jcpt: return "jcpt";
    case Algorithm::No: return "no";
    case Algorithm::Pea: return "pea";
    case Algorithm::Pf: return "pf";
    case Algorithm::Lru: return "lru";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : all_algorithms())
    if (algorithm_name(a) == name) return a;
  throw ConfigError("unknown algorithm '" + name + "' (expected jcpt, no, pea, pf or lru)");
}

std::string axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::MesCacheCapacity: return "mes-cache-capacity";
    case SweepAxis::SbsCount: return "sbs-count";
    case SweepAxis::ZipfLambda: return "zipf-lambda";
    case SweepAxis::HmdCacheCapacity: return "hmd-cache-capacity";
  }
  return "unknown";
}

SweepAxis parse_axis(const std::string& name) {
  for (SweepAxis a : {SweepAxis::MesCacheCapacity, SweepAxis::SbsCount, SweepAxis::ZipfLambda,
                      SweepAxis::HmdCacheCapacity})
    if (axis_name(a) == name) return a;
  throw ConfigError("unsupported sweep axis '" + name +
                    "' (expected mes-cache-capacity, sbs-count, zipf-lambda or hmd-cache-capacity)");
}

void validate_experiment(const ExperimentConfig& cfg) {
  if (cfg.algorithms.empty()) throw ConfigError("algorithm list is empty");
  if (std::set<Algorithm>(cfg.algorithms.begin(), cfg.algorithms.end()).size() != cfg.algorithms.size())
    throw ConfigError("algorithm list has duplicates");
  if (cfg.values.empty()) throw ConfigError("sweep value list is empty");
  if (cfg.seeds.empty()) throw ConfigError("seed list is empty");
  for (double v : cfg.values) {
    if (!std::isfinite(v)) throw ConfigError("sweep values must be finite");
    switch (cfg.axis) {
      case SweepAxis::SbsCount:
        if (v < 1.0 || v != std::floor(v)) throw ConfigError("sbs-count values must be positive integers");
        break;
      case SweepAxis::ZipfLambda:
        if (v < 0.0) throw ConfigError("zipf-lambda values must be non-negative");
        break;
      case SweepAxis::MesCacheCapacity:
      case SweepAxis::HmdCacheCapacity:
        if (v < 0.0) throw ConfigError("cache capacities must be non-negative");
        break;
    }
  }
  if (!(cfg.solver.tolerance >= 0.0)) throw ConfigError("solver tolerance must be non-negative");
  if (cfg.solver.restarts == 0) throw ConfigError("solver restarts must be positive");
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig cfg;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "generation") {
        cfg.generation = generation_config_from_json(v);
      } else if (key == "algorithms") {
        cfg.algorithms.clear();
        for (const auto& a : v) cfg.algorithms.push_back(parse_algorithm(a.get<std::string>()));
      } else if (key == "axis") {
        cfg.axis = parse_axis(v.get<std::string>());
      } else if (key == "values") {
        cfg.values = v.get<std::vector<double>>();
      } else if (key == "seeds") {
        cfg.seeds = v.get<std::vector<std::uint64_t>>();
      } else if (key == "solver") {
        for (const auto& [sk, sv] : v.items()) {
          if (sk == "tolerance")
            cfg.solver.tolerance = sv.get<double>();
          else if (sk == "max_iterations")
            cfg.solver.max_iterations = sv.get<std::size_t>();
          else if (sk == "restarts")
            cfg.solver.restarts = sv.get<std::size_t>();
          else if (sk == "seed")
            cfg.solver.seed = sv.get<std::uint64_t>();
          else
            throw ConfigError("unknown solver field '" + sk + "'");
        }
      } else {
        throw ConfigError("unknown experiment field '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  return cfg;
}

GenerationConfig apply_axis(GenerationConfig g, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::MesCacheCapacity: g.mes_cache_bits = value; break;
    case SweepAxis::SbsCount: g.sbs_count = static_cast<std::size_t>(value); break;
    case SweepAxis::ZipfLambda: g.zipf_lambda = value; break;
    case SweepAxis::HmdCacheCapacity: g.hmd_cache_bits = value; break;
  }
  return g;
}

SolveResult run_algorithm(const Scenario& s, Algorithm a, const SolverConfig& solver) {
  switch (a) {
    case Algorithm::Jcpt: return jcpt_solve(s, solver);
    case Algorithm::No: return solve_nearest_offloading(s, solver.power);
    case Algorithm::Pea: return solve_power_equal(s, solver);
    case Algorithm::Pf: return solve_popularity_first(s, solver);
    case Algorithm::Lru: return solve_lru(s, make_trace(s, s.seed), solver.power);
  }
  throw ConfigError("unknown algorithm");
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  validate_experiment(cfg);
  struct Cell {
    std::size_t value, seed, algorithm;
  };
  std::vector<Cell> cells;
  for (std::size_t v = 0; v < cfg.values.size(); ++v)
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s)
      for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) cells.push_back({v, s, a});

  std::vector<ResultRow> rows(cells.size());
  auto run_cell = [&](std::size_t k) {
    const Cell& c = cells[k];
    ResultRow& row = rows[k];
    row.axis_value = cfg.values[c.value];
    row.seed = cfg.seeds[c.seed];
    row.algorithm = cfg.algorithms[c.algorithm];
    row.generation = apply_axis(cfg.generation, cfg.axis, row.axis_value);
    const Scenario s = generate_scenario(row.generation, row.seed);
    SolverConfig solver = cfg.solver;
    solver.parallel = false;
    const SolveResult r = run_algorithm(s, row.algorithm, solver);
    row.feasible = r.feasible;
    row.iterations = r.iterations;
    row.boxes_explored = r.boxes_explored;
    row.wall_time_s = r.wall_time_s;
    row.bound_trace = r.bound_trace;
    if (r.feasible) {
      row.objective = r.best_value;
      row.lower_bound = r.global_lower_bound;
      row.delay_sum = unweighted_delay_sum(s, r.best_decision);
      row.hit_ratio = r.trace_hit_ratio ? *r.trace_hit_ratio : cache_hit_ratio(s, r.best_decision);
    }
  };
  if (cfg.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < cells.size(); ++k) run_cell(k);
  } else {
    for (std::size_t k = 0; k < cells.size(); ++k) run_cell(k);
  }
  return rows;
}

std::vector<ResultRow> sweep_parameter(ExperimentConfig cfg, SweepAxis axis, std::vector<double> values) {
  cfg.axis = axis;
  cfg.values = std::move(values);
  return run_experiment(cfg);
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  std::map<std::pair<double, Algorithm>, std::vector<const ResultRow*>> groups;
  std::vector<std::pair<double, Algorithm>> order;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.axis_value, r.algorithm);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  auto stats = [](const std::vector<double>& xs, double& mean, double& sd) {
    mean = sd = 0.0;
    if (xs.empty()) return;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return;
    for (double x : xs) sd += (x - mean) * (x - mean);
    sd = std::sqrt(sd / static_cast<double>(xs.size() - 1));
  };
  for (const auto& key : order) {
    SummaryRow s;
    s.axis_value = key.first;
    s.algorithm = key.second;
    std::vector<double> obj, delay, hit;
    for (const ResultRow* r : groups[key]) {
      ++s.runs;
      if (!r->feasible) continue;
      ++s.feasible_runs;
      obj.push_back(r->objective);
      delay.push_back(r->delay_sum);
      hit.push_back(r->hit_ratio);
    }
    stats(obj, s.objective_mean, s.objective_std);
    stats(delay, s.delay_sum_mean, s.delay_sum_std);
    stats(hit, s.hit_ratio_mean, s.hit_ratio_std);
    out.push_back(s);
  }
  return out;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

const char* kProvenanceHeader =
    "sbs_count,hmd_count,viewpoint_count,area_side_m,size_min_bits,size_max_bits,zipf_lambda,sv_ratio,"
    "cycles_per_bit,total_bandwidth_hz,bandwidth_per_hmd_hz,noise_power_w,orthogonality,total_power_dbm,"
    "mes_cpu_hz,hmd_cpu_hz,mes_energy_coeff,hmd_energy_coeff,mes_cache_bits,hmd_cache_bits,mes_energy_budget_j,"
    "hmd_energy_budget_j,backhaul_delay_s,path_loss_ref_gain,path_loss_ref_distance_m,path_loss_exponent,"
    "solver_tolerance,solver_max_iterations,solver_restarts,solver_seed";

std::string provenance(const GenerationConfig& g, const SolverConfig& solver) {
  std::ostringstream os;
  os << g.sbs_count << ',' << g.hmd_count << ',' << g.viewpoint_count << ',' << fmt(g.area_side_m) << ','
     << fmt(g.size_min_bits) << ',' << fmt(g.size_max_bits) << ',' << fmt(g.zipf_lambda) << ',' << fmt(g.sv_ratio)
     << ',' << fmt(g.cycles_per_bit) << ',' << fmt(g.total_bandwidth_hz) << ','
     << (g.bandwidth_per_hmd_hz ? fmt(*g.bandwidth_per_hmd_hz) : std::string()) << ',' << fmt(g.noise_power_w)
     << ',' << fmt(g.orthogonality) << ',' << fmt(g.total_power_dbm) << ',' << fmt(g.mes_cpu_hz) << ','
     << fmt(g.hmd_cpu_hz) << ',' << fmt(g.mes_energy_coeff) << ',' << fmt(g.hmd_energy_coeff) << ','
     << fmt(g.mes_cache_bits) << ',' << fmt(g.hmd_cache_bits) << ',' << fmt(g.mes_energy_budget_j) << ','
     << fmt(g.hmd_energy_budget_j) << ',' << fmt(g.backhaul_delay_s) << ',' << fmt(g.path_loss.ref_gain) << ','
     << fmt(g.path_loss.ref_distance_m) << ',' << fmt(g.path_loss.exponent) << ',' << fmt(solver.tolerance) << ','
     << solver.max_iterations << ',' << solver.restarts << ',' << solver.seed;
  return os.str();
}

}  // namespace

void write_rows_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<ResultRow>& rows) {
  out << "axis,axis_value,seed,algorithm,infeasible,objective_s,sum_of_delays_s,cache_hit_ratio,lower_bound_s,"
         "iterations,boxes_explored,"
      << kProvenanceHeader << '\n';
  for (const auto& r : rows) {
    out << axis_name(cfg.axis) << ',' << fmt(r.axis_value) << ',' << r.seed << ',' << algorithm_name(r.algorithm)
        << ',' << (r.feasible ? 0 : 1) << ',';
    if (r.feasible)
      out << fmt(r.objective) << ',' << fmt(r.delay_sum) << ',' << fmt(r.hit_ratio) << ',' << fmt(r.lower_bound);
    else
      out << ",,,";
    out << ',' << r.iterations << ',' << r.boxes_explored << ',' << provenance(r.generation, cfg.solver) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const ExperimentConfig& cfg, const std::vector<SummaryRow>& rows) {
  out << "axis,axis_value,algorithm,runs,feasible_runs,objective_mean_s,objective_std_s,sum_of_delays_mean_s,"
         "sum_of_delays_std_s,cache_hit_ratio_mean,cache_hit_ratio_std\n";
  for (const auto& r : rows)
    out << axis_name(cfg.axis) << ',' << fmt(r.axis_value) << ',' << algorithm_name(r.algorithm) << ',' << r.runs
        << ',' << r.feasible_runs << ',' << fmt(r.objective_mean) << ',' << fmt(r.objective_std) << ','
        << fmt(r.delay_sum_mean) << ',' << fmt(r.delay_sum_std) << ',' << fmt(r.hit_ratio_mean) << ','
        << fmt(r.hit_ratio_std) << '\n';
}

}  // namespace vrmec
