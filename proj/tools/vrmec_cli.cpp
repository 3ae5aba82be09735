// vrmec_cli: scenario generation, single solves and parameter sweeps.
//
//   vrmec_cli generate --config cfg.json --seed 7 --out scenario.json
//   vrmec_cli solve --scenario scenario.json --algorithm jcpt --out result.json
//   vrmec_cli sweep --config cfg.json --axis mes-cache-capacity --values 8e6,16e6 --seeds 1,2 --out rows.csv
//
// Exit codes: 0 success, 1 runtime failure, 2 config error, 3 nothing feasible.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "vrmec/baselines.hpp"
#include "vrmec/experiment.hpp"
#include "vrmec/jcpt.hpp"
#include "vrmec/latency.hpp"
#include "vrmec/serialize.hpp"

using namespace vrmec;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::istringstream is(item);
    T v;
    if (!(is >> v) || !is.eof()) throw ConfigError("bad " + what + " entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(what + " list is empty");
  return out;
}

// A generation config may be given bare or as the "generation" member of an
// experiment config.
GenerationConfig generation_from_file(const std::string& path) {
  const Json j = read_json(path);
  if (j.is_object() && j.contains("generation")) return generation_config_from_json(j.at("generation"));
  return generation_config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VR viewpoint caching, power allocation and offloading over MEC small cells"};
  app.require_subcommand(1);

  std::string config_path, out_path, scenario_path, algorithm = "jcpt", trace_path, axis, values, seeds;
  std::uint64_t seed = 1;
  double tolerance = SolverConfig{}.tolerance;
  std::size_t max_iterations = SolverConfig{}.max_iterations, restarts = SolverConfig{}.restarts;
  std::size_t grid_levels = 0;

  auto* gen = app.add_subcommand("generate", "Generate a scenario from a generation config");
  gen->add_option("--config", config_path, "Generation config (JSON)")->required();
  gen->add_option("--seed", seed, "Scenario seed")->required();
  gen->add_option("--out", out_path, "Scenario output (JSON)")->required();

  auto* solve = app.add_subcommand("solve", "Solve one scenario with one algorithm");
  solve->add_option("--scenario", scenario_path, "Scenario (JSON)")->required();
  solve->add_option("--algorithm", algorithm, "jcpt, no, pea, pf or lru");
  solve->add_option("--tolerance", tolerance, "Relative gap at which JCPT stops");
  solve->add_option("--max-iterations", max_iterations, "JCPT iteration limit");
  solve->add_option("--restarts", restarts, "Heuristic restarts per bounded box");
  solve->add_option("--seed", seed, "Solver seed");
  solve->add_option("--power-grid", grid_levels, "Restrict power to an L-level grid (0 = continuous)");
  solve->add_option("--trace", trace_path, "Per-iteration bound trace (CSV)");
  solve->add_option("--out", out_path, "Result output (JSON)")->required();

  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter over seeds and algorithms");
  sweep->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sweep->add_option("--axis", axis, "mes-cache-capacity, sbs-count, zipf-lambda or hmd-cache-capacity")->required();
  sweep->add_option("--values", values, "Comma-separated axis values")->required();
  sweep->add_option("--seeds", seeds, "Comma-separated scenario seeds")->required();
  sweep->add_option("--out", out_path, "Row output (CSV); summary goes to <stem>_summary.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) {
      const Scenario s = generate_scenario(generation_from_file(config_path), seed);
      open_out(out_path) << to_json(s).dump(2) << '\n';
      return 0;
    }

    if (*solve) {
      const Scenario s = scenario_from_json(read_json(scenario_path));
      SolverConfig cfg;
      cfg.tolerance = tolerance;
      cfg.max_iterations = max_iterations;
      cfg.restarts = restarts;
      cfg.seed = seed;
      if (grid_levels > 0) cfg.power = PowerOptions::grid(grid_levels);
      if (cfg.tolerance < 0.0) throw ConfigError("--tolerance must be non-negative");
      if (cfg.restarts == 0) throw ConfigError("--restarts must be positive");
      const SolveResult r = run_algorithm(s, parse_algorithm(algorithm), cfg);
      Json j = to_json(r);
      if (r.feasible) {
        j["feasibility"] = to_json(check_feasibility(s, r.best_decision));
        j["sum_of_delays_s"] = unweighted_delay_sum(s, r.best_decision);
        j["cache_hit_ratio"] = r.trace_hit_ratio ? *r.trace_hit_ratio : cache_hit_ratio(s, r.best_decision);
      }
      open_out(out_path) << j.dump(2) << '\n';
      if (!trace_path.empty()) {
        auto out = open_out(trace_path);
        write_trace_csv(out, r.bound_trace);
      }
      if (!r.feasible) {
        std::cerr << "infeasible: " << r.note << '\n';
        return kExitInfeasible;
      }
      std::cout << r.algorithm << " objective " << r.best_value << " s\n";
      return 0;
    }

    if (*sweep) {
      ExperimentConfig cfg = experiment_config_from_json(read_json(config_path));
      cfg.axis = parse_axis(axis);
      cfg.values = parse_list<double>(values, "--values");
      cfg.seeds = parse_list<std::uint64_t>(seeds, "--seeds");
      validate_experiment(cfg);
      const auto rows = run_experiment(cfg);
      {
        auto out = open_out(out_path);
        write_rows_csv(out, cfg, rows);
      }
      const std::filesystem::path p(out_path);
      const auto summary_path = p.parent_path() / (p.stem().string() + "_summary.csv");
      {
        auto out = open_out(summary_path.string());
        write_summary_csv(out, cfg, summarize(rows));
      }
      const bool any = std::any_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.feasible; });
      return any ? 0 : kExitInfeasible;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
