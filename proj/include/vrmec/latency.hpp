// latency.hpp
//
// Delay components, computation energy, the popularity-weighted latency
// objective, full constraint checking and the cache-hit-ratio metric.

#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vrmec/decision.hpp"
#include "vrmec/model.hpp"

namespace vrmec {

// A request whose serving link has zero rate never completes. The marker
// compares greater than every finite latency.
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();
inline bool is_unreachable(double latency) { return latency == kUnreachable; }

struct LatencyParts {
  double mes = 0.0;    // MES offload path
  double local = 0.0;  // HMD-local compute
  double cloud = 0.0;  // cloud retrieval
  double total() const { return mes + local + cloud; }
};

LatencyParts request_latency_parts(const Scenario& s, const Decision& d, std::span<const double> rates,
                                   std::size_t i, std::size_t u);
double request_latency(const Scenario& s, const Decision& d, std::size_t i, std::size_t u);

// sum_u sum_i q_i tau_iu, using the decision's own power matrix.
double objective(const Scenario& s, const Decision& d);
double objective(const Scenario& s, const Decision& d, std::span<const double> rates);

// sum_u sum_i tau_iu, without popularity weights.
double unweighted_delay_sum(const Scenario& s, const Decision& d);

struct EnergyUsage {
  std::vector<double> mes;  // J per MES
  std::vector<double> hmd;  // J per HMD
};

// Compute energy is charged to the MES that actually runs the task.
EnergyUsage energy_usage(const Scenario& s, const Decision& d);

enum class Constraint {
  ExclusivePath,       // T^M + T^C <= 1 per (i, m, u)
  SingleMesOffload,    // sum_m T^M <= 1 per (i, u)
  SingleCloudOffload,  // sum_m T^C <= 1 per (i, u)
  MesCache,            // MES cache capacity
  HmdCache,            // HMD cache capacity
  MesEnergy,           // MES energy budget
  HmdEnergy,           // HMD energy budget
  PowerEntries,        // power entries finite and non-negative
  PowerBudget,         // per-SBS power budget
  MesCoupling,         // MES offload needs the MV or SV cached there
  ServiceCoverage,     // every request is offloaded or cached locally
};

inline constexpr std::array<Constraint, 11> kAllConstraints = {
    Constraint::ExclusivePath, Constraint::SingleMesOffload, Constraint::SingleCloudOffload,
    Constraint::MesCache,      Constraint::HmdCache,         Constraint::MesEnergy,
    Constraint::HmdEnergy,     Constraint::PowerEntries,     Constraint::PowerBudget,
    Constraint::MesCoupling,   Constraint::ServiceCoverage};

std::string constraint_name(Constraint c);

struct ConstraintCheck {
  Constraint id = Constraint::ExclusivePath;
  bool holds = true;
  double worst_violation = 0.0;
  std::size_t violation_count = 0;
  std::vector<std::vector<std::size_t>> offending;  // first few index tuples
};

struct FeasibilityReport {
  std::vector<ConstraintCheck> checks;  // one per kAllConstraints entry, same order

  bool feasible() const;
  const ConstraintCheck& at(Constraint c) const;
  std::string to_table() const;
};

// Relative slack on capacity, energy and power budgets so that values
// produced by arithmetic on the same numbers are not rejected by rounding.
inline constexpr double kBudgetSlack = 1e-9;

FeasibilityReport check_feasibility(const Scenario& s, const Decision& d);

// True when (i, u) is served without the cloud: locally or by an MES.
bool is_hit(const Decision& d, std::size_t i, std::size_t u);

// sum_u sum_i q_i hit(i, u) / U.
double cache_hit_ratio(const Scenario& s, const Decision& d);

}  // namespace vrmec
