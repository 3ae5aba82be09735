#include "vrmec/latency.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "vrmec/radio.hpp"

namespace vrmec {

namespace {

void require_shape(const Scenario& s, const Decision& d) {
  if (d.viewpoint_count != s.viewpoint_count() || d.sbs_count != s.sbs_count || d.hmd_count != s.hmd_count ||
      d.power.sbs_count != s.sbs_count || d.power.hmd_count != s.hmd_count)
    throw DomainError("decision dimensions do not match scenario");
}

constexpr std::size_t kMaxOffending = 16;

class CheckBuilder {
 public:
  explicit CheckBuilder(Constraint id) { check_.id = id; }

  void violate(double magnitude, std::vector<std::size_t> where) {
    check_.holds = false;
    ++check_.violation_count;
    check_.worst_violation = std::max(check_.worst_violation, magnitude);
    if (check_.offending.size() < kMaxOffending) check_.offending.push_back(std::move(where));
  }

  ConstraintCheck take() { return std::move(check_); }

 private:
  ConstraintCheck check_;
};

bool within(double used, double budget) { return used <= budget + kBudgetSlack * std::max(1.0, std::abs(budget)); }

}  // namespace

LatencyParts request_latency_parts(const Scenario& s, const Decision& d, std::span<const double> rates,
                                   std::size_t i, std::size_t u) {
  LatencyParts parts;
  const std::size_t U = s.hmd_count;
  const double sv = s.sv_size(i);
  bool any_offload = false;
  for (std::size_t m = 0; m < s.sbs_count; ++m) {
    const bool mes = d.to_mes(i, m, u), cloud = d.to_cloud(i, m, u);
    if (!mes && !cloud) continue;
    any_offload = true;
    const double r = rates[m * U + u];
    const double transfer = r > 0.0 ? sv / r : kUnreachable;
    if (mes) parts.mes += (d.mes_mv(i, m) ? s.mes_compute_delay(i) : 0.0) + transfer;
    if (cloud) parts.cloud += transfer + s.backhaul_delay_s;
  }
  if (!any_offload && d.hmd_mv(i, u)) parts.local = s.hmd_compute_delay(i);
  return parts;
}

double request_latency(const Scenario& s, const Decision& d, std::size_t i, std::size_t u) {
  require_shape(s, d);
  if (i >= s.viewpoint_count() || u >= s.hmd_count) throw std::out_of_range("request_latency: index out of range");
  const auto rates = link_rates(s, d.power);
  return request_latency_parts(s, d, rates, i, u).total();
}

double objective(const Scenario& s, const Decision& d, std::span<const double> rates) {
  double total = 0.0;
  for (std::size_t u = 0; u < s.hmd_count; ++u)
    for (std::size_t i = 0; i < s.viewpoint_count(); ++i) {
      const double tau = request_latency_parts(s, d, rates, i, u).total();
      if (is_unreachable(tau)) return kUnreachable;
      total += s.popularity(i) * tau;
    }
  return total;
}

double objective(const Scenario& s, const Decision& d) {
  require_shape(s, d);
  const auto rates = link_rates(s, d.power);
  return objective(s, d, rates);
}

double unweighted_delay_sum(const Scenario& s, const Decision& d) {
  require_shape(s, d);
  const auto rates = link_rates(s, d.power);
  double total = 0.0;
  for (std::size_t u = 0; u < s.hmd_count; ++u)
    for (std::size_t i = 0; i < s.viewpoint_count(); ++i) {
      const double tau = request_latency_parts(s, d, rates, i, u).total();
      if (is_unreachable(tau)) return kUnreachable;
      total += tau;
    }
  return total;
}

EnergyUsage energy_usage(const Scenario& s, const Decision& d) {
  require_shape(s, d);
  EnergyUsage e{std::vector<double>(s.sbs_count, 0.0), std::vector<double>(s.hmd_count, 0.0)};
  for (std::size_t i = 0; i < s.viewpoint_count(); ++i) {
    const double q = s.popularity(i);
    for (std::size_t u = 0; u < s.hmd_count; ++u) {
      for (std::size_t m = 0; m < s.sbs_count; ++m)
        if (d.to_mes(i, m, u) && !d.mes_sv(i, m)) e.mes[m] += q * s.mes_task_energy(i);
      if (!d.offloaded(i, u) && !d.hmd_sv(i, u)) e.hmd[u] += q * s.hmd_task_energy(i);
    }
  }
  return e;
}

std::string constraint_name(Constraint c) {
  switch (c) {
    case Constraint::ExclusivePath: return "exclusive_path";
    case Constraint::SingleMesOffload: return "single_mes_offload";
    case Constraint::SingleCloudOffload: return "single_cloud_offload";
    case Constraint::MesCache: return "mes_cache";
    case Constraint::HmdCache: return "hmd_cache";
    case Constraint::MesEnergy: return "mes_energy";
    case Constraint::HmdEnergy: return "hmd_energy";
    case Constraint::PowerEntries: return "power_entries";
    case Constraint::PowerBudget: return "power_budget";
    case Constraint::MesCoupling: return "mes_coupling";
    case Constraint::ServiceCoverage: return "service_coverage";
  }
  return "unknown";
}

bool FeasibilityReport::feasible() const {
  return std::all_of(checks.begin(), checks.end(), [](const ConstraintCheck& c) { return c.holds; });
}

const ConstraintCheck& FeasibilityReport::at(Constraint c) const {
  for (const auto& check : checks)
    if (check.id == c) return check;
  throw std::out_of_range("FeasibilityReport: constraint not present");
}

std::string FeasibilityReport::to_table() const {
  std::ostringstream os;
  os << std::left << std::setw(12) << "constraint" << std::setw(8) << "holds" << std::setw(12) << "violations"
     << "worst\n";
  for (const auto& c : checks)
    os << std::left << std::setw(12) << constraint_name(c.id) << std::setw(8) << (c.holds ? "yes" : "NO")
       << std::setw(12) << c.violation_count << std::setprecision(6) << c.worst_violation << "\n";
  return os.str();
}

FeasibilityReport check_feasibility(const Scenario& s, const Decision& d) {
  require_shape(s, d);
  const std::size_t N = s.viewpoint_count(), M = s.sbs_count, U = s.hmd_count;
  CheckBuilder exclusive(Constraint::ExclusivePath), one_mes(Constraint::SingleMesOffload),
      one_cloud(Constraint::SingleCloudOffload), mes_cache(Constraint::MesCache), hmd_cache(Constraint::HmdCache),
      mes_energy(Constraint::MesEnergy), hmd_energy(Constraint::HmdEnergy), entries(Constraint::PowerEntries),
      budget(Constraint::PowerBudget), coupling(Constraint::MesCoupling), service(Constraint::ServiceCoverage);

  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t u = 0; u < U; ++u) {
      std::size_t n_mes = 0, n_cloud = 0;
      for (std::size_t m = 0; m < M; ++m) {
        const bool tm = d.to_mes(i, m, u), tc = d.to_cloud(i, m, u);
        n_mes += tm;
        n_cloud += tc;
        if (tm && tc) exclusive.violate(1.0, {i, m, u});
        // T(1 - c^MM)(1 - c^MS) < 1 for binaries means the product is zero.
        if (tm && !d.mes_mv(i, m) && !d.mes_sv(i, m)) coupling.violate(1.0, {i, m, u});
      }
      if (n_mes > 1) one_mes.violate(static_cast<double>(n_mes - 1), {i, u});
      if (n_cloud > 1) one_cloud.violate(static_cast<double>(n_cloud - 1), {i, u});
      if (n_mes + n_cloud == 0 && !d.hmd_mv(i, u) && !d.hmd_sv(i, u)) service.violate(1.0, {i, u});
    }

  for (std::size_t m = 0; m < M; ++m) {
    double used = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      used += (static_cast<double>(d.mes_mv(i, m)) + s.sv_ratio * d.mes_sv(i, m)) * s.mv_size(i);
    if (!within(used, s.mes_cache_bits[m])) mes_cache.violate(used - s.mes_cache_bits[m], {m});
  }
  for (std::size_t u = 0; u < U; ++u) {
    double used = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      used += (static_cast<double>(d.hmd_mv(i, u)) + s.sv_ratio * d.hmd_sv(i, u)) * s.mv_size(i);
    if (!within(used, s.hmd_cache_bits[u])) hmd_cache.violate(used - s.hmd_cache_bits[u], {u});
  }

  const auto energy = energy_usage(s, d);
  for (std::size_t m = 0; m < M; ++m)
    if (!within(energy.mes[m], s.mes_energy_budget_j[m])) mes_energy.violate(energy.mes[m] - s.mes_energy_budget_j[m], {m});
  for (std::size_t u = 0; u < U; ++u)
    if (!within(energy.hmd[u], s.hmd_energy_budget_j[u])) hmd_energy.violate(energy.hmd[u] - s.hmd_energy_budget_j[u], {u});

  for (std::size_t m = 0; m < M; ++m) {
    double total = 0.0;
    for (std::size_t u = 0; u < U; ++u) {
      const double p = d.power(m, u);
      if (!std::isfinite(p))
        entries.violate(kUnreachable, {m, u});
      else if (p < 0.0)
        entries.violate(-p, {m, u});
      total += p;
    }
    if (std::isfinite(total) && !within(total, s.total_power_w)) budget.violate(total - s.total_power_w, {m});
  }

  FeasibilityReport report;
  for (auto* b : {&exclusive, &one_mes, &one_cloud, &mes_cache, &hmd_cache, &mes_energy, &hmd_energy, &entries, &budget, &coupling, &service}) report.checks.push_back(b->take());
  return report;
}

bool is_hit(const Decision& d, std::size_t i, std::size_t u) {
  bool offloaded = false;
  for (std::size_t m = 0; m < d.sbs_count; ++m) {
    if (d.to_mes(i, m, u)) return true;
    offloaded = offloaded || d.to_cloud(i, m, u);
  }
  return !offloaded && (d.hmd_mv(i, u) || d.hmd_sv(i, u));
}

double cache_hit_ratio(const Scenario& s, const Decision& d) {
  require_shape(s, d);
  double total = 0.0;
  for (std::size_t u = 0; u < s.hmd_count; ++u)
    for (std::size_t i = 0; i < s.viewpoint_count(); ++i)
      if (is_hit(d, i, u)) total += s.popularity(i);
  return total / static_cast<double>(s.hmd_count);
}

}  // namespace vrmec
