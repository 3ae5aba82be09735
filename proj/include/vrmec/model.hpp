// model.hpp
//
// Scenario world for VR viewpoint delivery over MEC-enabled small cells:
// SBS/HMD geometry, channel gains, the viewpoint catalog and every physical
// constant or budget the latency model needs.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vrmec {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Viewpoint {
  std::size_t id = 0;           // 1-based catalog rank
  double mv_size_bits = 0.0;    // d_i
  double cycles_per_bit = 0.0;  // w_i
  double popularity = 0.0;      // q_i
};

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Position& a, const Position& b);

// h = ref_gain * max(dist, ref_distance)^(-exponent)
struct PathLoss {
  double ref_gain = 1e-3;
  double ref_distance_m = 1.0;
  double exponent = 3.5;

  double gain(double distance_m) const;
};

struct GenerationConfig {
  std::size_t sbs_count = 8;
  std::size_t hmd_count = 12;
  std::size_t viewpoint_count = 20;
  double area_side_m = 100.0;
  double size_min_bits = 1e6;
  double size_max_bits = 3e6;
  double zipf_lambda = 0.8;
  double sv_ratio = 4.0;
  double cycles_per_bit = 50.0;
  double total_bandwidth_hz = 1e9;
  std::optional<double> bandwidth_per_hmd_hz;  // overrides total / U
  double noise_power_w = 1e-10;
  double orthogonality = 0.5;
  double total_power_dbm = 30.0;
  double mes_cpu_hz = 1e10;
  double hmd_cpu_hz = 2e9;
  double mes_energy_coeff = 1e-27;
  double hmd_energy_coeff = 1e-27;
  double mes_cache_bits = 24e6;
  double hmd_cache_bits = 8e6;
  double mes_energy_budget_j = 20.0;
  double hmd_energy_budget_j = 0.5;
  double backhaul_delay_s = 0.1;
  PathLoss path_loss;

  // 8 SBSs, 12 HMDs, 20 viewpoints of 1-3 Mb: small enough for JCPT to
  // make real branching progress.
  static GenerationConfig desk_preset();
  // 40 SBSs, 100 HMDs, 100 viewpoints of 10-30 Mb in a 100 m square.
  static GenerationConfig large_preset();
};

struct Scenario {
  std::size_t sbs_count = 0;  // M
  std::size_t hmd_count = 0;  // U
  std::vector<Viewpoint> viewpoints;
  double sv_ratio = 0.0;                // alpha
  std::vector<double> channel_gain;     // h_mu, row-major M x U
  double bandwidth_per_hmd_hz = 0.0;    // W
  double noise_power_w = 0.0;           // n0
  double orthogonality = 0.0;           // zeta
  double total_power_w = 0.0;           // P_T per SBS
  double mes_cpu_hz = 0.0;
  double hmd_cpu_hz = 0.0;
  double mes_energy_coeff = 0.0;
  double hmd_energy_coeff = 0.0;
  std::vector<double> mes_cache_bits;   // per SBS
  std::vector<double> hmd_cache_bits;   // per HMD
  std::vector<double> mes_energy_budget_j;
  std::vector<double> hmd_energy_budget_j;
  double backhaul_delay_s = 0.0;
  std::vector<Position> sbs_positions;
  std::vector<Position> hmd_positions;

  // Provenance; not used by the model itself.
  std::uint64_t seed = 0;
  GenerationConfig generation;

  std::size_t viewpoint_count() const { return viewpoints.size(); }
  double gain(std::size_t m, std::size_t u) const { return channel_gain[m * hmd_count + u]; }

  double mv_size(std::size_t i) const { return viewpoints[i].mv_size_bits; }
  double sv_size(std::size_t i) const { return sv_ratio * viewpoints[i].mv_size_bits; }
  double popularity(std::size_t i) const { return viewpoints[i].popularity; }

  double mes_compute_delay(std::size_t i) const;
  double hmd_compute_delay(std::size_t i) const;
  // Per-task projection energy k f^2 d w.
  double mes_task_energy(std::size_t i) const;
  double hmd_task_energy(std::size_t i) const;

  std::size_t nearest_sbs(std::size_t u) const;
};

// q_i = i^-lambda / sum_j j^-lambda for i = 1..n.
std::vector<double> zipf_popularity(std::size_t n, double lambda);

Scenario generate_scenario(const GenerationConfig& config, std::uint64_t seed);

struct Violation {
  std::string field;
  std::string message;
};

std::vector<Violation> validate_scenario(const Scenario& s);

}  // namespace vrmec
