// decision.hpp
//
// One candidate solution: four binary cache matrices, two binary offload
// tensors and the downlink power matrix. Index layout is dense row-major:
//   cache at MES     [i * M + m]
//   cache at HMD     [i * U + u]
//   offload tensors  [(i * M + m) * U + u]
//   power            [m * U + u]

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace vrmec {

struct Scenario;

struct PowerAllocation {
  std::size_t sbs_count = 0;
  std::size_t hmd_count = 0;
  std::vector<double> p;

  PowerAllocation() = default;
  PowerAllocation(std::size_t m, std::size_t u) : sbs_count(m), hmd_count(u), p(m * u, 0.0) {}

  double& operator()(std::size_t m, std::size_t u) { return p[m * hmd_count + u]; }
  double operator()(std::size_t m, std::size_t u) const { return p[m * hmd_count + u]; }
  double sbs_total(std::size_t m) const;

  bool operator==(const PowerAllocation&) const = default;
};

struct Decision {
  std::size_t viewpoint_count = 0;
  std::size_t sbs_count = 0;
  std::size_t hmd_count = 0;

  std::vector<std::uint8_t> cache_mes_mv;
  std::vector<std::uint8_t> cache_mes_sv;
  std::vector<std::uint8_t> cache_hmd_mv;
  std::vector<std::uint8_t> cache_hmd_sv;
  std::vector<std::uint8_t> offload_mes;
  std::vector<std::uint8_t> offload_cloud;
  PowerAllocation power;

  Decision() = default;
  Decision(std::size_t n, std::size_t m, std::size_t u);
  explicit Decision(const Scenario& s);

  std::size_t mes_index(std::size_t i, std::size_t m) const { return i * sbs_count + m; }
  std::size_t hmd_index(std::size_t i, std::size_t u) const { return i * hmd_count + u; }
  std::size_t task_index(std::size_t i, std::size_t m, std::size_t u) const {
    return (i * sbs_count + m) * hmd_count + u;
  }

  std::uint8_t& mes_mv(std::size_t i, std::size_t m) { return cache_mes_mv[mes_index(i, m)]; }
  std::uint8_t& mes_sv(std::size_t i, std::size_t m) { return cache_mes_sv[mes_index(i, m)]; }
  std::uint8_t& hmd_mv(std::size_t i, std::size_t u) { return cache_hmd_mv[hmd_index(i, u)]; }
  std::uint8_t& hmd_sv(std::size_t i, std::size_t u) { return cache_hmd_sv[hmd_index(i, u)]; }
  std::uint8_t& to_mes(std::size_t i, std::size_t m, std::size_t u) { return offload_mes[task_index(i, m, u)]; }
  std::uint8_t& to_cloud(std::size_t i, std::size_t m, std::size_t u) {
    return offload_cloud[task_index(i, m, u)];
  }
  bool mes_mv(std::size_t i, std::size_t m) const { return cache_mes_mv[mes_index(i, m)] != 0; }
  bool mes_sv(std::size_t i, std::size_t m) const { return cache_mes_sv[mes_index(i, m)] != 0; }
  bool hmd_mv(std::size_t i, std::size_t u) const { return cache_hmd_mv[hmd_index(i, u)] != 0; }
  bool hmd_sv(std::size_t i, std::size_t u) const { return cache_hmd_sv[hmd_index(i, u)] != 0; }
  bool to_mes(std::size_t i, std::size_t m, std::size_t u) const { return offload_mes[task_index(i, m, u)] != 0; }
  bool to_cloud(std::size_t i, std::size_t m, std::size_t u) const {
    return offload_cloud[task_index(i, m, u)] != 0;
  }

  // True when (i, u) is offloaded anywhere (MES or cloud).
  bool offloaded(std::size_t i, std::size_t u) const;

  void clear_offload(std::size_t i, std::size_t u);

  bool operator==(const Decision&) const = default;
};

// Lexicographic order over the binary tensors, then the power matrix.
bool lexicographically_less(const Decision& a, const Decision& b);

}  // namespace vrmec
