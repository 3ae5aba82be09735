#include "vrmec/decision.hpp"

#include <algorithm>

#include "vrmec/model.hpp"

namespace vrmec {

double PowerAllocation::sbs_total(std::size_t m) const {
  double total = 0.0;
  for (std::size_t u = 0; u < hmd_count; ++u) total += (*this)(m, u);
  return total;
}

Decision::Decision(std::size_t n, std::size_t m, std::size_t u)
    : viewpoint_count(n),
      sbs_count(m),
      hmd_count(u),
      cache_mes_mv(n * m, 0),
      cache_mes_sv(n * m, 0),
      cache_hmd_mv(n * u, 0),
      cache_hmd_sv(n * u, 0),
      offload_mes(n * m * u, 0),
      offload_cloud(n * m * u, 0),
      power(m, u) {}

Decision::Decision(const Scenario& s) : Decision(s.viewpoint_count(), s.sbs_count, s.hmd_count) {}

bool Decision::offloaded(std::size_t i, std::size_t u) const {
  for (std::size_t m = 0; m < sbs_count; ++m)
    if (to_mes(i, m, u) || to_cloud(i, m, u)) return true;
  return false;
}

void Decision::clear_offload(std::size_t i, std::size_t u) {
  for (std::size_t m = 0; m < sbs_count; ++m) {
    to_mes(i, m, u) = 0;
    to_cloud(i, m, u) = 0;
  }
}

bool lexicographically_less(const Decision& a, const Decision& b) {
  const std::vector<std::uint8_t> Decision::*fields[] = {
      &Decision::cache_mes_mv, &Decision::cache_mes_sv, &Decision::cache_hmd_mv,
      &Decision::cache_hmd_sv, &Decision::offload_mes,  &Decision::offload_cloud};
  for (auto field : fields) {
    const auto& x = a.*field;
    const auto& y = b.*field;
    if (x != y) return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
  }
  return std::lexicographical_compare(a.power.p.begin(), a.power.p.end(), b.power.p.begin(),
                                      b.power.p.end());
}

}  // namespace vrmec
