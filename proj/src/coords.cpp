#include "vrmec/coords.hpp"

#include <algorithm>

#include "vrmec/model.hpp"

namespace vrmec {

CoordinateSpace::CoordinateSpace(std::size_t viewpoints, std::size_t sbs, std::size_t hmd)
    : viewpoints_(viewpoints), sbs_(sbs), hmd_(hmd), block_(2 * sbs * hmd + 2 * sbs + 2 * hmd) {}

CoordinateSpace::CoordinateSpace(const Scenario& s)
    : CoordinateSpace(s.viewpoint_count(), s.sbs_count, s.hmd_count) {}

VarRef CoordinateSpace::var(std::size_t k) const {
  if (k >= dims()) throw std::out_of_range("coordinate index out of range");
  VarRef v;
  v.viewpoint = k / block_;
  std::size_t r = k % block_;
  const std::size_t mu = sbs_ * hmd_;
  if (r < mu) {
    v.kind = VarKind::OffloadMes;
    v.sbs = r / hmd_;
    v.hmd = r % hmd_;
    return v;
  }
  r -= mu;
  if (r < mu) {
    v.kind = VarKind::OffloadCloud;
    v.sbs = r / hmd_;
    v.hmd = r % hmd_;
    return v;
  }
  r -= mu;
  if (r < sbs_) {
    v.kind = VarKind::CacheMesMv;
    v.sbs = r;
    return v;
  }
  r -= sbs_;
  if (r < sbs_) {
    v.kind = VarKind::CacheMesSv;
    v.sbs = r;
    return v;
  }
  r -= sbs_;
  if (r < hmd_) {
    v.kind = VarKind::CacheHmdMv;
    v.hmd = r;
    return v;
  }
  r -= hmd_;
  v.kind = VarKind::CacheHmdSv;
  v.hmd = r;
  return v;
}

std::size_t CoordinateSpace::index(const VarRef& v) const {
  const std::size_t base = v.viewpoint * block_, mu = sbs_ * hmd_;
  switch (v.kind) {
    case VarKind::OffloadMes: return base + v.sbs * hmd_ + v.hmd;
    case VarKind::OffloadCloud: return base + mu + v.sbs * hmd_ + v.hmd;
    case VarKind::CacheMesMv: return base + 2 * mu + v.sbs;
    case VarKind::CacheMesSv: return base + 2 * mu + sbs_ + v.sbs;
    case VarKind::CacheHmdMv: return base + 2 * mu + 2 * sbs_ + v.hmd;
    case VarKind::CacheHmdSv: return base + 2 * mu + 2 * sbs_ + hmd_ + v.hmd;
  }
  return 0;
}

Pins::Pins(std::size_t n, std::size_t m, std::size_t u)
    : viewpoint_count(n),
      sbs_count(m),
      hmd_count(u),
      mes_mv(n * m, Pin::Free),
      mes_sv(n * m, Pin::Free),
      hmd_mv(n * u, Pin::Free),
      hmd_sv(n * u, Pin::Free),
      to_mes(n * m * u, Pin::Free),
      to_cloud(n * m * u, Pin::Free) {}

Pin& Pins::at(const VarRef& v) {
  switch (v.kind) {
    case VarKind::OffloadMes: return to_mes[task_index(v.viewpoint, v.sbs, v.hmd)];
    case VarKind::OffloadCloud: return to_cloud[task_index(v.viewpoint, v.sbs, v.hmd)];
    case VarKind::CacheMesMv: return mes_mv[mes_index(v.viewpoint, v.sbs)];
    case VarKind::CacheMesSv: return mes_sv[mes_index(v.viewpoint, v.sbs)];
    case VarKind::CacheHmdMv: return hmd_mv[hmd_index(v.viewpoint, v.hmd)];
    case VarKind::CacheHmdSv: return hmd_sv[hmd_index(v.viewpoint, v.hmd)];
  }
  throw std::logic_error("unknown variable kind");
}

Pin Pins::at(const VarRef& v) const { return const_cast<Pins*>(this)->at(v); }

bool Pins::offloads_decided() const {
  auto decided = [](Pin p) { return p != Pin::Free; };
  return std::all_of(to_mes.begin(), to_mes.end(), decided) &&
         std::all_of(to_cloud.begin(), to_cloud.end(), decided);
}

bool Pins::all_decided() const {
  auto decided = [](Pin p) { return p != Pin::Free; };
  return offloads_decided() && std::all_of(mes_mv.begin(), mes_mv.end(), decided) &&
         std::all_of(mes_sv.begin(), mes_sv.end(), decided) && std::all_of(hmd_mv.begin(), hmd_mv.end(), decided) &&
         std::all_of(hmd_sv.begin(), hmd_sv.end(), decided);
}

namespace {

bool agrees(const std::vector<Pin>& pins, const std::vector<std::uint8_t>& values) {
  for (std::size_t k = 0; k < pins.size(); ++k)
    if (pins[k] != Pin::Free && static_cast<int>(pins[k]) != static_cast<int>(values[k] != 0)) return false;
  return true;
}

void pin_all(std::vector<Pin>& pins, const std::vector<std::uint8_t>& values) {
  for (std::size_t k = 0; k < pins.size(); ++k) pins[k] = values[k] ? Pin::One : Pin::Zero;
}

}  // namespace

bool Pins::admits(const Decision& d) const {
  return agrees(mes_mv, d.cache_mes_mv) && agrees(mes_sv, d.cache_mes_sv) && agrees(hmd_mv, d.cache_hmd_mv) &&
         agrees(hmd_sv, d.cache_hmd_sv) && agrees(to_mes, d.offload_mes) && agrees(to_cloud, d.offload_cloud);
}

void Pins::pin_caches(const Decision& d) {
  pin_all(mes_mv, d.cache_mes_mv);
  pin_all(mes_sv, d.cache_mes_sv);
  pin_all(hmd_mv, d.cache_hmd_mv);
  pin_all(hmd_sv, d.cache_hmd_sv);
}

std::size_t Box::undecided_count() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < lower.size(); ++k) n += lower[k] != upper[k];
  return n;
}

std::uint64_t Box::lattice_size() const {
  const std::size_t n = undecided_count();
  return n >= 63 ? (std::uint64_t{1} << 63) : (std::uint64_t{1} << n);
}

Box full_box(const CoordinateSpace& space) {
  Box b;
  b.lower.assign(space.dims(), 0);
  b.upper.assign(space.dims(), 1);
  return b;
}

Pins pins_of(const CoordinateSpace& space, const Box& box) {
  Pins p(space.viewpoints(), space.sbs(), space.hmds());
  for (std::size_t k = 0; k < space.dims(); ++k) {
    if (!box.decided(k)) continue;
    const VarRef v = space.var(k);
    const int x = box.lower[k];
    p.at(v) = (is_complemented(v.kind) ? 1 - x : x) ? Pin::One : Pin::Zero;
  }
  return p;
}

void apply_pins(const CoordinateSpace& space, const Pins& pins, Box& box) {
  for (std::size_t k = 0; k < space.dims(); ++k) {
    const VarRef v = space.var(k);
    const Pin p = pins.at(v);
    if (p == Pin::Free) {
      box.lower[k] = 0;
      box.upper[k] = 1;
    } else {
      const int orig = p == Pin::One ? 1 : 0;
      const auto x = static_cast<std::uint8_t>(is_complemented(v.kind) ? 1 - orig : orig);
      box.lower[k] = x;
      box.upper[k] = x;
    }
  }
}

std::vector<std::uint8_t> to_monotone(const CoordinateSpace& space, const Decision& d) {
  if (d.viewpoint_count != space.viewpoints() || d.sbs_count != space.sbs() || d.hmd_count != space.hmds())
    throw DomainError("to_monotone: decision dimensions do not match");
  std::vector<std::uint8_t> x(space.dims());
  for (std::size_t k = 0; k < space.dims(); ++k) {
    const VarRef v = space.var(k);
    std::uint8_t value = 0;
    switch (v.kind) {
      case VarKind::OffloadMes: value = d.offload_mes[d.task_index(v.viewpoint, v.sbs, v.hmd)]; break;
      case VarKind::OffloadCloud: value = d.offload_cloud[d.task_index(v.viewpoint, v.sbs, v.hmd)]; break;
      case VarKind::CacheMesMv: value = d.cache_mes_mv[d.mes_index(v.viewpoint, v.sbs)]; break;
      case VarKind::CacheMesSv: value = d.cache_mes_sv[d.mes_index(v.viewpoint, v.sbs)]; break;
      case VarKind::CacheHmdMv: value = d.cache_hmd_mv[d.hmd_index(v.viewpoint, v.hmd)]; break;
      case VarKind::CacheHmdSv: value = d.cache_hmd_sv[d.hmd_index(v.viewpoint, v.hmd)]; break;
    }
    if (value > 1) throw DomainError("to_monotone: non-binary decision entry");
    x[k] = is_complemented(v.kind) ? static_cast<std::uint8_t>(1 - value) : value;
  }
  return x;
}

Decision from_monotone(const CoordinateSpace& space, std::span<const std::uint8_t> x) {
  if (x.size() != space.dims()) throw DomainError("from_monotone: wrong coordinate count");
  Decision d(space.viewpoints(), space.sbs(), space.hmds());
  for (std::size_t k = 0; k < space.dims(); ++k) {
    if (x[k] > 1) throw DomainError("from_monotone: non-binary coordinate");
    const VarRef v = space.var(k);
    const auto value = static_cast<std::uint8_t>(is_complemented(v.kind) ? 1 - x[k] : x[k]);
    switch (v.kind) {
      case VarKind::OffloadMes: d.offload_mes[d.task_index(v.viewpoint, v.sbs, v.hmd)] = value; break;
      case VarKind::OffloadCloud: d.offload_cloud[d.task_index(v.viewpoint, v.sbs, v.hmd)] = value; break;
      case VarKind::CacheMesMv: d.cache_mes_mv[d.mes_index(v.viewpoint, v.sbs)] = value; break;
      case VarKind::CacheMesSv: d.cache_mes_sv[d.mes_index(v.viewpoint, v.sbs)] = value; break;
      case VarKind::CacheHmdMv: d.cache_hmd_mv[d.hmd_index(v.viewpoint, v.hmd)] = value; break;
      case VarKind::CacheHmdSv: d.cache_hmd_sv[d.hmd_index(v.viewpoint, v.hmd)] = value; break;
    }
  }
  return d;
}

std::pair<Box, Box> branch(const Box& box, std::size_t k) {
  if (k >= box.lower.size()) throw BranchError("branch: dimension out of range");
  if (box.upper[k] - box.lower[k] != 1) throw BranchError("branch: dimension already decided");
  Box left, right;
  left.lower = box.lower;
  left.upper = box.upper;
  left.upper[k] = 0;  // [a, a'] with a'_k = 0
  right.lower = box.lower;
  right.upper = box.upper;
  right.lower[k] = 1;  // [b', b] with b'_k = 1
  left.lower_bound = right.lower_bound = box.lower_bound;
  return {std::move(left), std::move(right)};
}

}  // namespace vrmec
