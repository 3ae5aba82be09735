// coords.hpp
//
// The binary decision lattice searched by JCPT. Every cache and offload
// variable is one coordinate; MV-cache and offload coordinates are stored
// complemented (x = 1 - c, x = 1 - T) so that raising any coordinate never
// raises latency, SV-cache coordinates are stored as-is.
//
// Coordinates are grouped per viewpoint i, each block laid out as
//   T^M (m, u) | T^C (m, u) | c^{M,M} (m) | c^{M,S} (m) | c^{V,M} (u) | c^{V,S} (u)

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vrmec/decision.hpp"

namespace vrmec {

struct Scenario;

enum class VarKind : std::uint8_t { OffloadMes, OffloadCloud, CacheMesMv, CacheMesSv, CacheHmdMv, CacheHmdSv };

struct VarRef {
  VarKind kind = VarKind::OffloadMes;
  std::size_t viewpoint = 0;
  std::size_t sbs = 0;  // offload and MES cache variables
  std::size_t hmd = 0;  // offload and HMD cache variables
};

inline bool is_complemented(VarKind k) {
  return k == VarKind::OffloadMes || k == VarKind::OffloadCloud || k == VarKind::CacheMesMv ||
         k == VarKind::CacheHmdMv;
}

class CoordinateSpace {
 public:
  CoordinateSpace(std::size_t viewpoints, std::size_t sbs, std::size_t hmd);
  explicit CoordinateSpace(const Scenario& s);

  std::size_t dims() const { return viewpoints_ * block_; }
  std::size_t viewpoints() const { return viewpoints_; }
  std::size_t sbs() const { return sbs_; }
  std::size_t hmds() const { return hmd_; }

  VarRef var(std::size_t k) const;
  std::size_t index(const VarRef& v) const;

 private:
  std::size_t viewpoints_, sbs_, hmd_, block_;
};

// Tri-state view of a variable in original (uncomplemented) terms.
enum class Pin : std::int8_t { Free = -1, Zero = 0, One = 1 };

// Pins for every cache/offload variable, same layout as Decision.
struct Pins {
  std::size_t viewpoint_count = 0, sbs_count = 0, hmd_count = 0;
  std::vector<Pin> mes_mv, mes_sv, hmd_mv, hmd_sv, to_mes, to_cloud;

  Pins() = default;
  Pins(std::size_t n, std::size_t m, std::size_t u);

  std::size_t mes_index(std::size_t i, std::size_t m) const { return i * sbs_count + m; }
  std::size_t hmd_index(std::size_t i, std::size_t u) const { return i * hmd_count + u; }
  std::size_t task_index(std::size_t i, std::size_t m, std::size_t u) const {
    return (i * sbs_count + m) * hmd_count + u;
  }

  Pin& at(const VarRef& v);
  Pin at(const VarRef& v) const;

  bool offloads_decided() const;
  bool all_decided() const;
  // True when every pinned variable agrees with d.
  bool admits(const Decision& d) const;
  // Pins every cache variable to the value in d.
  void pin_caches(const Decision& d);
};

class BranchError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Box {
  std::vector<std::uint8_t> lower;  // a
  std::vector<std::uint8_t> upper;  // b
  double lower_bound = 0.0;
  double upper_bound = std::numeric_limits<double>::infinity();
  std::optional<Decision> incumbent;
  std::uint64_t id = 0;

  bool decided(std::size_t k) const { return lower[k] == upper[k]; }
  std::size_t undecided_count() const;
  // Number of lattice points, saturating at 2^63.
  std::uint64_t lattice_size() const;
};

Box full_box(const CoordinateSpace& space);

Pins pins_of(const CoordinateSpace& space, const Box& box);
void apply_pins(const CoordinateSpace& space, const Pins& pins, Box& box);

// Substituted coordinate vector of the binary part of d.
std::vector<std::uint8_t> to_monotone(const CoordinateSpace& space, const Decision& d);
// Inverse of to_monotone; the power matrix is left at zero.
Decision from_monotone(const CoordinateSpace& space, std::span<const std::uint8_t> x);

// Splits on undecided coordinate k: first child has x_k = 0, second x_k = 1.
std::pair<Box, Box> branch(const Box& box, std::size_t k);

}  // namespace vrmec
