#include <gtest/gtest.h>

#include <set>

#include "support.hpp"
#include "vrmec/coords.hpp"
#include "vrmec/latency.hpp"
#include "vrmec/radio.hpp"

using namespace vrmec;
using vrmec::testing::Gen;
using vrmec::testing::manual_scenario;

namespace {

constexpr double kExact = 1e-9;

// Scenario with one 1 Mb viewpoint and a uniform 1e8 bit/s rate on every link.
struct Fixture {
  Scenario s = manual_scenario(1, 1, 1);
  Decision d{s};
  std::vector<double> rates = std::vector<double>(1, 1e8);
  double latency() const { return request_latency_parts(s, d, rates, 0, 0).total(); }
};

std::vector<double> random_rates(Gen& g, const Scenario& s) {
  std::vector<double> r(s.sbs_count * s.hmd_count);
  for (double& x : r) x = g.uniform(1e6, 1e8);
  return r;
}

}  // namespace

TEST(RequestLatency, SvAtServingMes) {
  Fixture f;
  f.d.to_mes(0, 0, 0) = 1;
  f.d.mes_sv(0, 0) = 1;
  EXPECT_NEAR(f.latency(), 0.04, kExact);
}

TEST(RequestLatency, SvCachedLocally) {
  Fixture f;
  f.d.hmd_sv(0, 0) = 1;
  EXPECT_EQ(f.latency(), 0.0);
}

TEST(RequestLatency, CloudPath) {
  Fixture f;
  f.d.to_cloud(0, 0, 0) = 1;
  EXPECT_NEAR(f.latency(), 0.14, kExact);
}

TEST(RequestLatency, MvCachedLocallyOnly) {
  Fixture f;
  f.d.hmd_mv(0, 0) = 1;
  EXPECT_NEAR(f.latency(), 0.025, kExact);
}

TEST(RequestLatency, MvAtServingMes) {
  Fixture f;
  f.d.to_mes(0, 0, 0) = 1;
  f.d.mes_mv(0, 0) = 1;
  const auto parts = request_latency_parts(f.s, f.d, f.rates, 0, 0);
  EXPECT_NEAR(parts.mes, 0.045, kExact);
  EXPECT_EQ(parts.local, 0.0);
  EXPECT_EQ(parts.cloud, 0.0);
}

TEST(RequestLatency, DeadLinkIsUnreachable) {
  Fixture f;
  f.d.to_cloud(0, 0, 0) = 1;
  f.rates[0] = 0.0;
  EXPECT_TRUE(is_unreachable(f.latency()));
  EXPECT_TRUE(is_unreachable(objective(f.s, f.d, f.rates)));
  EXPECT_GT(kUnreachable, 1e300);
}

TEST(RequestLatency, UsesAllocatedPowerRates) {
  Scenario s = manual_scenario(1, 1, 1);
  Decision d(s);
  d.to_cloud(0, 0, 0) = 1;
  d.power(0, 0) = 1.0;
  const double rate = 1e6 * std::log2(1.0 + 1000.0);
  EXPECT_NEAR(request_latency(s, d, 0, 0), 4e6 / rate + 0.1, kExact);
  EXPECT_THROW(request_latency(s, d, 1, 0), std::out_of_range);
}

TEST(Objective, PopularityWeightedSum) {
  Scenario s = manual_scenario(2, 1, 2);
  s.viewpoints[0].popularity = 2.0 / 3.0;
  s.viewpoints[1].popularity = 1.0 / 3.0;
  Decision d(s);
  d.to_mes(0, 0, 0) = 1;
  d.mes_sv(0, 0) = 1;
  d.to_mes(1, 1, 0) = 1;
  d.mes_sv(1, 1) = 1;
  const std::vector<double> rates = {4e6 / 0.03, 4e6 / 0.06};
  EXPECT_NEAR(request_latency_parts(s, d, rates, 0, 0).total(), 0.03, kExact);
  EXPECT_NEAR(request_latency_parts(s, d, rates, 1, 0).total(), 0.06, kExact);
  EXPECT_NEAR(objective(s, d, rates), 0.04, kExact);
}

TEST(Objective, AllLocalSvIsZero) {
  Scenario s = manual_scenario(2, 3, 4);
  Decision d(s);
  for (auto& c : d.cache_hmd_sv) c = 1;
  EXPECT_EQ(objective(s, d), 0.0);
  EXPECT_EQ(unweighted_delay_sum(s, d), 0.0);
}

TEST(Objective, LinearInLatencies) {
  // Halving every rate and zeroing the backhaul doubles each latency.
  Gen g(21);
  for (int trial = 0; trial < 50; ++trial) {
    Scenario s = g.scenario(2, 3, 4);
    s.backhaul_delay_s = 0.0;
    s.mes_cpu_hz = 1e300;
    s.hmd_cpu_hz = 1e300;
    const Decision d = g.structured_decision(s);
    auto rates = random_rates(g, s);
    const double base = objective(s, d, rates);
    for (double& r : rates) r *= 0.5;
    EXPECT_NEAR(objective(s, d, rates), 2.0 * base, 1e-12 * base);
  }
}

TEST(Objective, StrictlyDecreasingInActiveLinkRate) {
  Gen g(22);
  for (int trial = 0; trial < 100; ++trial) {
    const Scenario s = g.scenario(1 + g.index(3), 1 + g.index(3), 1 + g.index(4));
    const Decision d = g.structured_decision(s);
    const auto load = link_load(s, d);
    auto rates = random_rates(g, s);
    const double base = objective(s, d, rates);
    for (std::size_t k = 0; k < load.size(); ++k) {
      if (load[k] <= 0.0) continue;
      auto faster = rates;
      faster[k] *= 1.01;
      EXPECT_LT(objective(s, d, faster), base);
    }
  }
}

TEST(Objective, NonIncreasingInSubstitutedCoordinates) {
  // Raising a substituted coordinate removes an offload or an MV copy or adds
  // an SV copy; each weakly lowers latency at fixed rates. The one exception
  // is removing the last offload of a request that has the MV cached locally,
  // which switches on local compute.
  Gen g(23);
  std::size_t checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Scenario s = g.scenario(1 + g.index(3), 1 + g.index(3), 1 + g.index(3));
    const CoordinateSpace space(s);
    const Decision d = g.any_decision(s, 0.4);
    const auto rates = random_rates(g, s);
    auto x = to_monotone(space, d);
    const double base = objective(s, from_monotone(space, x), rates);
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (x[k]) continue;
      const VarRef v = space.var(k);
      x[k] = 1;
      const Decision up = from_monotone(space, x);
      x[k] = 0;
      const bool offload = v.kind == VarKind::OffloadMes || v.kind == VarKind::OffloadCloud;
      if (offload && !up.offloaded(v.viewpoint, v.hmd) && up.hmd_mv(v.viewpoint, v.hmd)) continue;
      EXPECT_LE(objective(s, up, rates), base + 1e-12 * base);
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(RequestLatency, ComponentsNonNegativeAndSingleContribution) {
  Gen g(24);
  for (int trial = 0; trial < 100; ++trial) {
    const Scenario s = vrmec::testing::generous(g.scenario(1 + g.index(3), 1 + g.index(3), 1 + g.index(4)));
    const Decision d = g.structured_decision(s);
    ASSERT_TRUE(check_feasibility(s, d).feasible());
    const auto rates = random_rates(g, s);
    for (std::size_t i = 0; i < s.viewpoint_count(); ++i)
      for (std::size_t u = 0; u < s.hmd_count; ++u) {
        const auto p = request_latency_parts(s, d, rates, i, u);
        EXPECT_GE(p.mes, 0.0);
        EXPECT_GE(p.local, 0.0);
        EXPECT_GE(p.cloud, 0.0);
        EXPECT_LE((p.mes > 0.0) + (p.local > 0.0) + (p.cloud > 0.0), 1);
        EXPECT_EQ(p.total(), p.mes + p.local + p.cloud);
      }
  }
}

TEST(Energy, MesComputeTask) {
  Scenario s = manual_scenario(1, 1, 1);
  Decision d(s);
  d.to_mes(0, 0, 0) = 1;
  d.mes_mv(0, 0) = 1;
  const auto e = energy_usage(s, d);
  EXPECT_NEAR(e.mes[0], 5.0, kExact);
  EXPECT_EQ(e.hmd[0], 0.0);
}

TEST(Energy, LocalMvTask) {
  Scenario s = manual_scenario(1, 1, 2);
  Decision d(s);
  d.hmd_mv(0, 0) = 1;
  d.hmd_sv(1, 0) = 1;
  const auto e = energy_usage(s, d);
  EXPECT_NEAR(e.hmd[0], 0.1, kExact);
  EXPECT_EQ(e.mes[0], 0.0);
}

TEST(Energy, AllSvCachedUsesNothing) {
  Scenario s = manual_scenario(2, 2, 3);
  Decision d(s);
  for (auto& c : d.cache_hmd_sv) c = 1;
  for (auto& c : d.cache_mes_sv) c = 1;
  d.to_mes(1, 1, 0) = 1;
  const auto e = energy_usage(s, d);
  for (double v : e.mes) EXPECT_EQ(v, 0.0);
  for (double v : e.hmd) EXPECT_EQ(v, 0.0);
}

TEST(Energy, ChargedOnlyToServingMes) {
  Scenario s = manual_scenario(3, 1, 1);
  Decision d(s);
  for (std::size_t m = 0; m < 3; ++m) d.mes_mv(0, m) = 1;
  d.to_mes(0, 2, 0) = 1;
  const auto e = energy_usage(s, d);
  EXPECT_EQ(e.mes[0], 0.0);
  EXPECT_EQ(e.mes[1], 0.0);
  EXPECT_NEAR(e.mes[2], 5.0, kExact);
}

TEST(Feasibility, EmptyDecisionViolatesServiceForEveryRequest) {
  Scenario s = manual_scenario(2, 3, 4);
  const auto r = check_feasibility(s, Decision(s));
  EXPECT_FALSE(r.feasible());
  const auto& c = r.at(Constraint::ServiceCoverage);
  EXPECT_FALSE(c.holds);
  EXPECT_EQ(c.violation_count, 12u);
  for (Constraint other : kAllConstraints)
    if (other != Constraint::ServiceCoverage) {
      EXPECT_TRUE(r.at(other).holds) << constraint_name(other);
    }
}

TEST(Feasibility, CouplingViolationNamesTheTask) {
  Scenario s = manual_scenario(2, 2, 2);
  Decision d(s);
  for (auto& c : d.cache_hmd_sv) c = 1;
  d.to_mes(1, 0, 1) = 1;
  const auto r = check_feasibility(s, d);
  const auto& c = r.at(Constraint::MesCoupling);
  ASSERT_FALSE(c.holds);
  ASSERT_EQ(c.offending.size(), 1u);
  EXPECT_EQ(c.offending[0], (std::vector<std::size_t>{1, 0, 1}));
}

TEST(Feasibility, CacheExactlyAtCapacityHolds) {
  Scenario s = manual_scenario(1, 1, 3);
  Decision d(s);
  for (auto& c : d.cache_hmd_sv) c = 1;
  d.mes_mv(0, 0) = 1;
  d.mes_sv(1, 0) = 1;
  s.mes_cache_bits[0] = 1e6 + 4e6;
  EXPECT_TRUE(check_feasibility(s, d).at(Constraint::MesCache).holds);
  s.mes_cache_bits[0] = 5e6 - 1.0;
  EXPECT_FALSE(check_feasibility(s, d).at(Constraint::MesCache).holds);
}

TEST(Feasibility, ReportCoversEveryConstraintOnce) {
  Scenario s = manual_scenario(2, 2, 2);
  const auto r = check_feasibility(s, Decision(s));
  ASSERT_EQ(r.checks.size(), kAllConstraints.size());
  std::set<std::string> names;
  for (std::size_t k = 0; k < kAllConstraints.size(); ++k) {
    EXPECT_EQ(r.checks[k].id, kAllConstraints[k]);
    names.insert(constraint_name(kAllConstraints[k]));
  }
  EXPECT_EQ(names.size(), kAllConstraints.size());
  EXPECT_NE(r.to_table().find(constraint_name(Constraint::ServiceCoverage)), std::string::npos);
}

TEST(Feasibility, RejectsMismatchedShapes) {
  Scenario s = manual_scenario(2, 2, 2);
  EXPECT_THROW(check_feasibility(s, Decision(2, 1, 2)), DomainError);
}

TEST(Feasibility, StructuredDecisionsAreFeasible) {
  Gen g(25);
  for (int trial = 0; trial < 100; ++trial) {
    const Scenario s = vrmec::testing::generous(g.scenario(1 + g.index(4), 1 + g.index(4), 1 + g.index(5)));
    EXPECT_TRUE(check_feasibility(s, g.structured_decision(s)).feasible());
  }
}

TEST(Mutation, EverySingleConstraintViolationIsCaught) {
  Gen g(26);
  std::size_t injected = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t M = 2 + g.index(2), U = 2 + g.index(2), N = 2 + g.index(3);
    for (Constraint c : kAllConstraints) {
      auto base = vrmec::testing::mutation_base(M, U, N);
      ASSERT_TRUE(check_feasibility(base.scenario, base.decision).feasible());
      const std::size_t i = g.index(N), m = g.index(M), u = g.index(U);
      const std::size_t other = (m + 1 + g.index(M - 1)) % M;
      vrmec::testing::inject_violation(c, base.scenario, base.decision, i, m, other, u);
      const auto r = check_feasibility(base.scenario, base.decision);
      for (Constraint k : kAllConstraints)
        EXPECT_EQ(r.at(k).holds, k != c) << "injected " << constraint_name(c) << ", checked " << constraint_name(k);
      ++injected;
    }
  }
  EXPECT_EQ(injected, 40 * kAllConstraints.size());
}

TEST(HitRatio, AllLocalIsOne) {
  Scenario s = manual_scenario(2, 3, 4);
  Decision d(s);
  for (auto& c : d.cache_hmd_mv) c = 1;
  EXPECT_NEAR(cache_hit_ratio(s, d), 1.0, kExact);
}

TEST(HitRatio, AllCloudIsZero) {
  Scenario s = manual_scenario(2, 3, 4);
  Decision d(s);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t u = 0; u < 3; ++u) d.to_cloud(i, u % 2, u) = 1;
  EXPECT_EQ(cache_hit_ratio(s, d), 0.0);
}

TEST(HitRatio, PopularityWeighted) {
  Scenario s = manual_scenario(1, 1, 3);
  s.viewpoints[0].popularity = 0.5;
  s.viewpoints[1].popularity = 0.3;
  s.viewpoints[2].popularity = 0.2;
  Decision d(s);
  d.hmd_sv(0, 0) = 1;
  d.to_mes(1, 0, 0) = 1;
  d.mes_sv(1, 0) = 1;
  d.to_cloud(2, 0, 0) = 1;
  EXPECT_NEAR(cache_hit_ratio(s, d), 0.8, kExact);
}

TEST(HitRatio, WithinUnitInterval) {
  Gen g(27);
  for (int trial = 0; trial < 100; ++trial) {
    const Scenario s = g.scenario(1 + g.index(3), 1 + g.index(3), 1 + g.index(5));
    const double h = cache_hit_ratio(s, g.structured_decision(s));
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, 1.0 + 1e-12);
  }
}
