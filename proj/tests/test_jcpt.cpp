#include <gtest/gtest.h>

#include <set>

#include "support.hpp"
#include "vrmec/coords.hpp"
#include "vrmec/jcpt.hpp"
#include "vrmec/latency.hpp"
#include "vrmec/oracle.hpp"

using namespace vrmec;
using vrmec::testing::Gen;
using vrmec::testing::manual_scenario;

namespace {

// Every lattice point of a box, in substituted coordinates.
std::vector<std::vector<std::uint8_t>> points_of(const Box& box) {
  std::vector<std::size_t> free;
  for (std::size_t k = 0; k < box.lower.size(); ++k)
    if (!box.decided(k)) free.push_back(k);
  std::vector<std::vector<std::uint8_t>> out;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << free.size()); ++code) {
    auto x = box.lower;
    for (std::size_t j = 0; j < free.size(); ++j) x[free[j]] = (code >> j) & 1;
    out.push_back(std::move(x));
  }
  return out;
}

bool contains(const Box& box, const std::vector<std::uint8_t>& x) {
  for (std::size_t k = 0; k < x.size(); ++k)
    if (x[k] < box.lower[k] || x[k] > box.upper[k]) return false;
  return true;
}

// A random sub-box of the full lattice with roughly `decided` coordinates fixed.
Box random_box(Gen& g, const CoordinateSpace& space, double decided) {
  Box b = full_box(space);
  for (std::size_t k = 0; k < space.dims(); ++k)
    if (g.coin(decided)) b.lower[k] = b.upper[k] = g.coin() ? 1 : 0;
  return b;
}

// Objective of a lattice point under a fixed power matrix, +inf if infeasible.
double pinned_value(const Scenario& s, const CoordinateSpace& space, const std::vector<std::uint8_t>& x,
                    const PowerAllocation& p) {
  Decision d = from_monotone(space, x);
  d.power = p;
  if (!check_feasibility(s, d).feasible()) return kUnreachable;
  return objective(s, d);
}

PowerAllocation uniform_power(const Scenario& s) {
  PowerAllocation p(s.sbs_count, s.hmd_count);
  for (double& v : p.p) v = s.total_power_w / static_cast<double>(s.hmd_count);
  return p;
}

void expect_sane_trace(const SolveResult& r) {
  ASSERT_FALSE(r.bound_trace.empty());
  for (std::size_t t = 1; t < r.bound_trace.size(); ++t) {
    EXPECT_LE(r.bound_trace[t].incumbent, r.bound_trace[t - 1].incumbent);
    EXPECT_GE(r.bound_trace[t].f_min, r.bound_trace[t - 1].f_min);
  }
  EXPECT_LE(r.global_lower_bound, r.best_value * (1.0 + 1e-12));
  EXPECT_LE(r.bound_trace.back().f_min, r.bound_trace.back().incumbent * (1.0 + 1e-12));
}

}  // namespace

TEST(Coordinates, IndexAndVariableAreInverse) {
  const CoordinateSpace space(3, 2, 4);
  EXPECT_EQ(space.dims(), 3u * (2 * 2 * 4 + 2 * 2 + 2 * 4));
  std::set<std::tuple<int, std::size_t, std::size_t, std::size_t>> seen;
  for (std::size_t k = 0; k < space.dims(); ++k) {
    const VarRef v = space.var(k);
    EXPECT_EQ(space.index(v), k);
    seen.insert({static_cast<int>(v.kind), v.viewpoint, v.sbs, v.hmd});
  }
  EXPECT_EQ(seen.size(), space.dims());
}

TEST(Coordinates, MonotoneRoundTrip) {
  Gen g(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const Scenario s = manual_scenario(1 + g.index(3), 1 + g.index(3), 1 + g.index(3));
    const CoordinateSpace space(s);
    Decision d = g.any_decision(s);
    d.power = PowerAllocation(s.sbs_count, s.hmd_count);
    ASSERT_EQ(from_monotone(space, to_monotone(space, d)), d);
  }
}

TEST(Coordinates, ComplementsMvAndOffloadOnly) {
  const Scenario s = manual_scenario(1, 1, 1);
  const CoordinateSpace space(s);
  const auto x = to_monotone(space, Decision(s));
  for (std::size_t k = 0; k < space.dims(); ++k)
    EXPECT_EQ(x[k], is_complemented(space.var(k).kind) ? 1 : 0) << "k=" << k;
}

TEST(Branch, SplitsOnTheRequestedDimension) {
  Box box;
  box.lower = {0, 0, 0};
  box.upper = {1, 1, 1};
  const auto [left, right] = branch(box, 1);
  EXPECT_EQ(left.lower, (std::vector<std::uint8_t>{0, 0, 0}));
  EXPECT_EQ(left.upper, (std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_EQ(right.lower, (std::vector<std::uint8_t>{0, 1, 0}));
  EXPECT_EQ(right.upper, (std::vector<std::uint8_t>{1, 1, 1}));
}

TEST(Branch, RejectsDecidedOrMissingDimension) {
  Box box;
  box.lower = {0, 1};
  box.upper = {1, 1};
  EXPECT_THROW(branch(box, 1), BranchError);
  EXPECT_THROW(branch(box, 2), BranchError);
}

TEST(Branch, ChildrenPartitionTheParent) {
  Gen g(32);
  for (int trial = 0; trial < 200; ++trial) {
    const CoordinateSpace space(1, 1 + g.index(2), 1 + g.index(2));
    const Box box = random_box(g, space, 0.4);
    if (box.undecided_count() == 0) continue;
    std::size_t k;
    do k = g.index(space.dims());
    while (box.decided(k));
    const auto [left, right] = branch(box, k);
    EXPECT_EQ(left.lattice_size() + right.lattice_size(), box.lattice_size());
    for (const auto& x : points_of(box)) EXPECT_NE(contains(left, x), contains(right, x));
  }
}

TEST(ChooseDimension, PicksHeaviestViewpointFirst) {
  Scenario s = manual_scenario(1, 1, 3);
  s.viewpoints[2].mv_size_bits = 3e6;
  const SolverConfig cfg;
  const BoundContext ctx(s, cfg);
  Box box = full_box(ctx.space());
  const std::size_t block = ctx.space().dims() / 3;
  EXPECT_EQ(choose_dimension(ctx, box), 2 * block);
  box.lower[2 * block] = box.upper[2 * block] = 1;
  EXPECT_EQ(choose_dimension(ctx, box), 2 * block + 1);
  for (std::size_t k = 2 * block; k < 3 * block; ++k) box.lower[k] = box.upper[k] = 0;
  EXPECT_EQ(choose_dimension(ctx, box), 0u);  // tie between 0 and 1 goes to the lower index
}

TEST(Reduce, SvLargerThanCacheIsFixedOff) {
  Scenario s = manual_scenario(1, 1, 1);
  s.mes_cache_bits[0] = 3e6;  // the SV is 4 Mb, the MV 1 Mb
  s.hmd_cache_bits[0] = 3e6;
  const SolverConfig cfg;
  const BoundContext ctx(s, cfg);
  const auto reduced = reduce(ctx, full_box(ctx.space()), kUnreachable);
  ASSERT_TRUE(reduced);
  for (VarKind kind : {VarKind::CacheMesSv, VarKind::CacheHmdSv}) {
    const std::size_t k = ctx.space().index({kind, 0, 0, 0});
    EXPECT_TRUE(reduced->decided(k));
    EXPECT_EQ(reduced->upper[k], 0);
  }
  const std::size_t mv = ctx.space().index({VarKind::CacheMesMv, 0, 0, 0});
  EXPECT_FALSE(reduced->decided(mv));
}

TEST(Reduce, ZeroThresholdLeavesNothing) {
  const Scenario s = manual_scenario(2, 2, 2);
  const SolverConfig cfg;
  const BoundContext ctx(s, cfg);
  EXPECT_FALSE(reduce(ctx, full_box(ctx.space()), 0.0));
}

TEST(Reduce, DecidedFeasibleBoxIsUnchanged) {
  Gen g(33);
  const Scenario s = vrmec::testing::generous(g.scenario(2, 2, 3));
  const SolverConfig cfg;
  const BoundContext ctx(s, cfg);
  Box box;
  box.lower = box.upper = to_monotone(ctx.space(), g.structured_decision(s));
  const auto reduced = reduce(ctx, box, kUnreachable);
  ASSERT_TRUE(reduced);
  EXPECT_EQ(reduced->lower, box.lower);
  EXPECT_EQ(reduced->upper, box.upper);
}

TEST(Reduce, NeverDiscardsAPointBelowTheThreshold) {
  Gen g(34);
  std::size_t kept = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t M = 1 + g.index(2), U = M == 1 ? 1 + g.index(2) : 1;
    const Scenario s = g.scenario(M, U, 1);
    SolverConfig cfg;
    cfg.pinned_power = uniform_power(s);
    const BoundContext ctx(s, cfg);
    const Box box = random_box(g, ctx.space(), 0.2);
    const auto points = points_of(box);
    std::vector<double> values;
    for (const auto& x : points) values.push_back(pinned_value(s, ctx.space(), x, *cfg.pinned_power));
    const double best = *std::min_element(values.begin(), values.end());
    const double threshold = std::isfinite(best) ? best * g.uniform(1.0, 3.0) : g.uniform(0.0, 1.0);
    const auto reduced = reduce(ctx, box, threshold);
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (!(values[j] < threshold)) continue;
      ASSERT_TRUE(reduced) << "trial " << trial;
      EXPECT_TRUE(contains(*reduced, points[j])) << "trial " << trial;
      ++kept;
    }
  }
  EXPECT_GT(kept, 50u);
}

TEST(Bound, DecidedBoxHasEqualBounds) {
  Gen g(35);
  for (int trial = 0; trial < 20; ++trial) {
    const Scenario s = vrmec::testing::generous(g.scenario(2, 2, 2));
    const SolverConfig cfg;
    const BoundContext ctx(s, cfg);
    Box box;
    box.lower = box.upper = to_monotone(ctx.space(), g.structured_decision(s));
    const BoundResult b = bound(ctx, box);
    ASSERT_TRUE(std::isfinite(b.upper));
    EXPECT_NEAR(b.lower, b.upper, 1e-9 * b.upper);
  }
}

TEST(Bound, InfeasibleSingletonHasInfiniteUpper) {
  const Scenario s = manual_scenario(1, 2, 2);
  const SolverConfig cfg;
  const BoundContext ctx(s, cfg);
  Box box;
  box.lower = box.upper = to_monotone(ctx.space(), Decision(s));  // serves nothing
  const BoundResult b = bound(ctx, box);
  EXPECT_TRUE(std::isinf(b.upper));
  EXPECT_FALSE(b.incumbent);
}

TEST(Bound, LowerNeverExceedsUpperOrTheBoxOptimum) {
  Gen g(36);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t M = 1 + g.index(2), U = M == 1 ? 1 + g.index(2) : 1;
    const Scenario s = g.scenario(M, U, 1);
    SolverConfig cfg;
    cfg.pinned_power = uniform_power(s);
    cfg.seed = g.seed();
    const BoundContext ctx(s, cfg);
    const Box box = random_box(g, ctx.space(), 0.2);
    const BoundResult b = bound(ctx, box);
    EXPECT_LE(b.lower, b.upper);
    double best = kUnreachable;
    for (const auto& x : points_of(box)) best = std::min(best, pinned_value(s, ctx.space(), x, *cfg.pinned_power));
    EXPECT_LE(b.lower, best * (1.0 + 1e-12));
    EXPECT_GE(b.upper, best * (1.0 - 1e-12));
    if (b.incumbent) {
      EXPECT_TRUE(check_feasibility(s, *b.incumbent).feasible());
      EXPECT_NEAR(objective(s, *b.incumbent), b.upper, 1e-12 * b.upper);
    }
  }
}

TEST(Bound, ParallelMatchesSerial) {
  Gen g(37);
  for (int trial = 0; trial < 10; ++trial) {
    const Scenario s = g.scenario(2, 3, 3);
    SolverConfig cfg;
    cfg.seed = g.seed();
    const BoundContext ctx(s, cfg);
    const Box box = random_box(g, ctx.space(), 0.1);
    const BoundResult a = bound(ctx, box), b = bound_serial(ctx, box);
    EXPECT_EQ(a.lower, b.lower);
    EXPECT_EQ(a.upper, b.upper);
    EXPECT_EQ(a.incumbent.has_value(), b.incumbent.has_value());
    if (a.incumbent && b.incumbent) {
      EXPECT_EQ(*a.incumbent, *b.incumbent);
    }
  }
}

TEST(Jcpt, ZeroWhenEverySvFitsLocally) {
  const Scenario s = manual_scenario(2, 3, 4);
  const SolveResult r = jcpt_solve(s);
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.best_value, 0.0);
  expect_sane_trace(r);
}

TEST(Jcpt, SameSeedSameResult) {
  const Scenario s = generate_scenario(vrmec::testing::tiny_config(3, 4, 5), 8);
  SolverConfig cfg;
  cfg.max_iterations = 200;
  const SolveResult a = jcpt_solve(s, cfg), b = jcpt_solve(s, cfg);
  EXPECT_EQ(a.best_value, b.best_value);
  EXPECT_EQ(a.best_decision, b.best_decision);
  EXPECT_EQ(a.iterations, b.iterations);
  cfg.parallel = false;
  const SolveResult c = jcpt_solve(s, cfg);
  EXPECT_EQ(a.best_value, c.best_value);
  EXPECT_EQ(a.best_decision, c.best_decision);
}

TEST(Jcpt, ResultIsFeasibleAndConsistent) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Scenario s = generate_scenario(vrmec::testing::tiny_config(3, 4, 5), seed);
    SolverConfig cfg;
    cfg.max_iterations = 200;
    const SolveResult r = jcpt_solve(s, cfg);
    ASSERT_TRUE(r.feasible);
    EXPECT_TRUE(check_feasibility(s, r.best_decision).feasible()) << check_feasibility(s, r.best_decision).to_table();
    EXPECT_NEAR(objective(s, r.best_decision), r.best_value, 1e-12 * r.best_value);
    expect_sane_trace(r);
  }
}

TEST(Jcpt, WithinTwoPercentOfOracle) {
  OracleOptions oracle;
  oracle.cap = std::uint64_t{1} << 28;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Scenario s = generate_scenario(vrmec::testing::tiny_config(2, 2, 2), seed);
    const OracleResult o = brute_force_solve(s, oracle);
    const SolveResult r = jcpt_solve(s);
    ASSERT_EQ(r.feasible, o.feasible());
    if (o.feasible()) {
      EXPECT_LE(r.best_value, o.optimal_value * 1.02) << "seed " << seed;
    }
  }
}

TEST(Jcpt, ExactWithGridPowerAndZeroTolerance) {
  OracleOptions oracle;
  oracle.cap = std::uint64_t{1} << 28;
  SolverConfig cfg;
  cfg.tolerance = 0.0;
  cfg.max_iterations = 10'000'000;
  cfg.power = PowerOptions::grid(oracle.power_levels);
  for (std::uint64_t seed = 11; seed <= 13; ++seed) {
    const Scenario s = generate_scenario(vrmec::testing::tiny_config(2, 2, 2), seed);
    const OracleResult o = brute_force_solve(s, oracle);
    const SolveResult r = jcpt_solve(s, cfg);
    ASSERT_TRUE(o.feasible());
    EXPECT_NEAR(r.best_value, o.optimal_value, 1e-9 * o.optimal_value) << "seed " << seed;
    expect_sane_trace(r);
  }
}

TEST(Jcpt, PinnedCachesAreRespected) {
  const Scenario s = generate_scenario(vrmec::testing::tiny_config(2, 3, 4), 4);
  SolverConfig cfg;
  cfg.max_iterations = 100;
  const SolveResult free = jcpt_solve(s, cfg);
  ASSERT_TRUE(free.feasible);
  Decision caches(s);
  caches.cache_mes_sv = free.best_decision.cache_mes_sv;
  caches.cache_hmd_sv = free.best_decision.cache_hmd_sv;
  cfg.pinned_caches = caches;
  const SolveResult pinned = jcpt_solve(s, cfg);
  ASSERT_TRUE(pinned.feasible);
  EXPECT_EQ(pinned.best_decision.cache_mes_sv, caches.cache_mes_sv);
  EXPECT_EQ(pinned.best_decision.cache_hmd_sv, caches.cache_hmd_sv);
  EXPECT_EQ(pinned.best_decision.cache_mes_mv, caches.cache_mes_mv);
  EXPECT_EQ(pinned.best_decision.cache_hmd_mv, caches.cache_hmd_mv);
}
