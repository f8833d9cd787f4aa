#include <gtest/gtest.h>

#include <cmath>

#include "eikfac/heap.hpp"
#include "eikfac/oracles.hpp"
#include "eikfac/solver.hpp"

using namespace eikfac;

namespace {

struct Case {
  ObstacleWorld world;
  SpeedField speed;
  SourceSet sources;
};

Case make(Vec2 hi, double h, std::vector<RectObstacle> obs, std::vector<Vec2> src,
           BaseSpeed base = ConstantSpeed{}) {
  ObstacleWorld w(Grid2D::from_bounds({0, 0}, hi, h), obs);
  SpeedField s = SpeedField::with_obstacles(base, obs);
  SourceSet ss(w, std::move(src));
  return {std::move(w), std::move(s), std::move(ss)};
}

const RectObstacle kSimple{{0.0, 0.2}, {0.2, 1.0}};

}  // namespace

TEST(Heap, PopsInKeyThenIdOrder) {
  IndexedMinHeap h(6);
  h.push_or_decrease(3, 2.0);
  h.push_or_decrease(1, 2.0);
  h.push_or_decrease(5, 1.0);
  h.push_or_decrease(0, 4.0);
  h.push_or_decrease(0, 0.5);
  h.push_or_decrease(5, 3.0);  // larger key ignored
  EXPECT_EQ(h.size(), 4u);
  EXPECT_TRUE(h.contains(5));
  EXPECT_EQ(h.pop().first, 0u);
  EXPECT_EQ(h.pop().first, 5u);
  EXPECT_EQ(h.pop().first, 1u);
  EXPECT_EQ(h.pop().first, 3u);
  EXPECT_TRUE(h.empty());
}

TEST(Solver, ThreeByThreeOriginal) {
  const Case s = make({2, 2}, 1.0, {}, {{1, 1}});
  const SolveResult r = fmm_solve(s.world, s.speed, s.sources, {});
  const Grid2D& g = s.world.grid();
  EXPECT_EQ(r.u[g.linear(1, 1)], 0.0);
  EXPECT_DOUBLE_EQ(r.u[g.linear(0, 1)], 1.0);
  EXPECT_DOUBLE_EQ(r.u[g.linear(1, 2)], 1.0);
  EXPECT_NEAR(r.u[g.linear(0, 0)], 1.0 + 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r.u[g.linear(2, 2)], 1.0 + 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Solver, ThreeByThreeJustInTimeIsExact) {
  const Case s = make({2, 2}, 1.0, {}, {{1, 1}});
  SolverConfig cfg;
  cfg.method = JustInTime{3.0, 3.0};
  const SolveResult r = fmm_solve(s.world, s.speed, s.sources, cfg);
  const Grid2D& g = s.world.grid();
  EXPECT_NEAR(r.u[g.linear(0, 0)], std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r.u[g.linear(2, 0)], std::sqrt(2.0), 1e-15);
}

TEST(Solver, ObstacleInteriorStaysInfinite) {
  const Case s = make({1, 1}, 0.05, {kSimple}, {{0, 0}});
  const SolveResult r = fmm_solve(s.world, s.speed, s.sources, {});
  const Grid2D& g = s.world.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (s.world.excluded(k)) {
      EXPECT_TRUE(std::isinf(r.u[k]));
    } else {
      EXPECT_TRUE(std::isfinite(r.u[k]));
    }
  }
  EXPECT_EQ(r.unreachable, 0u);
}

TEST(Solver, OriginalOverestimatesDistance) {
  const Case s = make({1, 1}, 0.02, {}, {{0.3, 0.4}});
  const SolveResult r = fmm_solve(s.world, s.speed, s.sources, {});
  const Grid2D& g = s.world.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_GE(r.u[k], distance(g.coord(k), {0.3, 0.4}) - 1e-14);
  }
}

TEST(Solver, AcceptanceOrderIsMonotoneAndComplete) {
  const Case s = make({1, 1}, 0.01, {kSimple}, {{0, 0}});
  SolverConfig cfg;
  cfg.method = JustInTime{};
  const SolveResult r = fmm_solve(s.world, s.speed, s.sources, cfg);
  std::size_t free_nodes = 0;
  for (std::size_t k = 0; k < s.world.grid().size(); ++k) free_nodes += !s.world.excluded(k);
  EXPECT_EQ(r.accepted_order.size(), free_nodes);
  for (std::size_t n = 1; n < r.accepted_order.size(); ++n) {
    ASSERT_LE(r.u[r.accepted_order[n - 1]], r.u[r.accepted_order[n]]);
  }
  EXPECT_LE(r.stats.updates, 4 * s.world.grid().size());
}

TEST(Solver, JustInTimeWithoutObstaclesEqualsGlobalConeInsideBall) {
  const Case s = make({1, 1}, 0.02, {}, {{0, 0}});
  SolverConfig jit;
  jit.method = JustInTime{0.18, 2.0};
  SolverConfig glob;
  glob.method = GlobalStatic{Cone{{0, 0}, 1.0}};
  const SolveResult a = fmm_solve(s.world, s.speed, s.sources, jit);
  const SolveResult b = fmm_solve(s.world, s.speed, s.sources, glob);
  for (std::size_t k = 0; k < a.u.size(); ++k) EXPECT_EQ(a.u[k], b.u[k]);
}

TEST(Solver, Deterministic) {
  const Case s = make({1, 1}, 0.01, {kSimple}, {{0, 0}});
  SolverConfig cfg;
  cfg.method = JustInTime{};
  const SolveResult a = fmm_solve(s.world, s.speed, s.sources, cfg);
  const SolveResult b = fmm_solve(s.world, s.speed, s.sources, cfg);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.accepted_order, b.accepted_order);
}

TEST(ChooseFactor, Examples) {
  FanEntry src;
  src.center = {0, 0};
  src.factor = Cone{{0, 0}, 1.0};
  src.radius = 0.1;
  src.origin = FanOrigin::Source;
  FanEntry far;
  far.center = {0.13, 0};
  far.factor = Cone{{0.13, 0}, 2.0};
  far.radius = 0.1;
  const std::vector<FanEntry> one = {src};
  EXPECT_TRUE(std::holds_alternative<Cone>(choose_factor({0.05, 0}, one)));
  EXPECT_TRUE(std::holds_alternative<ZeroFactor>(choose_factor({0.5, 0.5}, one)));
  const std::vector<FanEntry> two = {src, far};
  EXPECT_EQ(choose_fan({0.05, 0}, two), 0);
  EXPECT_EQ(choose_fan({0.08, 0}, two), 1);
}

TEST(ChooseFactor, FanBlockedByObstacle) {
  FanEntry f;
  f.center = {0.4, 0.3};
  f.factor = Cone{f.center, 1.0};
  f.radius = 0.18;
  const std::vector<FanEntry> fans = {f};
  const std::vector<RectObstacle> obs = {{{0.1, 0.2}, {0.4, 0.3}}};
  EXPECT_EQ(choose_fan({0.32, 0.17}, fans, false, obs), kNoFan);
  EXPECT_EQ(choose_fan({0.32, 0.17}, fans), 0);
  EXPECT_EQ(choose_fan({0.5, 0.35}, fans, false, obs), 0);
}

TEST(CharacteristicDirection, Examples) {
  const ObstacleWorld w(Grid2D::from_bounds({0, 0}, {1, 1}, 0.1), {});
  const Grid2D& g = w.grid();
  std::vector<double> u(g.size(), kInf);
  std::vector<NodeStatus> st(g.size(), NodeStatus::Far);
  auto set = [&](int i, int j, double v) {
    u[g.linear(i, j)] = v;
    st[g.linear(i, j)] = NodeStatus::Accepted;
  };
  set(1, 2, std::hypot(0.1, 0.2));
  set(2, 1, std::hypot(0.2, 0.1));
  set(2, 2, std::hypot(0.2, 0.2));
  const Vec2 a = approximate_characteristic_direction(w, g.linear(2, 2), u, st);
  EXPECT_NEAR(a.x, -std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(a.y, -std::sqrt(0.5), 1e-12);

  std::fill(u.begin(), u.end(), kInf);
  std::fill(st.begin(), st.end(), NodeStatus::Far);
  set(4, 5, 0.4);
  set(5, 5, 0.5);
  const Vec2 b = approximate_characteristic_direction(w, g.linear(5, 5), u, st);
  EXPECT_DOUBLE_EQ(b.x, -1.0);
  EXPECT_DOUBLE_EQ(b.y, 0.0);

  set(5, 4, 0.45);
  st[g.linear(4, 5)] = NodeStatus::Far;
  const Vec2 c = approximate_characteristic_direction(w, g.linear(5, 5), u, st);
  EXPECT_DOUBLE_EQ(c.x, 0.0);
  EXPECT_DOUBLE_EQ(c.y, -1.0);
}

TEST(RarefyingCorner, Examples) {
  CornerSetup c;
  c.position = {0.2, 0.2};
  c.sector = {kPi / 2, kPi};
  EXPECT_TRUE(detect_rarefying_corner(c, normalized(Vec2{-1, -1})).rarefying);
  EXPECT_FALSE(detect_rarefying_corner(c, normalized(Vec2{1, -1})).rarefying);
  EXPECT_FALSE(detect_rarefying_corner(c, {0, -1}).rarefying);
}

TEST(RarefyingCorner, DomainEdgeIsRegular) {
  CornerSetup c;
  c.position = {0.0, 0.2};
  c.sector = {3 * kPi / 2, 2 * kPi};
  c.edges.left = true;
  // -a points along the left edge, outside the obstacle sector.
  EXPECT_FALSE(detect_rarefying_corner(c, {0, -1}).rarefying);
}

TEST(RarefyingCorner, PermeableUsesSnell) {
  CornerSetup c;
  c.position = {0.2, 0.2};
  c.sector = {kPi / 2, kPi};
  c.permeable = true;
  c.upsilon = std::sqrt(5.0) / 2;
  const CornerDecision d = detect_rarefying_corner(c, normalized(Vec2{-1, -1}));
  ASSERT_TRUE(d.rarefying);
  ASSERT_TRUE(d.snell.has_value());
  EXPECT_NEAR(d.snell->delta, kPi / 12, 1e-12);
  EXPECT_TRUE(std::holds_alternative<ConeTwoPlanes>(d.factor));
}

TEST(SimpleObstacle, SingleCornerFan) {
  const Case s = make({1, 1}, 1.0 / 400, {kSimple}, {{0, 0}});
  SolverConfig cfg;
  cfg.method = JustInTime{};
  const SolveResult r = fmm_solve(s.world, s.speed, s.sources, cfg);
  int corners = 0;
  for (const auto& f : r.fans) {
    if (f.origin != FanOrigin::Corner) continue;
    ++corners;
    EXPECT_NEAR(f.center.x, 0.2, 1e-12);
    EXPECT_NEAR(f.center.y, 0.2, 1e-12);
  }
  EXPECT_EQ(corners, 1);
}

TEST(InitializeSources, Modes) {
  const Case s = make({1, 1}, 0.025, {}, {{0, 0}}, ConstantSpeed{2.0});
  const auto none = initialize_sources(s.world, s.speed, s.sources, {});
  ASSERT_EQ(none.size(), 1u);
  EXPECT_EQ(none[0].u, 0.0);

  const auto cone = initialize_sources(s.world, s.speed, s.sources, {BallMode::ConeOnBall, 0.1});
  const std::size_t k = s.world.grid().linear(2, 0);  // distance 0.05
  bool found = false;
  for (const auto& v : cone) {
    if (v.node == k) {
      EXPECT_NEAR(v.u, 0.025, 1e-15);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  EXPECT_THROW(initialize_sources(s.world, s.speed, s.sources, {BallMode::ZeroOnBall, 0.01}),
               std::invalid_argument);

  const Case lin = make({1, 1}, 0.05, {}, {{0, 0}}, LinearSpeed{1.0, {1.0, 0.0}, {0, 0}});
  const auto li = initialize_sources(lin.world, lin.speed, lin.sources,
                                     {BallMode::LineIntegratedBall, 0.1});
  const std::size_t k2 = lin.world.grid().linear(2, 0);
  for (const auto& v : li) {
    if (v.node == k2) {
      EXPECT_NEAR(v.u, std::log(1.1), 1e-10);
    }
  }
}
