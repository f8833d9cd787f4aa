#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "eikfac/domain.hpp"

using namespace eikfac;

namespace {

const RectObstacle kSimple{{0.0, 0.2}, {0.2, 1.0}};

// Obstacle count among the in-grid cells incident to node (i, j), from cell
// centers only.
int brute_obstacle_cells(const Grid2D& g, const std::vector<RectObstacle>& obs, int i, int j,
                         int& owner) {
  int count = 0;
  for (int di = -1; di <= 0; ++di) {
    for (int dj = -1; dj <= 0; ++dj) {
      const int ci = i + di;
      const int cj = j + dj;
      if (ci < 0 || cj < 0 || ci >= g.nx() - 1 || cj >= g.ny() - 1) continue;
      const Vec2 c = g.coord(ci, cj) + Vec2{0.5 * g.h(), 0.5 * g.h()};
      for (std::size_t o = 0; o < obs.size(); ++o) {
        if (obs[o].strictly_contains(c, 0.0)) {
          ++count;
          owner = static_cast<int>(o);
          break;
        }
      }
    }
  }
  return count;
}

}  // namespace

TEST(Grid, IndexCoordRoundTrip) {
  const Grid2D g(7, 5, 0.25, {-1.0, 2.0});
  for (std::size_t k = 0; k < g.size(); ++k) {
    const NodeIndex n = g.node(k);
    EXPECT_EQ(g.linear(n), k);
    const auto back = g.find_node(g.coord(n));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, n);
  }
}

TEST(Grid, FromBoundsRejectsNonMultiple) {
  EXPECT_NO_THROW(Grid2D::from_bounds({0, 0}, {1, 1}, 0.02));
  EXPECT_THROW(Grid2D::from_bounds({0, 0}, {1, 1}, 0.3), std::invalid_argument);
}

TEST(PointInObstacles, Examples) {
  const ObstacleWorld w(Grid2D::from_bounds({0, 0}, {1, 1}, 0.1), {kSimple});
  EXPECT_EQ(point_in_obstacles({0.1, 0.5}, w).kind, PointKind::Interior);
  EXPECT_EQ(point_in_obstacles({0.1, 0.5}, w).obstacle, 0);
  EXPECT_EQ(point_in_obstacles({0.2, 0.2}, w).kind, PointKind::Boundary);
  EXPECT_EQ(point_in_obstacles({0.5, 0.5}, w).kind, PointKind::Free);
}

TEST(CornerCandidates, SimpleObstacleMatchesBruteForce) {
  const Grid2D g = Grid2D::from_bounds({0, 0}, {1, 1}, 0.1);
  const auto c = enumerate_corner_candidates(g, {kSimple});
  // The rule yields (0,0.2), (0.2,0.2), (0,1) and (0.2,1).
  ASSERT_EQ(c.size(), 4u);
  std::vector<Vec2> pts;
  for (const auto& cc : c) pts.push_back(g.coord(cc.node));
  auto has = [&](Vec2 p) {
    return std::any_of(pts.begin(), pts.end(),
                       [&](Vec2 q) { return distance(p, q) < 1e-12; });
  };
  EXPECT_TRUE(has({0.2, 0.2}));
  EXPECT_TRUE(has({0.2, 1.0}));
  EXPECT_TRUE(has({0.0, 0.2}));
  EXPECT_TRUE(has({0.0, 1.0}));
}

TEST(CornerCandidates, SectorOfSimpleCorner) {
  const Grid2D g = Grid2D::from_bounds({0, 0}, {1, 1}, 0.1);
  for (const auto& cc : enumerate_corner_candidates(g, {kSimple})) {
    if (distance(g.coord(cc.node), {0.2, 0.2}) > 1e-12) continue;
    EXPECT_EQ(cc.quadrant, Quadrant::NW);
    EXPECT_NEAR(cc.theta1, kPi / 2, 1e-15);
    EXPECT_NEAR(cc.theta2, kPi, 1e-15);
  }
}

TEST(CornerCandidates, ConcaveJunctionIsNotACandidate) {
  const Grid2D g = Grid2D::from_bounds({0, 0}, {1, 1}, 0.1);
  const std::vector<RectObstacle> l = {{{0.2, 0.2}, {0.6, 0.4}}, {{0.2, 0.4}, {0.4, 0.8}}};
  const auto c = enumerate_corner_candidates(g, l);
  for (const auto& cc : c) EXPECT_GT(distance(g.coord(cc.node), {0.4, 0.4}), 1e-12);
}

TEST(CornerCandidates, NoObstacles) {
  EXPECT_TRUE(enumerate_corner_candidates(Grid2D::from_bounds({0, 0}, {1, 1}, 0.1), {}).empty());
}

TEST(CornerCandidates, RandomRectanglesMatchBruteForce) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> cell(0, 19);
  const Grid2D g = Grid2D::from_bounds({0, 0}, {1, 1}, 0.05);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RectObstacle> obs;
    const int n = 1 + trial % 4;
    for (int o = 0; o < n; ++o) {
      int a = cell(rng), b = cell(rng), c = cell(rng), d = cell(rng);
      if (a == b) b = a + 1;
      if (c == d) d = c + 1;
      obs.push_back({{0.05 * std::min(a, b), 0.05 * std::min(c, d)},
                     {0.05 * std::max(a, b), 0.05 * std::max(c, d)}});
    }
    const auto cands = enumerate_corner_candidates(g, obs);
    std::size_t expected = 0;
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        int owner = -1;
        if (brute_obstacle_cells(g, obs, i, j, owner) == 1) ++expected;
      }
    }
    EXPECT_EQ(cands.size(), expected) << "trial " << trial;
  }
}

TEST(ObstacleWorld, MaskInvariantUnderObstacleOrder) {
  const Grid2D g = Grid2D::from_bounds({0, 0}, {1, 1}, 0.025);
  std::vector<RectObstacle> obs = {
      {{0.1, 0.2}, {0.4, 0.3}}, {{0.3, 0.25}, {0.7, 0.5}}, {{0.1, 0.6}, {0.2, 0.9}}};
  const ObstacleWorld a(g, obs);
  std::reverse(obs.begin(), obs.end());
  const ObstacleWorld b(g, obs);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_EQ(a.excluded(k), b.excluded(k));
    EXPECT_EQ(a.node_class(k).kind, b.node_class(k).kind);
  }
}

TEST(Speed, Examples) {
  const SpeedField lin(LinearSpeed{2.0, {0.5, 0.0}, {0.0, 0.0}});
  EXPECT_DOUBLE_EQ(speed_eval(lin, {1.0, 0.0}), 0.5 + 0.5 * 1.0);
  EXPECT_EQ(speed_eval(SpeedField(ConstantSpeed{1.0}), {0.3, 0.7}), 1.0);
  const double fob = 2.0 / std::sqrt(5.0);
  const RectObstacle perm{{0.0, 0.2}, {0.2, 1.0}, Permeable{fob}};
  const SpeedField s = SpeedField::with_obstacles(ConstantSpeed{1.0}, {perm});
  EXPECT_NEAR(speed_eval(s, {0.1, 0.5}), 0.894427191, 1e-9);
  EXPECT_EQ(speed_eval(s, {0.2, 0.5}), 1.0);
  EXPECT_NEAR(speed_eval(s, {0.2, 0.5}, SideHint::ObstacleSide), fob, 1e-15);
}

TEST(Speed, NonPositiveIsRejected) {
  const SpeedField lin(LinearSpeed{1.0, {-2.0, 0.0}, {0.0, 0.0}});
  EXPECT_THROW(speed_eval(lin, {1.0, 0.0}), std::domain_error);
  const ObstacleWorld w(Grid2D::from_bounds({0, 0}, {1, 1}, 0.1), {});
  EXPECT_THROW(lin.validate(w), std::domain_error);
}

TEST(Sources, MustBeNodesOutsideObstacles) {
  const ObstacleWorld w(Grid2D::from_bounds({0, 0}, {1, 1}, 0.1), {kSimple});
  EXPECT_NO_THROW(SourceSet(w, {{0.0, 0.0}}));
  EXPECT_THROW(SourceSet(w, {{0.05, 0.0}}), std::invalid_argument);
  EXPECT_THROW(SourceSet(w, {{0.1, 0.5}}), std::invalid_argument);
  EXPECT_THROW(SourceSet(w, {}), std::invalid_argument);
}
