#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "eikfac/geometry.hpp"

namespace eikfac {

struct NodeIndex {
  int i = 0;
  int j = 0;
  friend constexpr bool operator==(NodeIndex, NodeIndex) = default;
};

/// Uniform Cartesian grid; node (i, j) sits at origin + (i*h, j*h).
class Grid2D {
 public:
  Grid2D(int nx, int ny, double h, Vec2 origin = {});

  /// Grid covering [lo, hi] with spacing h. Both extents must be integer
  /// multiples of h (to 1e-9 relative).
  static Grid2D from_bounds(Vec2 lo, Vec2 hi, double h);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }
  Vec2 origin() const { return origin_; }
  Vec2 upper() const { return coord(nx_ - 1, ny_ - 1); }
  std::size_t size() const {
    return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
  }

  bool in_range(int i, int j) const {
    return i >= 0 && j >= 0 && i < nx_ && j < ny_;
  }
  std::size_t linear(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(i);
  }
  std::size_t linear(NodeIndex n) const { return linear(n.i, n.j); }
  NodeIndex node(std::size_t k) const {
    return {static_cast<int>(k % static_cast<std::size_t>(nx_)),
            static_cast<int>(k / static_cast<std::size_t>(nx_))};
  }
  Vec2 coord(int i, int j) const {
    return {origin_.x + i * h_, origin_.y + j * h_};
  }
  Vec2 coord(NodeIndex n) const { return coord(n.i, n.j); }
  Vec2 coord(std::size_t k) const { return coord(node(k)); }

  /// Node whose coordinate is within `tol_fraction * h` of p, if any.
  std::optional<NodeIndex> find_node(Vec2 p, double tol_fraction = 1e-9) const;

  /// True when p lies in the closed bounding box (with 1e-9*h slack).
  bool contains(Vec2 p) const;

 private:
  int nx_;
  int ny_;
  double h_;
  Vec2 origin_;
};

struct NonPermeable {};
struct Permeable {
  double speed = 1.0;  // F_ob inside the obstacle
};
using Permeability = std::variant<NonPermeable, Permeable>;

/// Open axis-aligned rectangle (lo, hi).
struct RectObstacle {
  Vec2 lo;
  Vec2 hi;
  Permeability permeability = NonPermeable{};

  bool permeable() const {
    return std::holds_alternative<Permeable>(permeability);
  }
  double obstacle_speed() const { return std::get<Permeable>(permeability).speed; }
  bool strictly_contains(Vec2 p, double eps) const {
    return p.x > lo.x + eps && p.x < hi.x - eps && p.y > lo.y + eps &&
           p.y < hi.y - eps;
  }
  bool closure_contains(Vec2 p, double eps) const {
    return p.x >= lo.x - eps && p.x <= hi.x + eps && p.y >= lo.y - eps &&
           p.y <= hi.y + eps;
  }
};

enum class PointKind : std::uint8_t { Free, Boundary, Interior };

struct PointClass {
  PointKind kind = PointKind::Free;
  int obstacle = -1;  // set for Interior
  friend constexpr bool operator==(PointClass, PointClass) = default;
};

/// Quadrants around a node, counterclockwise starting at the +x,+y cell.
enum class Quadrant : std::uint8_t { NE = 0, NW = 1, SW = 2, SE = 3 };

/// A node where exactly one incident cell belongs to an obstacle.
struct CornerCandidate {
  std::size_t node = 0;
  Quadrant quadrant = Quadrant::NE;
  int obstacle = -1;
  double theta1 = 0.0;  // obstacle sector is [theta1, theta2] (radians, ccw)
  double theta2 = 0.0;
};

class ObstacleWorld {
 public:
  ObstacleWorld(const Grid2D& grid, std::vector<RectObstacle> obstacles);

  const Grid2D& grid() const { return grid_; }
  const std::vector<RectObstacle>& obstacles() const { return obstacles_; }

  PointClass node_class(std::size_t k) const { return node_class_[k]; }
  /// Nodes strictly inside a non-permeable obstacle (not part of the solve).
  bool excluded(std::size_t k) const { return excluded_[k] != 0; }
  std::span<const std::uint8_t> excluded_mask() const { return excluded_; }

  const std::vector<CornerCandidate>& corner_candidates() const {
    return corners_;
  }
  /// Index into corner_candidates() for node k, or -1.
  int corner_at(std::size_t k) const { return corner_lookup_[k]; }

  /// Obstacle owning cell (ci, cj) (the cell with lower-left node (ci, cj)),
  /// or -1 when the cell is free or outside the grid.
  int cell_owner(int ci, int cj) const;

 private:
  Grid2D grid_;
  std::vector<RectObstacle> obstacles_;
  std::vector<int> cell_owner_;
  std::vector<PointClass> node_class_;
  std::vector<std::uint8_t> excluded_;
  std::vector<CornerCandidate> corners_;
  std::vector<int> corner_lookup_;
};

/// Classify an arbitrary point against the obstacle union, with open
/// rectangle semantics. Throws std::out_of_range for points outside the grid.
PointClass point_in_obstacles(Vec2 p, const ObstacleWorld& world);

/// Every node with exactly one obstacle cell among its incident cells.
/// Cells outside the grid do not count as obstacle cells.
std::vector<CornerCandidate> enumerate_corner_candidates(
    const Grid2D& grid, const std::vector<RectObstacle>& obstacles);

struct ConstantSpeed {
  double value = 1.0;
};
/// F(x) = 1/s0 + v . (x - x0)
struct LinearSpeed {
  double s0 = 1.0;
  Vec2 v;
  Vec2 x0;
};
/// F(x, y) = base + amp * sin(2 pi x) sin(2 pi y)
struct SinusoidalSpeed {
  double base = 1.0;
  double amp = 0.0;
};
using BaseSpeed = std::variant<ConstantSpeed, LinearSpeed, SinusoidalSpeed>;

double eval_base_speed(const BaseSpeed& base, Vec2 p);

enum class SideHint : std::uint8_t { FreeSide, ObstacleSide };

/// Speed function, optionally with slower piecewise-constant values inside
/// permeable obstacles.
class SpeedField {
 public:
  explicit SpeedField(BaseSpeed base) : base_(base) {}
  SpeedField(BaseSpeed base, std::vector<RectObstacle> permeable_obstacles);

  static SpeedField with_obstacles(BaseSpeed base,
                                   const std::vector<RectObstacle>& obstacles);

  const BaseSpeed& base() const { return base_; }
  const std::vector<RectObstacle>& permeable_obstacles() const {
    return permeable_;
  }

  /// Free-side speed (ignores obstacles).
  double free_speed(Vec2 p) const { return eval_base_speed(base_, p); }

  /// Throws std::domain_error when F(x) <= 0 somewhere on the nodes of the
  /// solve, or when some permeable obstacle is not slower than the free
  /// speed along its boundary.
  void validate(const ObstacleWorld& world) const;

  /// Speed used by the solver at node k.
  double node_speed(const ObstacleWorld& world, std::size_t k) const;

 private:
  BaseSpeed base_;
  std::vector<RectObstacle> permeable_;
};

/// Speed at p. On a permeable-obstacle boundary the free-side value is
/// returned unless hint == ObstacleSide. Throws std::domain_error when the
/// value is not positive.
double speed_eval(const SpeedField& field, Vec2 p,
                  std::optional<SideHint> hint = std::nullopt);

/// Validated source nodes of the solve.
class SourceSet {
 public:
  SourceSet(const ObstacleWorld& world, std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  const std::vector<std::size_t>& nodes() const { return nodes_; }

 private:
  std::vector<Vec2> points_;
  std::vector<std::size_t> nodes_;
};

}  // namespace eikfac
