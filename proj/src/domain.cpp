#include "eikfac/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace eikfac {

namespace {

std::string to_string(Vec2 p) {
  std::ostringstream ss;
  ss << "(" << p.x << ", " << p.y << ")";
  return ss.str();
}

bool on_lattice(double value, double origin, double h) {
  const double t = (value - origin) / h;
  return std::abs(t - std::round(t)) <= 1e-9 * std::max(1.0, std::abs(t));
}

constexpr std::array<std::array<int, 2>, 4> kQuadrantCellOffset = {{
    {0, 0},    // NE: cell (i, j)
    {-1, 0},   // NW: cell (i-1, j)
    {-1, -1},  // SW
    {0, -1},   // SE
}};

int owner_of_cell(const Grid2D& grid, const std::vector<RectObstacle>& obstacles,
                  int ci, int cj) {
  if (ci < 0 || cj < 0 || ci >= grid.nx() - 1 || cj >= grid.ny() - 1) return -1;
  const Vec2 c = grid.coord(ci, cj) + Vec2{0.5 * grid.h(), 0.5 * grid.h()};
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    if (obstacles[k].strictly_contains(c, 0.0)) return static_cast<int>(k);
  }
  return -1;
}

void check_obstacles(const Grid2D& grid, const std::vector<RectObstacle>& obstacles) {
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    const auto& ob = obstacles[k];
    if (!(ob.lo.x < ob.hi.x) || !(ob.lo.y < ob.hi.y)) {
      throw std::invalid_argument("obstacle " + std::to_string(k) +
                                  " has empty extent: lo " + to_string(ob.lo) +
                                  " hi " + to_string(ob.hi));
    }
    for (Vec2 corner : {ob.lo, ob.hi}) {
      if (!on_lattice(corner.x, grid.origin().x, grid.h()) ||
          !on_lattice(corner.y, grid.origin().y, grid.h())) {
        throw std::invalid_argument("obstacle " + std::to_string(k) + " corner " +
                                    to_string(corner) +
                                    " is not aligned with the grid (h = " +
                                    std::to_string(grid.h()) + ")");
      }
    }
    if (ob.permeable() && !(ob.obstacle_speed() > 0.0)) {
      throw std::invalid_argument("obstacle " + std::to_string(k) +
                                  " has non-positive permeable speed");
    }
  }
}

}  // namespace

Grid2D::Grid2D(int nx, int ny, double h, Vec2 origin)
    : nx_(nx), ny_(ny), h_(h), origin_(origin) {
  if (nx < 2 || ny < 2) {
    throw std::invalid_argument("grid needs at least 2 nodes per axis");
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("grid spacing must be positive");
  }
}

Grid2D Grid2D::from_bounds(Vec2 lo, Vec2 hi, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  const double mx = (hi.x - lo.x) / h;
  const double my = (hi.y - lo.y) / h;
  const double rx = std::round(mx);
  const double ry = std::round(my);
  if (std::abs(mx - rx) > 1e-9 * std::max(1.0, rx) ||
      std::abs(my - ry) > 1e-9 * std::max(1.0, ry)) {
    throw std::invalid_argument("domain extent is not a multiple of h = " +
                                std::to_string(h));
  }
  return Grid2D(static_cast<int>(rx) + 1, static_cast<int>(ry) + 1, h, lo);
}

std::optional<NodeIndex> Grid2D::find_node(Vec2 p, double tol_fraction) const {
  const double fi = (p.x - origin_.x) / h_;
  const double fj = (p.y - origin_.y) / h_;
  const long i = std::lround(fi);
  const long j = std::lround(fj);
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return std::nullopt;
  const Vec2 c = coord(static_cast<int>(i), static_cast<int>(j));
  if (std::abs(c.x - p.x) > tol_fraction * h_ ||
      std::abs(c.y - p.y) > tol_fraction * h_) {
    return std::nullopt;
  }
  return NodeIndex{static_cast<int>(i), static_cast<int>(j)};
}

bool Grid2D::contains(Vec2 p) const {
  const double eps = 1e-9 * h_;
  const Vec2 up = upper();
  return p.x >= origin_.x - eps && p.y >= origin_.y - eps && p.x <= up.x + eps &&
         p.y <= up.y + eps;
}

std::vector<CornerCandidate> enumerate_corner_candidates(
    const Grid2D& grid, const std::vector<RectObstacle>& obstacles) {
  std::vector<CornerCandidate> out;
  if (obstacles.empty()) return out;
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      int count = 0;
      int quadrant = -1;
      int owner = -1;
      for (int q = 0; q < 4; ++q) {
        const int o = owner_of_cell(grid, obstacles, i + kQuadrantCellOffset[q][0],
                                    j + kQuadrantCellOffset[q][1]);
        if (o >= 0) {
          ++count;
          quadrant = q;
          owner = o;
        }
      }
      if (count != 1) continue;
      CornerCandidate c;
      c.node = grid.linear(i, j);
      c.quadrant = static_cast<Quadrant>(quadrant);
      c.obstacle = owner;
      c.theta1 = quadrant * (kPi / 2.0);
      c.theta2 = c.theta1 + kPi / 2.0;
      out.push_back(c);
    }
  }
  return out;
}

ObstacleWorld::ObstacleWorld(const Grid2D& grid, std::vector<RectObstacle> obstacles)
    : grid_(grid), obstacles_(std::move(obstacles)) {
  check_obstacles(grid_, obstacles_);
  const int cx = grid_.nx() - 1;
  const int cy = grid_.ny() - 1;
  cell_owner_.assign(static_cast<std::size_t>(cx) * static_cast<std::size_t>(cy), -1);
  if (!obstacles_.empty()) {
    for (int cj = 0; cj < cy; ++cj) {
      for (int ci = 0; ci < cx; ++ci) {
        cell_owner_[static_cast<std::size_t>(cj) * cx + ci] =
            owner_of_cell(grid_, obstacles_, ci, cj);
      }
    }
  }

  node_class_.assign(grid_.size(), PointClass{});
  excluded_.assign(grid_.size(), 0);
  corner_lookup_.assign(grid_.size(), -1);
  if (obstacles_.empty()) return;

  for (int j = 0; j < grid_.ny(); ++j) {
    for (int i = 0; i < grid_.nx(); ++i) {
      int count = 0;
      int min_owner = -1;
      bool any_solid = false;
      for (int q = 0; q < 4; ++q) {
        const int o = cell_owner(i + kQuadrantCellOffset[q][0], j + kQuadrantCellOffset[q][1]);
        if (o < 0) continue;
        ++count;
        if (min_owner < 0 || o < min_owner) min_owner = o;
        if (!obstacles_[static_cast<std::size_t>(o)].permeable()) any_solid = true;
      }
      const std::size_t k = grid_.linear(i, j);
      if (count == 4) {
        node_class_[k] = {PointKind::Interior, min_owner};
        excluded_[k] = any_solid ? 1 : 0;
      } else if (count > 0) {
        node_class_[k] = {PointKind::Boundary, -1};
      }
    }
  }

  corners_ = enumerate_corner_candidates(grid_, obstacles_);
  for (std::size_t c = 0; c < corners_.size(); ++c) {
    corner_lookup_[corners_[c].node] = static_cast<int>(c);
  }
}

int ObstacleWorld::cell_owner(int ci, int cj) const {
  if (ci < 0 || cj < 0 || ci >= grid_.nx() - 1 || cj >= grid_.ny() - 1) return -1;
  return cell_owner_[static_cast<std::size_t>(cj) * (grid_.nx() - 1) + ci];
}

PointClass point_in_obstacles(Vec2 p, const ObstacleWorld& world) {
  const Grid2D& grid = world.grid();
  if (!grid.contains(p)) {
    throw std::out_of_range("point " + to_string(p) + " is outside the domain");
  }
  const auto& obstacles = world.obstacles();
  const double eps = 1e-9 * grid.h();
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    if (obstacles[k].strictly_contains(p, eps)) {
      return {PointKind::Interior, static_cast<int>(k)};
    }
  }
  const bool on_some_boundary =
      std::any_of(obstacles.begin(), obstacles.end(),
                  [&](const RectObstacle& ob) { return ob.closure_contains(p, eps); });
  if (!on_some_boundary) return {};

  // Points on a shared edge of touching rectangles are inside the union.
  const double d = 1e-6 * grid.h();
  int min_owner = -1;
  for (Vec2 off : {Vec2{d, d}, Vec2{-d, d}, Vec2{-d, -d}, Vec2{d, -d}}) {
    int owner = -1;
    for (std::size_t k = 0; k < obstacles.size(); ++k) {
      if (obstacles[k].strictly_contains(p + off, 0.0)) {
        owner = static_cast<int>(k);
        break;
      }
    }
    if (owner < 0) return {PointKind::Boundary, -1};
    if (min_owner < 0 || owner < min_owner) min_owner = owner;
  }
  return {PointKind::Interior, min_owner};
}

double eval_base_speed(const BaseSpeed& base, Vec2 p) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ConstantSpeed>) {
          return s.value;
        } else if constexpr (std::is_same_v<S, LinearSpeed>) {
          return 1.0 / s.s0 + dot(s.v, p - s.x0);
        } else {
          return s.base + s.amp * std::sin(2.0 * kPi * p.x) * std::sin(2.0 * kPi * p.y);
        }
      },
      base);
}

SpeedField::SpeedField(BaseSpeed base, std::vector<RectObstacle> permeable_obstacles)
    : base_(base), permeable_(std::move(permeable_obstacles)) {
  for (const auto& ob : permeable_) {
    if (!ob.permeable()) {
      throw std::invalid_argument("SpeedField only stores permeable obstacles");
    }
  }
}

SpeedField SpeedField::with_obstacles(BaseSpeed base,
                                      const std::vector<RectObstacle>& obstacles) {
  std::vector<RectObstacle> permeable;
  std::copy_if(obstacles.begin(), obstacles.end(), std::back_inserter(permeable),
               [](const RectObstacle& ob) { return ob.permeable(); });
  return SpeedField(base, std::move(permeable));
}

double speed_eval(const SpeedField& field, Vec2 p, std::optional<SideHint> hint) {
  constexpr double eps = 1e-12;
  double value = field.free_speed(p);
  for (const auto& ob : field.permeable_obstacles()) {
    if (ob.strictly_contains(p, eps) ||
        (hint == SideHint::ObstacleSide && ob.closure_contains(p, eps))) {
      value = ob.obstacle_speed();
      break;
    }
  }
  if (!(value > 0.0)) {
    throw std::domain_error("speed is not positive at " + to_string(p));
  }
  return value;
}

double SpeedField::node_speed(const ObstacleWorld& world, std::size_t k) const {
  const PointClass pc = world.node_class(k);
  if (pc.kind == PointKind::Interior && !world.excluded(k)) {
    return world.obstacles()[static_cast<std::size_t>(pc.obstacle)].obstacle_speed();
  }
  return free_speed(world.grid().coord(k));
}

void SpeedField::validate(const ObstacleWorld& world) const {
  const Grid2D& grid = world.grid();
  const double eps = 1e-9 * grid.h();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (world.excluded(k)) continue;
    const double f = node_speed(world, k);
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw std::domain_error("speed is not positive at node " +
                              to_string(grid.coord(k)));
    }
    if (world.node_class(k).kind != PointKind::Boundary) continue;
    const Vec2 p = grid.coord(k);
    for (std::size_t o = 0; o < world.obstacles().size(); ++o) {
      const auto& ob = world.obstacles()[o];
      if (!ob.permeable() || !ob.closure_contains(p, eps)) continue;
      if (!(free_speed(p) > ob.obstacle_speed())) {
        throw std::domain_error("permeable obstacle " + std::to_string(o) +
                                " is not slower than the free speed at " +
                                to_string(p));
      }
    }
  }
}

SourceSet::SourceSet(const ObstacleWorld& world, std::vector<Vec2> points)
    : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("source set is empty");
  const Grid2D& grid = world.grid();
  for (Vec2 p : points_) {
    const auto n = grid.find_node(p);
    if (!n) {
      throw std::invalid_argument("source " + to_string(p) +
                                  " does not coincide with a grid node");
    }
    const std::size_t k = grid.linear(*n);
    if (world.node_class(k).kind == PointKind::Interior) {
      throw std::invalid_argument("source " + to_string(p) +
                                  " lies inside an obstacle");
    }
    nodes_.push_back(k);
  }
}

}  // namespace eikfac
