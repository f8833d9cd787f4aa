#include "eikfac/path.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "eikfac/oracles.hpp"

namespace eikfac {

namespace {

double at(std::span<const double> u, const Grid2D& g, int i, int j) {
  if (!g.in_range(i, j)) return kInf;
  return u[g.linear(i, j)];
}

double axis_derivative(double lo, double mid, double hi, double h) {
  const bool has_lo = std::isfinite(lo);
  const bool has_hi = std::isfinite(hi);
  if (has_lo && has_hi) return (hi - lo) / (2.0 * h);
  if (has_hi) return (hi - mid) / h;
  if (has_lo) return (mid - lo) / h;
  return 0.0;
}

Vec2 node_gradient(std::span<const double> u, const Grid2D& g, int i, int j) {
  const double c = at(u, g, i, j);
  const double h = g.h();
  return {axis_derivative(at(u, g, i - 1, j), c, at(u, g, i + 1, j), h),
          axis_derivative(at(u, g, i, j - 1), c, at(u, g, i, j + 1), h)};
}

struct CellWeights {
  std::array<int, 4> i{};
  std::array<int, 4> j{};
  std::array<double, 4> w{};
};

// Corner weights for p: bilinear when all corners are finite, otherwise
// inverse distance over the finite corners.
CellWeights cell_weights(std::span<const double> u, const Grid2D& g, Vec2 p) {
  const double h = g.h();
  const double fx = (p.x - g.origin().x) / h;
  const double fy = (p.y - g.origin().y) / h;
  const int ci = std::clamp(static_cast<int>(std::floor(fx)), 0, g.nx() - 2);
  const int cj = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ny() - 2);
  const double s = std::clamp(fx - ci, 0.0, 1.0);
  const double t = std::clamp(fy - cj, 0.0, 1.0);
  CellWeights cw;
  cw.i = {ci, ci + 1, ci, ci + 1};
  cw.j = {cj, cj, cj + 1, cj + 1};
  const std::array<double, 4> bil = {(1 - s) * (1 - t), s * (1 - t), (1 - s) * t, s * t};
  std::array<bool, 4> finite{};
  bool all = true;
  bool any = false;
  for (int c = 0; c < 4; ++c) {
    finite[c] = std::isfinite(at(u, g, cw.i[c], cw.j[c]));
    all = all && finite[c];
    any = any || finite[c];
  }
  if (!any) throw std::domain_error("all cell corners are infinite");
  if (all) {
    cw.w = bil;
    return cw;
  }
  double total = 0.0;
  for (int c = 0; c < 4; ++c) {
    if (!finite[c]) continue;
    const double d = distance(p, g.coord(cw.i[c], cw.j[c]));
    if (d < 1e-12 * h) {
      cw.w = {};
      cw.w[c] = 1.0;
      return cw;
    }
    cw.w[c] = 1.0 / d;
    total += cw.w[c];
  }
  for (double& w : cw.w) w /= total;
  return cw;
}

// Nearest point on the boundary of the rectangle for a point inside it.
Vec2 project_out(const RectObstacle& r, Vec2 p) {
  const double dl = p.x - r.lo.x;
  const double dr = r.hi.x - p.x;
  const double db = p.y - r.lo.y;
  const double dt = r.hi.y - p.y;
  const double m = std::min({dl, dr, db, dt});
  if (m == dl) return {r.lo.x, p.y};
  if (m == dr) return {r.hi.x, p.y};
  if (m == db) return {p.x, r.lo.y};
  return {p.x, r.hi.y};
}

Vec2 keep_in_domain(const ObstacleWorld& world, Vec2 p) {
  const Grid2D& g = world.grid();
  const Vec2 lo = g.origin();
  const Vec2 hi = g.upper();
  p = {std::clamp(p.x, lo.x, hi.x), std::clamp(p.y, lo.y, hi.y)};
  for (int pass = 0; pass < 4; ++pass) {
    bool moved = false;
    for (const auto& ob : world.obstacles()) {
      if (!ob.permeable() && ob.strictly_contains(p, 0.0)) {
        p = project_out(ob, p);
        moved = true;
      }
    }
    if (!moved) break;
  }
  return p;
}

// Obstacle whose interior the segment p-q crosses, or nullptr.
const RectObstacle* blocking_obstacle(const ObstacleWorld& world, Vec2 p, Vec2 q) {
  for (const auto& ob : world.obstacles()) {
    if (!ob.permeable() && segment_crosses_rect(p, q, ob)) return &ob;
  }
  return nullptr;
}

// Vertex of r minimizing |p - v| + |v - q|.
Vec2 detour_vertex(const RectObstacle& r, Vec2 p, Vec2 q) {
  const std::array<Vec2, 4> v = {r.lo, Vec2{r.hi.x, r.lo.y}, r.hi, Vec2{r.lo.x, r.hi.y}};
  Vec2 best = v[0];
  double best_len = kInf;
  for (Vec2 c : v) {
    const double len = distance(p, c) + distance(c, q);
    if (len < best_len) {
      best_len = len;
      best = c;
    }
  }
  return best;
}

}  // namespace

Vec2 interpolate_gradient(std::span<const double> u, const ObstacleWorld& world, Vec2 p) {
  const Grid2D& g = world.grid();
  const CellWeights cw = cell_weights(u, g, p);
  Vec2 out;
  for (int c = 0; c < 4; ++c) {
    if (cw.w[c] == 0.0) continue;
    out += cw.w[c] * node_gradient(u, g, cw.i[c], cw.j[c]);
  }
  return out;
}

double interpolate_value(std::span<const double> u, const ObstacleWorld& world, Vec2 p) {
  const Grid2D& g = world.grid();
  const CellWeights cw = cell_weights(u, g, p);
  double out = 0.0;
  for (int c = 0; c < 4; ++c) {
    if (cw.w[c] == 0.0) continue;
    out += cw.w[c] * at(u, g, cw.i[c], cw.j[c]);
  }
  return out;
}

Trajectory extract_trajectory(std::span<const double> u, const ObstacleWorld& world, Vec2 start,
                              const std::vector<Vec2>& sources, const TrajectoryOptions& options) {
  const Grid2D& g = world.grid();
  for (const auto& ob : world.obstacles()) {
    if (!ob.permeable() && ob.strictly_contains(start, 0.0)) {
      throw std::invalid_argument("trajectory start lies inside an obstacle");
    }
  }
  const double step = options.step_fraction * g.h();
  const double capture = options.capture_fraction * g.h();
  double umax = 0.0;
  for (double v : u) {
    if (std::isfinite(v)) umax = std::max(umax, v);
  }
  const double slack = 1e-9 * umax;

  Trajectory tr;
  Vec2 x = start;
  tr.points.push_back(x);
  double ux = interpolate_value(u, world, x);
  auto nearest_source = [&](Vec2 p) -> const Vec2* {
    const Vec2* best = nullptr;
    double bd = kInf;
    for (const Vec2& s : sources) {
      const double d = distance(p, s);
      if (d < bd) {
        bd = d;
        best = &s;
      }
    }
    return bd <= capture ? best : nullptr;
  };
  auto append = [&](Vec2 p) {
    tr.length += distance(tr.points.back(), p);
    tr.points.push_back(p);
  };

  for (std::size_t n = 0; n < options.max_steps; ++n) {
    if (const Vec2* s = nearest_source(x)) {
      append(*s);
      tr.status = TrajectoryStatus::ReachedSource;
      return tr;
    }
    const Vec2 g1 = interpolate_gradient(u, world, x);
    const double n1 = norm(g1);
    if (n1 < 1e-12) {
      tr.status = TrajectoryStatus::Stalled;
      return tr;
    }
    const Vec2 mid = keep_in_domain(world, x - (0.5 * step / n1) * g1);
    const Vec2 g2 = interpolate_gradient(u, world, mid);
    const double n2 = norm(g2);
    if (n2 < 1e-12) {
      tr.status = TrajectoryStatus::Stalled;
      return tr;
    }
    Vec2 next = keep_in_domain(world, x - (step / n2) * g2);
    if (const RectObstacle* ob = blocking_obstacle(world, x, next)) {
      next = detour_vertex(*ob, x, next);
    }
    const double un = interpolate_value(u, world, next);
    if (un > ux + slack) ++tr.monotonicity_violations;
    ux = un;
    x = next;
    append(x);
  }
  tr.status = TrajectoryStatus::MaxSteps;
  return tr;
}

}  // namespace eikfac
