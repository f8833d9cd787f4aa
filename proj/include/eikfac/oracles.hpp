#pragma once

#include <functional>
#include <vector>

#include "eikfac/domain.hpp"

namespace eikfac {

/// Point source at x0 with speed F(x) = 1/s0 + v . (x - x0).
struct LinearSpeedProblem {
  Vec2 x0;
  double s0 = 1.0;
  Vec2 v;
};

/// Closed-form travel time from x0; straight-line branch when |v| < 1e-14.
double eval_linear_speed_solution(const LinearSpeedProblem& p, Vec2 x);

/// Travel time along the straight segment x0 -> x, by adaptive Simpson
/// quadrature (absolute tolerance 1e-12). Throws std::domain_error when F is
/// not positive at a sample.
double line_integrated_time(Vec2 x0, Vec2 x, const std::function<double(Vec2)>& F);

/// Exact obstacle-avoiding Euclidean distance for unit speed and
/// non-permeable rectangles. Segments may touch obstacle boundaries.
class VisibilityOracle {
 public:
  VisibilityOracle(std::vector<RectObstacle> obstacles, std::vector<Vec2> sources);

  double distance(Vec2 x) const;

  /// True when the segment avoids every open obstacle.
  bool visible(Vec2 p, Vec2 q) const;

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<double>& vertex_distance() const { return dist_; }

 private:
  std::vector<RectObstacle> obstacles_;
  std::vector<Vec2> vertices_;  // sources first, then obstacle corners
  std::vector<double> dist_;
};

double visibility_distance(Vec2 x, const std::vector<Vec2>& sources,
                           const std::vector<RectObstacle>& obstacles);

/// True when the closed segment p-q passes through the open rectangle.
bool segment_crosses_rect(Vec2 p, Vec2 q, const RectObstacle& r);

}  // namespace eikfac
