#include "eikfac/factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace eikfac {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

// Counterclockwise angle from `from` to `to` in [0, 2 pi).
double ccw_angle(Vec2 from, Vec2 to) {
  return wrap_angle(std::atan2(cross(from, to), dot(from, to)));
}

FactorValue eval_cone(const Cone& c, Vec2 x) {
  const Vec2 d = x - c.center;
  const double r = norm(d);
  if (r == 0.0) return {};
  return {r / c.speed, d / (r * c.speed)};
}

FactorValue eval_layout(const SectorLayout& layout, Vec2 center, double speed, Vec2 x) {
  const int s = sector_classify(x, center, layout.boundaries);
  if (s == kAtCenter) return {};
  const SectorBranch& br = layout.branches[static_cast<std::size_t>(s)];
  const Vec2 d = x - center;
  switch (br.kind) {
    case SectorBranch::Kind::Cone: {
      const double r = norm(d);
      return {r / speed, d / (r * speed)};
    }
    case SectorBranch::Kind::Plane:
      return {dot(br.dir, d) / speed, br.dir / speed};
    case SectorBranch::Kind::Zero:
      break;
  }
  return {};
}

struct FactorEval {
  Vec2 x;
  FactorValue operator()(const ZeroFactor&) const { return {}; }
  FactorValue operator()(const Cone& c) const { return eval_cone(c, x); }
  FactorValue operator()(const ConePlane& f) const {
    return eval_layout(f.layout, f.center, f.speed, x);
  }
  FactorValue operator()(const ConeTwoPlanes& f) const {
    return eval_layout(f.layout, f.center, f.speed, x);
  }
  FactorValue operator()(const MinOfCones& f) const {
    FactorValue best{kInf, {}};
    for (const Cone& c : f.cones) {
      const FactorValue v = eval_cone(c, x);
      if (v.value < best.value) best = v;
    }
    return f.cones.empty() ? FactorValue{} : best;
  }
  FactorValue operator()(const SumOfCones& f) const {
    FactorValue sum;
    for (const Cone& c : f.cones) {
      const FactorValue v = eval_cone(c, x);
      sum.value += v.value;
      sum.grad += v.grad;
    }
    return sum;
  }
};

void check_upsilon(double upsilon) {
  if (!(upsilon >= 1.0)) {
    throw std::invalid_argument("speed ratio must be >= 1, got " + std::to_string(upsilon));
  }
}

}  // namespace

FactorValue eval_factor(const FactorFunction& t, Vec2 x) {
  return std::visit(FactorEval{x}, t);
}

double factor_value(const FactorFunction& t, Vec2 x) {
  if (std::holds_alternative<ZeroFactor>(t)) return 0.0;
  if (const Cone* c = std::get_if<Cone>(&t)) return norm(x - c->center) / c->speed;
  return eval_factor(t, x).value;
}

std::optional<Vec2> factor_center(const FactorFunction& t) {
  if (const auto* c = std::get_if<Cone>(&t)) return c->center;
  if (const auto* c = std::get_if<ConePlane>(&t)) return c->center;
  if (const auto* c = std::get_if<ConeTwoPlanes>(&t)) return c->center;
  return std::nullopt;
}

int sector_classify(Vec2 x, Vec2 center, const std::vector<Vec2>& boundaries) {
  const Vec2 d = x - center;
  if (d.x == 0.0 && d.y == 0.0) return kAtCenter;
  const std::size_t n = boundaries.size();
  if (n < 2) return 0;
  const double phi = ccw_angle(boundaries[0], d);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (phi <= ccw_angle(boundaries[0], boundaries[k + 1])) return static_cast<int>(k);
  }
  return static_cast<int>(n - 1);
}

double snell_beta(double alpha, double upsilon) {
  check_upsilon(upsilon);
  if (upsilon == 1.0) return kPi / 2.0 - alpha;
  const double sa = std::sin(alpha);
  const double s = std::sqrt(upsilon * upsilon - sa * sa);
  if (s >= 1.0) return kPi / 2.0;
  return std::asin(s);
}

double fan_sector_angle(double alpha, double beta) {
  const double d = alpha + beta - kPi / 2.0;
  return d > 4.0 * std::numeric_limits<double>::epsilon() ? d : 0.0;
}

SnellAngles refract_angles(double theta1, double upsilon) {
  check_upsilon(upsilon);
  SnellAngles out;
  out.upsilon = upsilon;
  out.theta1 = theta1;
  if (upsilon == 1.0) {
    out.theta2 = theta1;
    out.theta3 = kPi / 2.0 - theta1;
    return out;
  }
  const double s1 = std::sin(theta1);
  out.theta2 = std::asin(s1 / upsilon);
  const double s3 = std::sqrt(upsilon * upsilon - s1 * s1);
  if (s3 >= 1.0) {
    out.theta3 = kPi / 2.0;
    out.total_internal_reflection = true;
  } else {
    out.theta3 = std::asin(s3);
  }
  return out;
}

bool ObstacleSector::contains(Vec2 d, double tol) const {
  const double rel = wrap_angle(polar_angle(d) - theta1);
  return rel <= (theta2 - theta1) + tol || rel >= kTwoPi - tol;
}

ConePlane build_corner_factor(Vec2 corner, Vec2 a, const ObstacleSector& sector,
                              double speed, bool cone_in_s0_only) {
  const Vec2 minus_a = -a;
  if (sector.contains(minus_a)) {
    throw std::invalid_argument("characteristic points into the obstacle: corner is regular");
  }
  ConePlane f;
  f.center = corner;
  f.a = a;
  f.c = unit_from_angle(0.5 * (sector.theta1 + sector.theta2));
  f.speed = speed;
  f.cone_in_s0_only = cone_in_s0_only;

  const SectorBranch cone{SectorBranch::Kind::Cone, {}};
  const SectorBranch rest = cone_in_s0_only ? SectorBranch{SectorBranch::Kind::Zero, {}}
                                            : SectorBranch{SectorBranch::Kind::Plane, minus_a};
  // Fan face: the obstacle face reached from -a without crossing a.
  const double to_face1 = wrap_angle(sector.theta1 - polar_angle(minus_a));
  if (to_face1 < kPi) {
    f.layout.boundaries = {minus_a, f.c};
  } else {
    f.layout.boundaries = {f.c, minus_a};
  }
  f.layout.branches = {cone, rest};
  return f;
}

PermeableCorner build_permeable_corner_factor(Vec2 corner, Vec2 a,
                                              const ObstacleSector& sector,
                                              double upsilon, double speed) {
  check_upsilon(upsilon);
  const Vec2 e1 = unit_from_angle(sector.theta1);
  const Vec2 e2 = unit_from_angle(sector.theta2);
  // Face k runs from the corner along ek; normals point away from the obstacle.
  Vec2 n_first = rotate_cw(e1);
  Vec2 n_second = rotate_ccw(e2);
  Vec2 t_second = e2;
  if (dot(a, n_second) > dot(a, n_first)) {
    std::swap(n_first, n_second);
    t_second = e1;
  }
  const double alpha = std::atan2(std::abs(cross(a, n_first)), dot(a, n_first));
  if (!(alpha > 0.0 && alpha < kPi / 2.0)) {
    throw std::invalid_argument("incidence angle " + std::to_string(alpha) +
                                " is outside (0, pi/2)");
  }
  const double beta = snell_beta(alpha, upsilon);
  const Vec2 minus_b = std::cos(beta) * n_second + std::sin(beta) * t_second;

  PermeableCorner out;
  out.n1 = n_first;
  out.n2 = n_second;
  out.angles.alpha = alpha;
  out.angles.beta = beta;
  out.angles.delta = fan_sector_angle(alpha, beta);
  out.angles.upsilon = upsilon;

  ConeTwoPlanes& f = out.factor;
  f.center = corner;
  f.a = a;
  f.b = -minus_b;
  f.speed = speed;
  const SectorBranch cone{SectorBranch::Kind::Cone, {}};
  const SectorBranch plane_b{SectorBranch::Kind::Plane, minus_b};
  const SectorBranch plane_a{SectorBranch::Kind::Plane, -a};
  if (cross(-a, minus_b) > 0.0) {
    f.layout.boundaries = {-a, minus_b, a};
    f.layout.branches = {cone, plane_b, plane_a};
  } else {
    f.layout.boundaries = {a, minus_b, -a};
    f.layout.branches = {plane_b, cone, plane_a};
  }
  return out;
}

}  // namespace eikfac
