#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "eikfac/geometry.hpp"

namespace eikfac {

struct ZeroFactor {};

/// T(x) = |x - center| / speed
struct Cone {
  Vec2 center;
  double speed = 1.0;
};

/// Formula used inside one angular sector of a piecewise factor.
struct SectorBranch {
  enum class Kind : std::uint8_t { Cone, Plane, Zero };
  Kind kind = Kind::Cone;
  Vec2 dir;  // Plane: T = dir . (x - center) / speed
};

/// Sector k spans counterclockwise from boundaries[k] to boundaries[k+1]
/// (wrapping). A direction on a seam belongs to the lower-index sector.
struct SectorLayout {
  std::vector<Vec2> boundaries;
  std::vector<SectorBranch> branches;
};

/// Cone inside the fan sector S0 (between c and -a, sector 0 of the layout)
/// and the plane -a . (x - center) / speed elsewhere. With cone_in_s0_only the
/// plane is replaced by zero.
struct ConePlane {
  Vec2 center;
  Vec2 a;
  Vec2 c;
  double speed = 1.0;
  bool cone_in_s0_only = false;
  SectorLayout layout;
};

/// Cone between -a and -b, plane along -b between -b and a, plane along -a on
/// the rest. Discontinuous only across the +a ray.
struct ConeTwoPlanes {
  Vec2 center;
  Vec2 a;
  Vec2 b;
  double speed = 1.0;
  SectorLayout layout;
};

struct MinOfCones {
  std::vector<Cone> cones;
};
struct SumOfCones {
  std::vector<Cone> cones;
};

using FactorFunction =
    std::variant<ZeroFactor, Cone, ConePlane, ConeTwoPlanes, MinOfCones, SumOfCones>;

struct FactorValue {
  double value = 0.0;
  Vec2 grad;
};

/// Value and analytic gradient. The gradient of a cone at its own center is
/// the zero vector.
FactorValue eval_factor(const FactorFunction& t, Vec2 x);
double factor_value(const FactorFunction& t, Vec2 x);

/// Center of the factor's singularity, when it has a single one.
std::optional<Vec2> factor_center(const FactorFunction& t);

inline constexpr int kAtCenter = -1;

/// Index of the sector containing direction x - center, or kAtCenter.
int sector_classify(Vec2 x, Vec2 center, const std::vector<Vec2>& boundaries);

/// beta from sin(beta) = min(sqrt(upsilon^2 - sin^2 alpha), 1). Throws
/// std::invalid_argument for upsilon < 1.
double snell_beta(double alpha, double upsilon);

/// alpha + beta - pi/2, clamped at 0.
double fan_sector_angle(double alpha, double beta);

struct SnellAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double upsilon = 1.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;
  bool total_internal_reflection = false;
};

/// Double refraction through a corner region: theta2 inside the obstacle,
/// theta3 on exit. Throws std::invalid_argument for upsilon < 1.
SnellAngles refract_angles(double theta1, double upsilon);

/// Obstacle sector [theta1, theta2] at a corner (counterclockwise, radians).
struct ObstacleSector {
  double theta1 = 0.0;
  double theta2 = 0.0;
  /// True when direction d lies in the closed sector.
  bool contains(Vec2 d, double tol = 1e-12) const;
};

/// Cone+plane factor at a rarefying corner of a non-permeable obstacle.
/// Throws std::invalid_argument when -a lies in the closed obstacle sector.
ConePlane build_corner_factor(Vec2 corner, Vec2 a, const ObstacleSector& sector,
                              double speed, bool cone_in_s0_only = false);

struct PermeableCorner {
  ConeTwoPlanes factor;
  SnellAngles angles;
  Vec2 n1;  // outward normal of the face the characteristic enters through
  Vec2 n2;
};

/// Cone+2-planes factor at a corner of a permeable obstacle. Throws
/// std::invalid_argument when alpha is outside (0, pi/2) or upsilon < 1.
PermeableCorner build_permeable_corner_factor(Vec2 corner, Vec2 a,
                                              const ObstacleSector& sector,
                                              double upsilon, double speed);

}  // namespace eikfac
