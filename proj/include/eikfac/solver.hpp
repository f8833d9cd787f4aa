#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "eikfac/domain.hpp"
#include "eikfac/factor.hpp"

namespace eikfac {

enum class NodeStatus : std::uint8_t { Far, Considered, Accepted };

enum class FanOrigin : std::uint8_t { Source, Corner, Static };

/// Localized factor T applied to nodes within `radius` of `center`.
struct FanEntry {
  Vec2 center;
  FactorFunction factor;
  double radius = 0.0;
  FanOrigin origin = FanOrigin::Static;
  // Corner fans only.
  std::size_t node = 0;
  int obstacle = -1;
  Vec2 a;
  std::optional<SnellAngles> snell;
};

struct OriginalMethod {};
struct GlobalStatic {
  FactorFunction factor;
};
struct LocalizedStatic {
  std::vector<FanEntry> fans;
};
/// Global cone at the source(s) until `corner` is accepted, then a global cone
/// centered at `corner`.
struct SwitchingCones {
  Vec2 corner;
};

enum class CornerFactorKind : std::uint8_t { ConePlane, ConeOnly, ConeInS0Only };

struct JustInTime {
  double radius = 0.18;
  double source_radius = 0.18;
  CornerFactorKind corner_factor = CornerFactorKind::ConePlane;
};

using Method =
    std::variant<OriginalMethod, GlobalStatic, LocalizedStatic, SwitchingCones, JustInTime>;

enum class BallMode : std::uint8_t { None, ZeroOnBall, ConeOnBall, LineIntegratedBall };

struct BallInit {
  BallMode mode = BallMode::None;
  double radius = 0.1;
};

struct SolverConfig {
  Method method = OriginalMethod{};
  BallInit ball;
};

struct SolveStats {
  std::size_t updates = 0;
  std::size_t accepted = 0;
  std::size_t heap_peak = 0;
  std::size_t one_sided_clamps = 0;
  // Tentative values raised to the value of the node being accepted.
  std::size_t order_clamps = 0;
  std::size_t corners_tested = 0;
};

struct SolveResult {
  std::vector<double> u;  // +inf on excluded and unreachable nodes
  std::vector<std::size_t> accepted_order;
  std::vector<FanEntry> fans;
  std::vector<int> factor_owner;  // fan used for the last successful update, -1 for T = 0
  SolveStats stats;
  std::size_t unreachable = 0;
  std::vector<std::string> warnings;
};

/// Runs the marching solve. Throws std::invalid_argument for invalid
/// configurations and std::logic_error if acceptance order ever decreases.
SolveResult fmm_solve(const ObstacleWorld& world, const SpeedField& speed,
                      const SourceSet& sources, const SolverConfig& config);

inline constexpr int kNoFan = -1;

/// Fan whose center is nearest to x among those with |x - center| <= radius;
/// ties go to the earliest fan. Corner fans are skipped when
/// `skip_corner_fans` is set. A fan is also skipped when the segment from its
/// center to x crosses an obstacle interior, unless x lies inside that
/// obstacle and it is permeable.
int choose_fan(Vec2 x, std::span<const FanEntry> fans, bool skip_corner_fans = false,
               std::span<const RectObstacle> obstacles = {});

FactorFunction choose_factor(Vec2 x, std::span<const FanEntry> fans,
                             std::span<const RectObstacle> obstacles = {});

/// -grad u / |grad u| at node k from one-sided differences toward the smaller
/// accepted neighbor on each axis. Throws std::domain_error if the gradient
/// vanishes.
Vec2 approximate_characteristic_direction(const ObstacleWorld& world, std::size_t k,
                                          std::span<const double> u,
                                          std::span<const NodeStatus> status);

/// Which outer domain edges a node sits on.
struct DomainEdges {
  bool left = false;
  bool right = false;
  bool bottom = false;
  bool top = false;
};

DomainEdges domain_edges_at(const Grid2D& grid, std::size_t k);

struct CornerSetup {
  Vec2 position;
  ObstacleSector sector;
  DomainEdges edges;
  bool permeable = false;
  double upsilon = 1.0;      // free speed / obstacle speed
  double free_speed = 1.0;   // speed of the cone and planes
  CornerFactorKind kind = CornerFactorKind::ConePlane;
};

struct CornerDecision {
  bool rarefying = false;
  FactorFunction factor;
  std::optional<SnellAngles> snell;
  std::string warning;
};

/// Regular when -a lies in the closed obstacle sector or points out of (or
/// along) an outer domain edge; otherwise builds the corner factor.
CornerDecision detect_rarefying_corner(const CornerSetup& corner, Vec2 a);

struct SeedValue {
  std::size_t node;
  double u;
};

/// Initial fixed values: the sources alone, or all nodes of each source ball.
/// Throws std::invalid_argument when a ball holds no node besides its source.
std::vector<SeedValue> initialize_sources(const ObstacleWorld& world, const SpeedField& speed,
                                          const SourceSet& sources, const BallInit& ball);

}  // namespace eikfac
