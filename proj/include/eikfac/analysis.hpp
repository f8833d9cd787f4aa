#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "eikfac/domain.hpp"
#include "eikfac/solver.hpp"

namespace eikfac {

struct ErrorNorms {
  double linf = 0.0;
  double l1 = 0.0;
  std::size_t count = 0;
};

/// L-infinity and h^2-weighted L1 norms of u - ref over nodes with mask != 0.
/// Throws std::invalid_argument for an empty mask or mismatched sizes.
ErrorNorms error_norms(std::span<const double> u, std::span<const double> ref,
                       std::span<const std::uint8_t> mask, double h);

/// Values of the fine field at the coarse nodes. Both grids must share their
/// origin and coarse h must be an integer multiple of fine h.
std::vector<double> restrict_fine_to_coarse(std::span<const double> fine, const Grid2D& fine_grid,
                                            const Grid2D& coarse_grid);

struct ConvergenceRow {
  double h = 0.0;
  double linf = 0.0;
  double l1 = 0.0;
  double runtime_s = 0.0;
};

struct ObservedOrder {
  double linf = 0.0;
  double l1 = 0.0;
  std::vector<std::string> warnings;
};

/// Least-squares slope of ln(error) against ln(h) over the last `tail` rows.
/// Rows with zero error are dropped with a warning. Throws when tail < 2 or
/// fewer than two usable rows remain.
ObservedOrder fit_observed_order(std::span<const ConvergenceRow> rows, std::size_t tail);

struct ConvergenceReport {
  std::string label;
  std::vector<ConvergenceRow> rows;
  std::size_t tail = 3;
  ObservedOrder order;
};

/// Everything needed to build a solve at a given h.
struct ProblemSpec {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{1.0, 1.0};
  BaseSpeed speed = ConstantSpeed{};
  std::vector<RectObstacle> obstacles;
  std::vector<Vec2> sources;
};

struct Problem {
  ObstacleWorld world;
  SpeedField speed;
  SourceSet sources;
};

Problem make_problem(const ProblemSpec& spec, double h);

struct MethodSpec {
  std::string label;
  SolverConfig config;
};

/// Exact solution as a function of position.
struct AnalyticTruth {
  std::function<double(Vec2)> eval;
};
/// Self-convergence against a nested solve on a finer grid.
struct FineGridTruth {
  double h = 0.0;
  SolverConfig config;
};
using GroundTruth = std::variant<AnalyticTruth, FineGridTruth>;

struct StudyOptions {
  double h0 = 0.02;
  std::size_t levels = 5;  // h = h0 / 2^k, k = 0..levels-1
  std::size_t tail = 3;
  bool parallel = true;
};

/// Solves every (method, level) pair and compares with the ground truth. The
/// result is ordered like `methods` and independent of scheduling.
std::vector<ConvergenceReport> run_refinement_study(const ProblemSpec& problem,
                                                    const std::vector<MethodSpec>& methods,
                                                    const GroundTruth& truth,
                                                    const StudyOptions& options);

/// Mask of nodes that are not excluded and finite in both fields.
std::vector<std::uint8_t> comparison_mask(const ObstacleWorld& world, std::span<const double> u,
                                          std::span<const double> ref);

}  // namespace eikfac
