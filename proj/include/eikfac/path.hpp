#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eikfac/domain.hpp"

namespace eikfac {

/// Bilinear interpolation of node gradients (central differences, one-sided
/// next to infinite values). Cells with infinite corners use inverse-distance
/// weights over the finite ones. Throws std::domain_error when all four
/// corners are infinite.
Vec2 interpolate_gradient(std::span<const double> u, const ObstacleWorld& world, Vec2 p);

/// Interpolated value with the same corner rule as interpolate_gradient.
double interpolate_value(std::span<const double> u, const ObstacleWorld& world, Vec2 p);

enum class TrajectoryStatus : std::uint8_t { ReachedSource, MaxSteps, Stalled };

struct Trajectory {
  std::vector<Vec2> points;
  double length = 0.0;
  TrajectoryStatus status = TrajectoryStatus::MaxSteps;
  std::size_t monotonicity_violations = 0;
};

struct TrajectoryOptions {
  double step_fraction = 0.5;     // step = step_fraction * h
  double capture_fraction = 1.0;  // stop within capture_fraction * h of a source
  std::size_t max_steps = 100000;
};

/// Midpoint-rule descent along -grad u / |grad u| from `start`. Steps that
/// would enter a non-permeable obstacle are projected onto its nearest face,
/// and a step whose segment cuts through one goes to the vertex it cuts.
/// Throws std::invalid_argument when start lies inside such an obstacle.
Trajectory extract_trajectory(std::span<const double> u, const ObstacleWorld& world, Vec2 start,
                              const std::vector<Vec2>& sources,
                              const TrajectoryOptions& options = {});

}  // namespace eikfac
