#pragma once

#include <cstdint>

#include "eikfac/geometry.hpp"

namespace eikfac {

/// One grid neighbor as seen by the update. A missing neighbor has u = +inf.
struct AxisNeighbor {
  double u = kInf;
  double tau = kInf;
};

/// Neighbor values around node (i, j). `lo` is the (i-1) / (j-1) node,
/// `hi` the (i+1) / (j+1) node.
struct NeighborData {
  AxisNeighbor h_lo, h_hi;
  AxisNeighbor v_lo, v_hi;
};

/// The neighbor chosen on one axis. k = +1 means the lower-index node was
/// chosen, k = -1 the upper one.
struct UpwindPick {
  double u = kInf;
  double tau = kInf;
  int k = 1;
  bool available() const { return u < kInf; }
};

/// Smaller-u neighbor of the pair; equal values pick the lower-index node.
UpwindPick select_upwind(const AxisNeighbor& lo, const AxisNeighbor& hi);

enum class UpdateBranch : std::uint8_t { TwoSidedQuadratic, OneSided };

struct UpdateResult {
  double value = kInf;  // u
  double tau = kInf;
  UpdateBranch branch = UpdateBranch::OneSided;
  // The one-sided value was raised to the neighbor it was computed from.
  bool clamped = false;
};

/// First-order upwind update from the smaller horizontal and vertical
/// neighbor values. +inf marks a missing neighbor. Throws
/// std::invalid_argument when both are missing.
UpdateResult unfactored_update(double uH, double uV, double h, double F);

/// Additively factored update u = T + tau. `grad_t` and `t_node` describe the
/// factor at the node; neighbor tau values must already be u - T(neighbor).
UpdateResult factored_update(const NeighborData& nb, Vec2 grad_t, double t_node,
                             double h, double F);

}  // namespace eikfac
