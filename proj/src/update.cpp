#include "eikfac/update.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eikfac {

namespace {

// p, q: shifted upwind tau values (tau_H - h kH Tx, tau_V - h kV Ty); +inf when
// the axis has no neighbor. uH, uV: the selected neighbor u values.
UpdateResult solve_shifted(double p, double q, double uH, double uV, double t_node,
                           double h, double F) {
  const bool has_h = uH < kInf;
  const bool has_v = uV < kInf;
  if (!has_h && !has_v) {
    throw std::invalid_argument("update needs at least one available neighbor");
  }
  const double step = h / F;

  UpdateResult r;
  if (has_h && has_v) {
    const double d = p - q;
    const double disc = 2.0 * step * step - d * d;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      const double lower = std::max(uH, uV);
      for (double tau : {0.5 * (p + q - s), 0.5 * (p + q + s)}) {
        const double u = t_node + tau;
        if (u >= lower) {
          r.tau = tau;
          r.value = u;
          r.branch = UpdateBranch::TwoSidedQuadratic;
          return r;
        }
      }
    }
  }

  // One-sided fallback; ties go to the horizontal axis.
  double base_tau;
  double base_u;
  if (has_h && (!has_v || p <= q)) {
    base_tau = p;
    base_u = uH;
  } else {
    base_tau = q;
    base_u = uV;
  }
  r.tau = base_tau + step;
  r.value = t_node + r.tau;
  r.branch = UpdateBranch::OneSided;
  if (r.value < base_u) {
    r.value = base_u;
    r.tau = base_u - t_node;
    r.clamped = true;
  }
  return r;
}

}  // namespace

UpwindPick select_upwind(const AxisNeighbor& lo, const AxisNeighbor& hi) {
  if (hi.u < lo.u) return {hi.u, hi.tau, -1};
  return {lo.u, lo.tau, 1};
}

UpdateResult unfactored_update(double uH, double uV, double h, double F) {
  return solve_shifted(uH, uV, uH, uV, 0.0, h, F);
}

UpdateResult factored_update(const NeighborData& nb, Vec2 grad_t, double t_node,
                             double h, double F) {
  const UpwindPick ph = select_upwind(nb.h_lo, nb.h_hi);
  const UpwindPick pv = select_upwind(nb.v_lo, nb.v_hi);
  const double p = ph.available() ? ph.tau - h * ph.k * grad_t.x : kInf;
  const double q = pv.available() ? pv.tau - h * pv.k * grad_t.y : kInf;
  return solve_shifted(p, q, ph.u, pv.u, t_node, h, F);
}

}  // namespace eikfac
