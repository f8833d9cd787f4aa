#include "eikfac/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>

namespace eikfac {

double eval_linear_speed_solution(const LinearSpeedProblem& p, Vec2 x) {
  const Vec2 d = x - p.x0;
  const double vn = norm(p.v);
  if (vn < 1e-14) return p.s0 * norm(d);
  const double f = 1.0 / p.s0 + dot(p.v, d);
  if (!(f > 0.0)) {
    throw std::domain_error("linear speed is not positive at the query point");
  }
  // arccosh(1 + z) = log1p(z + sqrt(z (z + 2))), accurate for small z.
  const double z = std::max(0.0, 0.5 * p.s0 * vn * vn * dot(d, d) / f);
  return std::log1p(z + std::sqrt(z * (z + 2.0))) / vn;
}

namespace {

double sample(const std::function<double(Vec2)>& F, Vec2 p) {
  const double f = F(p);
  if (!(f > 0.0)) {
    throw std::domain_error("speed is not positive along the segment");
  }
  return 1.0 / f;
}

double adaptive_simpson(const std::function<double(double)>& g, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = g(lm);
  const double frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double line_integrated_time(Vec2 x0, Vec2 x, const std::function<double(Vec2)>& F) {
  const Vec2 d = x - x0;
  const double len = norm(d);
  if (len == 0.0) return 0.0;
  const std::function<double(double)> g = [&](double t) { return sample(F, x0 + t * d); };
  const double fa = g(0.0);
  const double fm = g(0.5);
  const double fb = g(1.0);
  const double whole = (fa + 4.0 * fm + fb) / 6.0;
  const double tol = 1e-12 / len;
  return len * adaptive_simpson(g, 0.0, 1.0, fa, fm, fb, whole, tol, 50);
}

bool segment_crosses_rect(Vec2 p, Vec2 q, const RectObstacle& r) {
  // Liang-Barsky clip against the closed rectangle; the clipped piece lies in
  // the open rectangle iff its midpoint does (the rectangle is convex).
  double t0 = 0.0;
  double t1 = 1.0;
  const Vec2 d = q - p;
  const double pk[4] = {-d.x, d.x, -d.y, d.y};
  const double qk[4] = {p.x - r.lo.x, r.hi.x - p.x, p.y - r.lo.y, r.hi.y - p.y};
  for (int k = 0; k < 4; ++k) {
    if (pk[k] == 0.0) {
      if (qk[k] < 0.0) return false;
      continue;
    }
    const double t = qk[k] / pk[k];
    if (pk[k] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  const Vec2 mid = p + (0.5 * (t0 + t1)) * d;
  const double scale = std::max({1.0, std::abs(r.hi.x - r.lo.x), std::abs(r.hi.y - r.lo.y)});
  return r.strictly_contains(mid, 1e-12 * scale);
}

VisibilityOracle::VisibilityOracle(std::vector<RectObstacle> obstacles,
                                   std::vector<Vec2> sources)
    : obstacles_(std::move(obstacles)) {
  if (sources.empty()) throw std::invalid_argument("visibility oracle needs a source");
  for (const auto& ob : obstacles_) {
    if (ob.permeable()) {
      throw std::invalid_argument("visibility oracle supports non-permeable obstacles only");
    }
  }
  vertices_ = sources;
  for (const auto& ob : obstacles_) {
    for (Vec2 c : {ob.lo, Vec2{ob.hi.x, ob.lo.y}, ob.hi, Vec2{ob.lo.x, ob.hi.y}}) {
      bool inside = false;
      for (const auto& other : obstacles_) {
        if (other.strictly_contains(c, 0.0)) inside = true;
      }
      if (!inside) vertices_.push_back(c);
    }
  }

  const std::size_t n = vertices_.size();
  dist_.assign(n, kInf);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    dist_[s] = 0.0;
    pq.push({0.0, s});
  }
  std::vector<char> done(n, 0);
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    if (done[v]) continue;
    done[v] = 1;
    for (std::size_t w = 0; w < n; ++w) {
      if (done[w]) continue;
      const double nd = d + eikfac::distance(vertices_[v], vertices_[w]);
      if (nd < dist_[w] && visible(vertices_[v], vertices_[w])) {
        dist_[w] = nd;
        pq.push({nd, w});
      }
    }
  }
}

bool VisibilityOracle::visible(Vec2 p, Vec2 q) const {
  return std::none_of(obstacles_.begin(), obstacles_.end(),
                      [&](const RectObstacle& r) { return segment_crosses_rect(p, q, r); });
}

double VisibilityOracle::distance(Vec2 x) const {
  for (const auto& ob : obstacles_) {
    if (ob.strictly_contains(x, 0.0)) return kInf;
  }
  double best = kInf;
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    if (!(dist_[v] < kInf)) continue;
    const double cand = dist_[v] + eikfac::distance(x, vertices_[v]);
    if (cand < best && visible(vertices_[v], x)) best = cand;
  }
  return best;
}

double visibility_distance(Vec2 x, const std::vector<Vec2>& sources,
                           const std::vector<RectObstacle>& obstacles) {
  return VisibilityOracle(obstacles, sources).distance(x);
}

}  // namespace eikfac
