// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eikfac/analysis.hpp"
#include "eikfac/factor.hpp"
#include "eikfac/oracles.hpp"
#include "eikfac/path.hpp"
#include "eikfac/scenario.hpp"
#include "eikfac/solver.hpp"
#include "eikfac/update.hpp"

#ifndef EIKFAC_SCENARIO_DIR
#define EIKFAC_SCENARIO_DIR "scenarios"
#endif

using namespace eikfac;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const std::string& title, Outcome& o) {
  std::printf("%s criterion %d: %s |%s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              o.detail.str().c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const RectObstacle kSimpleRect{{0.0, 0.2}, {0.2, 1.0}};
const Vec2 kOrigin{0.0, 0.0};

GroundTruth linear_truth(const std::vector<Vec2>& sources, double s0, Vec2 v) {
  return AnalyticTruth{[=](Vec2 x) {
    double best = kInf;
    for (Vec2 p : sources) {
      const double fp = 1.0 / s0 + dot(v, p - sources.front());
      best = std::min(best, eval_linear_speed_solution({p, 1.0 / fp, v}, x));
    }
    return best;
  }};
}

SolverConfig global_cone(Vec2 center, double speed) {
  SolverConfig c;
  c.method = GlobalStatic{Cone{center, speed}};
  return c;
}

SolverConfig localized(const std::vector<Vec2>& centers, const std::vector<double>& speeds,
                       double r) {
  LocalizedStatic ls;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    FanEntry f;
    f.center = centers[i];
    f.factor = Cone{centers[i], speeds[i]};
    f.radius = r;
    f.origin = FanOrigin::Source;
    ls.fans.push_back(f);
  }
  SolverConfig c;
  c.method = ls;
  return c;
}

SolverConfig jit(CornerFactorKind kind) {
  SolverConfig c;
  c.method = JustInTime{0.18, 0.18, kind};
  return c;
}

void criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  ProblemSpec p;
  p.speed = LinearSpeed{2.0, {0.5, 0.0}, kOrigin};
  p.sources = {kOrigin};
  StudyOptions opt;
  opt.h0 = 1.0 / 50;
  opt.levels = 5;
  const auto r = run_refinement_study(
      p, {{"original", {}}, {"global_cone", global_cone(kOrigin, 0.5)}},
      linear_truth(p.sources, 2.0, {0.5, 0.0}), opt);
  const double order = r[1].order.linf;
  o.detail << " cone order " << fmt(order);
  o.require(order >= 0.9 && order <= 1.1, "cone order in [0.9, 1.1]");
  for (std::size_t k = 0; k < r[0].rows.size(); ++k) {
    o.require(r[0].rows[k].linf > r[1].rows[k].linf, "original error larger at level " + std::to_string(k));
  }
  o.detail << ", finest original/cone " << fmt(r[0].rows.back().linf) << "/"
           << fmt(r[1].rows.back().linf);
  const double secs = seconds_since(t0);
  o.detail << ", " << fmt(secs) << " s";
  o.require(secs < 60.0, "runtime < 60 s");
  report(1, "linear speed point source, global cone first order", o);
}

void criterion2() {
  Outcome o;
  ProblemSpec p;
  p.speed = LinearSpeed{0.5, {12.0, 0.0}, kOrigin};
  p.sources = {kOrigin};
  StudyOptions opt;
  opt.h0 = 1.0 / 50;
  opt.levels = 5;
  const auto r = run_refinement_study(
      p, {{"global_cone", global_cone(kOrigin, 2.0)}, {"localized", localized({kOrigin}, {2.0}, 0.1)}},
      linear_truth(p.sources, 0.5, {12.0, 0.0}), opt);
  const std::size_t n = r[0].rows.size();
  for (std::size_t k = n - 2; k < n; ++k) {
    o.require(r[1].rows[k].linf < r[0].rows[k].linf,
              "localized error smaller at level " + std::to_string(k));
  }
  o.detail << " finest global/localized " << fmt(r[0].rows.back().linf) << "/"
           << fmt(r[1].rows.back().linf) << ", orders " << fmt(r[0].order.linf) << "/"
           << fmt(r[1].order.linf);
  o.require(r[0].order.linf >= 0.85, "global order >= 0.85");
  o.require(r[1].order.linf >= 0.85, "localized order >= 0.85");
  report(2, "localized cone beats global cone for v=(12,0)", o);
}

void criterion3() {
  Outcome o;
  const Vec2 v{5.0, 20.0};
  const double s0 = 0.5;
  const Vec2 x1{0.8, 0.0};
  const double f0 = 1.0 / s0;
  const double f1 = f0 + dot(v, x1);
  auto problem = [&](std::vector<Vec2> src) {
    ProblemSpec p;
    p.speed = LinearSpeed{s0, v, kOrigin};
    p.sources = std::move(src);
    return p;
  };
  StudyOptions opt;
  opt.h0 = 1.0 / 50;
  opt.levels = 5;
  const auto both = run_refinement_study(
      problem({kOrigin, x1}),
      {{"localized", localized({kOrigin, x1}, {f0, f1}, 0.1)},
       {"min_cones", [&] {
          SolverConfig c;
          c.method = GlobalStatic{MinOfCones{{{kOrigin, f0}, {x1, f1}}}};
          return c;
        }()}},
      linear_truth({kOrigin, x1}, s0, v), opt);
  const auto single0 = run_refinement_study(problem({kOrigin}),
                                            {{"localized", localized({kOrigin}, {f0}, 0.1)}},
                                            linear_truth({kOrigin}, s0, v), opt);
  const auto single1 = run_refinement_study(
      problem({x1}), {{"localized", localized({x1}, {f1}, 0.1)}},
      AnalyticTruth{[&](Vec2 x) { return eval_linear_speed_solution({x1, 1.0 / f1, v}, x); }}, opt);
  for (std::size_t k = 0; k < both[0].rows.size(); ++k) {
    const double single = std::max(single0[0].rows[k].linf, single1[0].rows[k].linf);
    o.require(both[0].rows[k].linf <= 3.0 * single,
              "two-source error within 3x single-source error at level " + std::to_string(k));
  }
  const auto& loc = both[0].rows.back();
  const auto& mc = both[1].rows.back();
  o.detail << " finest two/single " << fmt(loc.linf) << "/"
           << fmt(std::max(single0[0].rows.back().linf, single1[0].rows.back().linf))
           << ", localized vs min-of-cones Linf " << fmt(loc.linf) << "/" << fmt(mc.linf)
           << " L1 " << fmt(loc.l1) << "/" << fmt(mc.l1);
  o.require(loc.linf < mc.linf, "localized Linf < min-of-cones Linf");
  o.require(loc.l1 < mc.l1, "localized L1 < min-of-cones L1");
  report(3, "two sources: min of oracles and localized beats min of cones", o);
}

std::vector<ConvergenceReport> simple_obstacle_study() {
  ProblemSpec p;
  p.obstacles = {kSimpleRect};
  p.sources = {kOrigin};
  const Vec2 corner{0.2, 0.2};
  SolverConfig sum;
  sum.method = GlobalStatic{SumOfCones{{{kOrigin, 1.0}, {corner, 1.0}}}};
  SolverConfig sw;
  sw.method = SwitchingCones{corner};
  const std::vector<MethodSpec> methods = {
      {"original", {}},
      {"global_cone", global_cone(kOrigin, 1.0)},
      {"sum_of_cones", sum},
      {"switching_cones", sw},
      {"localized_cones", jit(CornerFactorKind::ConeOnly)},
      {"localized_cone_plane", jit(CornerFactorKind::ConePlane)},
  };
  const auto oracle = std::make_shared<VisibilityOracle>(p.obstacles, p.sources);
  StudyOptions opt;
  opt.h0 = 1.0 / 50;
  opt.levels = 5;
  return run_refinement_study(p, methods, AnalyticTruth{[oracle](Vec2 x) { return oracle->distance(x); }},
                              opt);
}

void criterion4() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto r = simple_obstacle_study();
  const double best = r[5].rows.back().linf;
  o.detail << " orders";
  for (const auto& rep : r) o.detail << " " << rep.label << "=" << fmt(rep.order.linf);
  o.require(r[5].order.linf >= 0.9, "cone+plane order >= 0.9");
  o.require(r[0].order.linf <= 0.85, "original order <= 0.85");
  o.detail << "; finest Linf";
  for (std::size_t m = 0; m < r.size(); ++m) {
    o.detail << " " << fmt(r[m].rows.back().linf);
    if (m >= 1 && m <= 4) {
      o.require(r[m].rows.back().linf > best, r[m].label + " finest error > cone+plane");
    }
  }
  const double secs = seconds_since(t0);
  o.detail << ", " << fmt(secs) << " s";
  o.require(secs < 300.0, "runtime < 5 min");
  report(4, "simple obstacle, only cone+plane is first order", o);
}

void criterion5() {
  Outcome o;
  const ObstacleWorld w(Grid2D::from_bounds({0, 0}, {1, 1}, 1.0 / 400), {kSimpleRect});
  const SourceSet src(w, {kOrigin});
  const SolveResult r = fmm_solve(w, SpeedField(ConstantSpeed{}), src, jit(CornerFactorKind::ConePlane));
  std::vector<const FanEntry*> corners;
  for (const auto& f : r.fans) {
    if (f.origin == FanOrigin::Corner) corners.push_back(&f);
  }
  o.detail << " corner fans " << corners.size();
  o.require(corners.size() == 1, "exactly one corner fan");
  if (!corners.empty()) {
    const FanEntry& f = *corners.front();
    const Vec2 expect = normalized(Vec2{-1.0, -1.0});
    const double deg = std::acos(std::clamp(dot(f.a, expect), -1.0, 1.0)) * 180.0 / kPi;
    o.detail << " at (" << fmt(f.center.x) << "," << fmt(f.center.y) << "), a off by "
             << fmt(deg) << " deg";
    o.require(distance(f.center, {0.2, 0.2}) < 1e-12, "fan centered at (0.2,0.2)");
    o.require(deg <= 1.0, "a within 1 degree");
  }
  report(5, "rarefying corner identified at (0.2,0.2)", o);
}

void criterion6() {
  Outcome o;
  const double fob = 2.0 / std::sqrt(5.0);
  const RectObstacle perm{kSimpleRect.lo, kSimpleRect.hi, Permeable{fob}};
  {
    const ObstacleWorld w(Grid2D::from_bounds({0, 0}, {1, 1}, 1.0 / 200), {perm});
    const SourceSet src(w, {kOrigin});
    const SolveResult r = fmm_solve(w, SpeedField::with_obstacles(ConstantSpeed{}, {perm}), src,
                                    jit(CornerFactorKind::ConePlane));
    const FanEntry* fan = nullptr;
    for (const auto& f : r.fans) {
      if (f.origin == FanOrigin::Corner && distance(f.center, {0.2, 0.2}) < 1e-12) fan = &f;
    }
    o.require(fan != nullptr && fan->snell.has_value(), "permeable fan at (0.2,0.2)");
    if (fan != nullptr && fan->snell) {
      const SnellAngles& s = *fan->snell;
      o.detail << " alpha/beta/delta err " << fmt(std::abs(s.alpha - kPi / 4)) << "/"
               << fmt(std::abs(s.beta - kPi / 3)) << "/" << fmt(std::abs(s.delta - kPi / 12));
      o.require(std::abs(s.alpha - kPi / 4) <= 1e-9, "alpha = pi/4");
      o.require(std::abs(s.beta - kPi / 3) <= 1e-9, "beta = pi/3");
      o.require(std::abs(s.delta - kPi / 12) <= 1e-9, "delta = pi/12");
    }
  }
  ProblemSpec p;
  p.obstacles = {perm};
  p.sources = {kOrigin};
  StudyOptions opt;
  opt.h0 = 1.0 / 50;
  opt.levels = 4;
  const auto r = run_refinement_study(
      p, {{"original", {}}, {"cone_two_planes", jit(CornerFactorKind::ConePlane)}},
      FineGridTruth{1.0 / 1600, jit(CornerFactorKind::ConePlane)}, opt);
  o.detail << ", orders original/cone+2 planes " << fmt(r[0].order.linf) << "/"
           << fmt(r[1].order.linf);
  o.require(r[1].order.linf >= 0.9, "cone+2 planes order >= 0.9");
  o.require(r[0].order.linf < r[1].order.linf, "original order lower");
  report(6, "permeable obstacle angles and first order", o);
}

void criterion7() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> alpha(0.0, kPi / 2);
  std::uniform_real_distribution<double> big(std::sqrt(2.0), 10.0);
  std::uniform_real_distribution<double> ups(1.0, 3.0);
  int bad_beta = 0;
  int bad_delta = 0;
  for (int n = 0; n < 1000; ++n) {
    const double a = alpha(rng);
    if (snell_beta(a, big(rng)) != kPi / 2) ++bad_beta;
    if (snell_beta(a, std::sqrt(2.0)) != kPi / 2) ++bad_beta;
    if (fan_sector_angle(a, snell_beta(a, 1.0)) != 0.0) ++bad_delta;
  }
  o.require(bad_beta == 0, "beta = pi/2 exactly for upsilon >= sqrt 2");
  o.require(bad_delta == 0, "delta = 0 exactly for upsilon = 1");
  double worst = 0.0;
  int tested = 0;
  while (tested < 1000) {
    const double th1 = alpha(rng);
    const double u = ups(rng);
    const SnellAngles s = refract_angles(th1, u);
    if (s.total_internal_reflection) continue;
    ++tested;
    const double f_free = 1.0;
    const double f_ob = f_free / u;
    worst = std::max(worst, std::abs(std::cos(s.theta2) / f_ob - std::sin(s.theta3) / f_free));
  }
  o.detail << " beta/delta exact misses " << bad_beta << "/" << bad_delta
           << ", worst exit-law residual " << fmt(worst);
  o.require(worst <= 1e-12, "exit refraction residual <= 1e-12");
  report(7, "Snell suite", o);
}

double trajectory_length(const SolverConfig& cfg) {
  const ObstacleWorld w(Grid2D::from_bounds({0, 0}, {1, 1}, 1.0 / 200), {kSimpleRect});
  const SourceSet src(w, {kOrigin});
  const SolveResult r = fmm_solve(w, SpeedField(ConstantSpeed{}), src, cfg);
  const Trajectory t = extract_trajectory(r.u, w, {0.4, 0.9}, {kOrigin});
  return t.status == TrajectoryStatus::ReachedSource ? t.length : kInf;
}

void criterion8() {
  Outcome o;
  const double ref = 1.010850;
  const double fac = trajectory_length(jit(CornerFactorKind::ConePlane));
  const double unf = trajectory_length({});
  o.detail << " factored " << fmt(fac) << " (rel err " << fmt(std::abs(fac - ref) / ref)
           << "), unfactored " << fmt(unf) << " (rel err " << fmt(std::abs(unf - ref) / ref) << ")";
  o.require(std::abs(fac - ref) <= 0.01 * ref, "factored within 1%");
  o.require(std::abs(unf - ref) >= std::abs(fac - ref), "unfactored error at least as large");
  report(8, "trajectory length around the obstacle", o);
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void criterion9() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> val(0.0, 2.0);
  std::uniform_real_distribution<double> hs(1e-3, 0.2);
  std::uniform_real_distribution<double> fs(0.2, 3.0);
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  std::bernoulli_distribution missing(0.15);
  int equiv_bad = 0;
  int causal_bad = 0;
  for (int n = 0; n < 100000; ++n) {
    double v[4];
    for (double& x : v) x = missing(rng) ? kInf : val(rng);
    if (std::isinf(std::min({v[0], v[1], v[2], v[3]}))) v[0] = val(rng);
    const double h = hs(rng);
    const double F = fs(rng);
    const double uH = std::min(v[0], v[1]);
    const double uV = std::min(v[2], v[3]);
    const NeighborData plain{{v[0], v[0]}, {v[1], v[1]}, {v[2], v[2]}, {v[3], v[3]}};
    const UpdateResult zf = factored_update(plain, {0, 0}, 0.0, h, F);
    const UpdateResult uf = unfactored_update(uH, uV, h, F);
    if (!same_bits(zf.value, uf.value) || zf.branch != uf.branch) ++equiv_bad;

    const Vec2 c{pos(rng), pos(rng)};
    const Vec2 x{pos(rng), pos(rng)};
    auto T = [&](Vec2 q) { return distance(q, c) / F; };
    const double r = distance(x, c);
    const Vec2 grad = r > 0 ? (1.0 / (r * F)) * (x - c) : Vec2{};
    const Vec2 off[4] = {{-h, 0}, {h, 0}, {0, -h}, {0, h}};
    NeighborData nb;
    AxisNeighbor* slots[4] = {&nb.h_lo, &nb.h_hi, &nb.v_lo, &nb.v_hi};
    for (int s = 0; s < 4; ++s) *slots[s] = {v[s], v[s] - T(x + off[s])};
    const UpdateResult fr = factored_update(nb, grad, T(x), h, F);
    if (fr.value < std::min(uH, uV)) ++causal_bad;
    if (fr.branch == UpdateBranch::TwoSidedQuadratic && fr.value < std::max(uH, uV)) ++causal_bad;
  }
  o.detail << " T=0 mismatches " << equiv_bad << ", causality violations " << causal_bad;
  o.require(equiv_bad == 0, "T=0 equivalence on 1e5 cases");
  o.require(causal_bad == 0, "monotone causality on 1e5 cases");

  // Seam placement and gradients of the corner factors.
  const Vec2 xc{0.2, 0.2};
  const Vec2 a = normalized(Vec2{-1, -1});
  const ObstacleSector nw{kPi / 2, kPi};
  const ConePlane cp = build_corner_factor(xc, a, nw, 1.0);
  const PermeableCorner pc = build_permeable_corner_factor(xc, a, nw, std::sqrt(5.0) / 2, 1.0);
  auto jump = [&](const FactorFunction& f, Vec2 dir) {
    const double th = polar_angle(dir);
    return std::abs(factor_value(f, xc + 0.18 * unit_from_angle(th + 1e-9)) -
                    factor_value(f, xc + 0.18 * unit_from_angle(th - 1e-9)));
  };
  const bool seams = jump(cp, -1.0 * a) < 1e-7 && jump(cp, cp.c) > 1e-3 &&
                     jump(pc.factor, -1.0 * a) < 1e-7 && jump(pc.factor, -1.0 * pc.factor.b) < 1e-7 &&
                     jump(pc.factor, a) > 1e-3;
  o.require(seams, "seam continuity and hidden-seam placement");
  double worst_rel = 0.0;
  std::uniform_real_distribution<double> ang(0.0, 2 * kPi);
  std::uniform_real_distribution<double> rad(0.02, 0.18);
  for (const FactorFunction& f : {FactorFunction(cp), FactorFunction(pc.factor)}) {
    const auto& bounds = std::holds_alternative<ConePlane>(f) ? cp.layout.boundaries
                                                              : pc.factor.layout.boundaries;
    for (int n = 0; n < 2000; ++n) {
      const double th = ang(rng);
      const double rr = rad(rng);
      const Vec2 x = xc + rr * unit_from_angle(th);
      const int sec = sector_classify(x, xc, bounds);
      if (sector_classify(xc + rr * unit_from_angle(th + 1e-4), xc, bounds) != sec ||
          sector_classify(xc + rr * unit_from_angle(th - 1e-4), xc, bounds) != sec) {
        continue;
      }
      const double s = 1e-6;
      const Vec2 fd{(factor_value(f, x + Vec2{s, 0}) - factor_value(f, x - Vec2{s, 0})) / (2 * s),
                    (factor_value(f, x + Vec2{0, s}) - factor_value(f, x - Vec2{0, s})) / (2 * s)};
      const Vec2 g = eval_factor(f, x).grad;
      worst_rel = std::max(worst_rel, norm(g - fd) / norm(g));
    }
  }
  o.detail << ", grad T vs FD worst rel " << fmt(worst_rel);
  o.require(worst_rel <= 1e-5, "grad T vs finite differences <= 1e-5 relative");

  // Acceptance order on every bundled scenario.
  int scenarios = 0;
  std::vector<std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(EIKFAC_SCENARIO_DIR)) {
    if (e.path().extension() == ".json") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    const Scenario sc = load_scenario(file);
    const Problem p = make_problem(sc.problem, sc.h);
    SolveResult r;
    try {
      r = fmm_solve(p.world, p.speed, p.sources, to_solver_config(sc.solver, sc.problem));
    } catch (const std::exception& e) {
      o.require(false, sc.name + " solve: " + e.what());
      continue;
    }
    bool mono = true;
    for (std::size_t n = 1; n < r.accepted_order.size(); ++n) {
      mono = mono && r.u[r.accepted_order[n - 1]] <= r.u[r.accepted_order[n]];
    }
    o.require(mono, sc.name + " acceptance order monotone");
    ++scenarios;
  }
  o.detail << ", monotone acceptance on " << scenarios << " scenarios";
  o.require(scenarios >= 8, "all bundled scenarios found");
  report(9, "property suites", o);
}

double timed_solve(const Problem& p, const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  const SolveResult r = fmm_solve(p.world, p.speed, p.sources, cfg);
  const double s = seconds_since(t0);
  if (r.accepted_order.empty()) return kInf;
  return s;
}

void criterion10() {
  Outcome o;
  const Scenario sc = load_scenario(std::string(EIKFAC_SCENARIO_DIR) + "/maze_constant.json");
  const SolverConfig cfg = to_solver_config(sc.solver, sc.problem);
  const Problem coarse = make_problem(sc.problem, 1.0 / 800);
  const Problem fine = make_problem(sc.problem, 1.0 / 1600);
  double tc = kInf;
  double tf = kInf;
  for (int rep = 0; rep < 3; ++rep) {
    tc = std::min(tc, timed_solve(coarse, cfg));
    tf = std::min(tf, timed_solve(fine, cfg));
  }
  const double ratio = tf / tc;
  o.detail << " 801^2 " << fmt(tc) << " s, 1601^2 " << fmt(tf) << " s, ratio " << fmt(ratio);
  o.require(ratio <= 4.6, "runtime ratio <= 4.6");
  report(10, "maze runtime scaling", o);
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> all = {criterion1, criterion2, criterion3, criterion4,
                                                  criterion5, criterion6, criterion7, criterion8,
                                                  criterion9, criterion10};
  for (std::size_t i = 0; i < all.size(); ++i) {
    try {
      all[i]();
    } catch (const std::exception& e) {
      std::printf("FAIL criterion %zu: exception: %s\n", i + 1, e.what());
      ++failures;
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, all.size());
  return failures == 0 ? 0 : 1;
}
