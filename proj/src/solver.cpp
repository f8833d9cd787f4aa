#include "eikfac/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "eikfac/heap.hpp"
#include "eikfac/oracles.hpp"
#include "eikfac/update.hpp"

namespace eikfac {

namespace {

constexpr int kDi[4] = {-1, 1, 0, 0};
constexpr int kDj[4] = {0, 0, -1, 1};

// Uniform bins over the domain; each fan is listed in every bin its ball
// touches, in insertion order.
class FanIndex {
 public:
  FanIndex(const Grid2D& grid, double bin) : origin_(grid.origin()) {
    const Vec2 ext = grid.upper() - grid.origin();
    bin_ = std::max(bin, grid.h());
    nbx_ = static_cast<int>(std::floor(ext.x / bin_)) + 1;
    nby_ = static_cast<int>(std::floor(ext.y / bin_)) + 1;
    bins_.resize(static_cast<std::size_t>(nbx_) * static_cast<std::size_t>(nby_));
  }

  void add(int id, Vec2 center, double r) {
    const int i0 = clamp_x(std::floor((center.x - r - origin_.x) / bin_));
    const int i1 = clamp_x(std::floor((center.x + r - origin_.x) / bin_));
    const int j0 = clamp_y(std::floor((center.y - r - origin_.y) / bin_));
    const int j1 = clamp_y(std::floor((center.y + r - origin_.y) / bin_));
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) bins_[slot(i, j)].push_back(id);
    }
  }

  const std::vector<int>& at(Vec2 p) const {
    const int i = clamp_x(std::floor((p.x - origin_.x) / bin_));
    const int j = clamp_y(std::floor((p.y - origin_.y) / bin_));
    return bins_[slot(i, j)];
  }

 private:
  int clamp_x(double v) const { return std::clamp(static_cast<int>(v), 0, nbx_ - 1); }
  int clamp_y(double v) const { return std::clamp(static_cast<int>(v), 0, nby_ - 1); }
  std::size_t slot(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nbx_) +
           static_cast<std::size_t>(i);
  }

  Vec2 origin_;
  double bin_ = 1.0;
  int nbx_ = 1;
  int nby_ = 1;
  std::vector<std::vector<int>> bins_;
};

bool fan_sees(Vec2 center, Vec2 x, std::span<const RectObstacle> obstacles) {
  for (const RectObstacle& ob : obstacles) {
    if (!segment_crosses_rect(center, x, ob)) continue;
    if (!ob.permeable() || !ob.strictly_contains(x, 0.0)) return false;
  }
  return true;
}

int nearest_fan(Vec2 x, std::span<const FanEntry> fans, const std::vector<int>& candidates,
                bool skip_corner_fans, std::span<const RectObstacle> obstacles) {
  int best = kNoFan;
  double best_d = kInf;
  for (int id : candidates) {
    const FanEntry& f = fans[static_cast<std::size_t>(id)];
    if (skip_corner_fans && f.origin == FanOrigin::Corner) continue;
    const double d = distance(x, f.center);
    if (d <= f.radius && d < best_d && fan_sees(f.center, x, obstacles)) {
      best_d = d;
      best = id;
    }
  }
  return best;
}

FactorFunction source_factor(const SourceSet& sources, const SpeedField& speed) {
  std::vector<Cone> cones;
  for (Vec2 p : sources.points()) cones.push_back({p, speed.free_speed(p)});
  if (cones.size() == 1) return cones.front();
  return MinOfCones{cones};
}

struct Solver {
  const ObstacleWorld& world;
  const Grid2D& grid;
  const SpeedField& speed;
  const SourceSet& sources;
  const SolverConfig& config;

  std::vector<double> u;
  std::vector<NodeStatus> status;
  std::vector<std::uint8_t> frozen;
  std::vector<double> node_speed;
  std::vector<int> owner;
  std::vector<FanEntry> fans;
  std::optional<FanIndex> fan_index;
  IndexedMinHeap heap;
  SolveStats stats;
  std::vector<std::string> warnings;

  // Static global factor, when the method has one.
  const FactorFunction* global = nullptr;
  FactorFunction switching_first;
  FactorFunction switching_second;
  std::size_t switch_node = 0;
  bool switched = false;

  Solver(const ObstacleWorld& w, const SpeedField& s, const SourceSet& src,
         const SolverConfig& cfg)
      : world(w), grid(w.grid()), speed(s), sources(src), config(cfg), heap(w.grid().size()) {}

  void setup() {
    const std::size_t n = grid.size();
    u.assign(n, kInf);
    status.assign(n, NodeStatus::Far);
    frozen.assign(n, 0);
    owner.assign(n, kNoFan);
    node_speed.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      if (!world.excluded(k)) node_speed[k] = speed.node_speed(world, k);
    }

    if (const auto* g = std::get_if<GlobalStatic>(&config.method)) {
      global = &g->factor;
    } else if (const auto* ls = std::get_if<LocalizedStatic>(&config.method)) {
      double rmax = 0.0;
      for (const auto& f : ls->fans) {
        if (!(f.radius > 0.0)) throw std::invalid_argument("fan radius must be positive");
        rmax = std::max(rmax, f.radius);
      }
      fan_index.emplace(grid, rmax);
      for (const auto& f : ls->fans) add_fan(f);
    } else if (const auto* sc = std::get_if<SwitchingCones>(&config.method)) {
      const auto node = grid.find_node(sc->corner);
      if (!node) throw std::invalid_argument("switching point is not a grid node");
      switch_node = grid.linear(*node);
      switching_first = source_factor(sources, speed);
      switching_second = Cone{sc->corner, speed.free_speed(sc->corner)};
      global = &switching_first;
    } else if (const auto* jit = std::get_if<JustInTime>(&config.method)) {
      if (!(jit->radius > 0.0) || !(jit->source_radius > 0.0)) {
        throw std::invalid_argument("fan radius must be positive");
      }
      if (jit->radius <= 2.0 * grid.h() || jit->source_radius <= 2.0 * grid.h()) {
        warnings.push_back("fan radius is not larger than 2h");
      }
      fan_index.emplace(grid, std::max(jit->radius, jit->source_radius));
      for (Vec2 p : sources.points()) {
        FanEntry f;
        f.center = p;
        f.factor = Cone{p, speed.free_speed(p)};
        f.radius = jit->source_radius;
        f.origin = FanOrigin::Source;
        add_fan(f);
      }
    }

    for (const SeedValue& s : initialize_sources(world, speed, sources, config.ball)) {
      u[s.node] = s.u;
      frozen[s.node] = 1;
      status[s.node] = NodeStatus::Considered;
      heap.push_or_decrease(s.node, s.u);
    }
  }

  void add_fan(const FanEntry& f) {
    fans.push_back(f);
    fan_index->add(static_cast<int>(fans.size() - 1), f.center, f.radius);
  }

  // Factor for node k; nullptr means T = 0.
  const FactorFunction* factor_for(std::size_t k, int& fan_id) const {
    fan_id = kNoFan;
    if (global != nullptr) return global;
    if (!fan_index) return nullptr;
    const Vec2 x = grid.coord(k);
    const bool interior = world.node_class(k).kind == PointKind::Interior;
    fan_id = nearest_fan(x, fans, fan_index->at(x), interior, world.obstacles());
    if (fan_id == kNoFan) return nullptr;
    return &fans[static_cast<std::size_t>(fan_id)].factor;
  }

  AxisNeighbor neighbor(int i, int j, const FactorFunction* t) const {
    if (!grid.in_range(i, j)) return {};
    const std::size_t k = grid.linear(i, j);
    if (status[k] != NodeStatus::Accepted) return {};
    const double uk = u[k];
    if (t == nullptr) return {uk, uk};
    return {uk, uk - factor_value(*t, grid.coord(i, j))};
  }

  void update(std::size_t k, double floor_value) {
    int fan_id;
    const FactorFunction* t = factor_for(k, fan_id);
    const NodeIndex n = grid.node(k);
    NeighborData nb;
    nb.h_lo = neighbor(n.i - 1, n.j, t);
    nb.h_hi = neighbor(n.i + 1, n.j, t);
    nb.v_lo = neighbor(n.i, n.j - 1, t);
    nb.v_hi = neighbor(n.i, n.j + 1, t);
    FactorValue tv;
    if (t != nullptr) tv = eval_factor(*t, grid.coord(k));
    const UpdateResult r = factored_update(nb, tv.grad, tv.value, grid.h(), node_speed[k]);
    ++stats.updates;
    if (r.clamped) ++stats.one_sided_clamps;
    double value = r.value;
    if (value < floor_value) {
      value = floor_value;
      ++stats.order_clamps;
    }
    if (value < u[k]) {
      u[k] = value;
      owner[k] = fan_id;
      status[k] = NodeStatus::Considered;
      heap.push_or_decrease(k, value);
      stats.heap_peak = std::max(stats.heap_peak, heap.size());
    }
  }

  void try_corner(std::size_t k, const JustInTime& jit) {
    const int c = world.corner_at(k);
    if (c < 0 || u[k] == 0.0) return;
    ++stats.corners_tested;
    const CornerCandidate& cand = world.corner_candidates()[static_cast<std::size_t>(c)];
    Vec2 a;
    try {
      a = approximate_characteristic_direction(world, k, u, status);
    } catch (const std::domain_error& e) {
      warnings.push_back(std::string("corner skipped: ") + e.what());
      return;
    }
    const RectObstacle& ob = world.obstacles()[static_cast<std::size_t>(cand.obstacle)];
    CornerSetup setup;
    setup.position = grid.coord(k);
    setup.sector = {cand.theta1, cand.theta2};
    setup.edges = domain_edges_at(grid, k);
    setup.permeable = ob.permeable();
    setup.free_speed = speed.free_speed(setup.position);
    setup.upsilon = ob.permeable() ? setup.free_speed / ob.obstacle_speed() : 1.0;
    setup.kind = jit.corner_factor;
    CornerDecision d = detect_rarefying_corner(setup, a);
    if (!d.warning.empty()) warnings.push_back(d.warning);
    if (!d.rarefying) return;
    FanEntry f;
    f.center = setup.position;
    f.factor = std::move(d.factor);
    f.radius = jit.radius;
    f.origin = FanOrigin::Corner;
    f.node = k;
    f.obstacle = cand.obstacle;
    f.a = a;
    f.snell = d.snell;
    add_fan(f);
  }

  SolveResult run() {
    setup();
    std::vector<std::size_t> order;
    order.reserve(grid.size());
    const JustInTime* jit = std::get_if<JustInTime>(&config.method);
    double last = -kInf;
    while (!heap.empty()) {
      const auto [k, key] = heap.pop();
      if (key < last) {
        std::ostringstream msg;
        const NodeIndex n = grid.node(k);
        msg << "acceptance order decreased at node (" << n.i << ", " << n.j << "): " << key
            << " after " << last;
        throw std::logic_error(msg.str());
      }
      last = key;
      status[k] = NodeStatus::Accepted;
      order.push_back(k);
      if (jit != nullptr) try_corner(k, *jit);
      if (!switched && global == &switching_first && k == switch_node) {
        global = &switching_second;
        switched = true;
      }
      const NodeIndex n = grid.node(k);
      for (int d = 0; d < 4; ++d) {
        const int i = n.i + kDi[d];
        const int j = n.j + kDj[d];
        if (!grid.in_range(i, j)) continue;
        const std::size_t m = grid.linear(i, j);
        if (status[m] == NodeStatus::Accepted || frozen[m] || world.excluded(m)) continue;
        update(m, key);
      }
    }
    if (stats.updates > 4 * grid.size()) {
      throw std::logic_error("update count exceeds 4 per node");
    }

    SolveResult res;
    res.stats = stats;
    res.stats.accepted = order.size();
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (!world.excluded(k) && !(u[k] < kInf)) ++res.unreachable;
    }
    if (res.unreachable > 0) {
      warnings.push_back(std::to_string(res.unreachable) + " nodes are unreachable");
    }
    res.u = std::move(u);
    res.accepted_order = std::move(order);
    res.fans = std::move(fans);
    res.factor_owner = std::move(owner);
    res.warnings = std::move(warnings);
    return res;
  }
};

}  // namespace

int choose_fan(Vec2 x, std::span<const FanEntry> fans, bool skip_corner_fans,
               std::span<const RectObstacle> obstacles) {
  std::vector<int> all(fans.size());
  for (std::size_t i = 0; i < fans.size(); ++i) all[i] = static_cast<int>(i);
  return nearest_fan(x, fans, all, skip_corner_fans, obstacles);
}

FactorFunction choose_factor(Vec2 x, std::span<const FanEntry> fans,
                             std::span<const RectObstacle> obstacles) {
  const int id = choose_fan(x, fans, false, obstacles);
  if (id == kNoFan) return ZeroFactor{};
  return fans[static_cast<std::size_t>(id)].factor;
}

Vec2 approximate_characteristic_direction(const ObstacleWorld& world, std::size_t k,
                                          std::span<const double> u,
                                          std::span<const NodeStatus> status) {
  const Grid2D& grid = world.grid();
  const NodeIndex n = grid.node(k);
  const double h = grid.h();
  auto usable = [&](int i, int j) -> double {
    if (!grid.in_range(i, j)) return kInf;
    const std::size_t m = grid.linear(i, j);
    if (status[m] != NodeStatus::Accepted || world.excluded(m)) return kInf;
    return u[m];
  };
  auto axis = [&](double lo, double hi) -> double {
    if (!(lo < kInf) && !(hi < kInf)) return 0.0;
    if (hi < lo) return (hi - u[k]) / h;
    return (u[k] - lo) / h;
  };
  const Vec2 g{axis(usable(n.i - 1, n.j), usable(n.i + 1, n.j)),
               axis(usable(n.i, n.j - 1), usable(n.i, n.j + 1))};
  const double gn = norm(g);
  if (!(gn > 0.0)) {
    throw std::domain_error("vanishing gradient at node " + std::to_string(k));
  }
  return {-g.x / gn, -g.y / gn};
}

DomainEdges domain_edges_at(const Grid2D& grid, std::size_t k) {
  const NodeIndex n = grid.node(k);
  return {n.i == 0, n.i == grid.nx() - 1, n.j == 0, n.j == grid.ny() - 1};
}

CornerDecision detect_rarefying_corner(const CornerSetup& corner, Vec2 a) {
  constexpr double kTol = 1e-12;
  CornerDecision out;
  const Vec2 d = -a;
  if (corner.sector.contains(d)) return out;
  if ((corner.edges.left && d.x <= kTol) || (corner.edges.right && d.x >= -kTol) ||
      (corner.edges.bottom && d.y <= kTol) || (corner.edges.top && d.y >= -kTol)) {
    return out;
  }

  if (corner.kind == CornerFactorKind::ConeOnly) {
    out.rarefying = true;
    out.factor = Cone{corner.position, corner.free_speed};
    return out;
  }
  if (!corner.permeable) {
    out.rarefying = true;
    out.factor = build_corner_factor(corner.position, a, corner.sector, corner.free_speed,
                                     corner.kind == CornerFactorKind::ConeInS0Only);
    return out;
  }
  try {
    PermeableCorner pc = build_permeable_corner_factor(corner.position, a, corner.sector,
                                                       corner.upsilon, corner.free_speed);
    if (pc.angles.delta == 0.0) return out;
    out.rarefying = true;
    out.factor = std::move(pc.factor);
    out.snell = pc.angles;
  } catch (const std::invalid_argument& e) {
    std::ostringstream msg;
    msg << "permeable corner at (" << corner.position.x << ", " << corner.position.y
        << ") treated as regular: " << e.what();
    out.warning = msg.str();
  }
  return out;
}

std::vector<SeedValue> initialize_sources(const ObstacleWorld& world, const SpeedField& speed,
                                          const SourceSet& sources, const BallInit& ball) {
  const Grid2D& grid = world.grid();
  std::vector<SeedValue> seeds;
  if (ball.mode == BallMode::None) {
    for (std::size_t k : sources.nodes()) seeds.push_back({k, 0.0});
    return seeds;
  }
  if (!(ball.radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  std::vector<double> value(grid.size(), kInf);
  const auto free = [&](Vec2 p) { return speed.free_speed(p); };
  const double h = grid.h();
  const int reach = static_cast<int>(std::ceil(ball.radius / h)) + 1;
  for (std::size_t s = 0; s < sources.nodes().size(); ++s) {
    const Vec2 x0 = sources.points()[s];
    const NodeIndex c = grid.node(sources.nodes()[s]);
    const double f0 = speed.free_speed(x0);
    int count = 0;
    for (int j = c.j - reach; j <= c.j + reach; ++j) {
      for (int i = c.i - reach; i <= c.i + reach; ++i) {
        if (!grid.in_range(i, j)) continue;
        const std::size_t k = grid.linear(i, j);
        if (world.excluded(k)) continue;
        const Vec2 x = grid.coord(i, j);
        const double r = distance(x, x0);
        if (r > ball.radius * (1.0 + 1e-12)) continue;
        ++count;
        double v = 0.0;
        switch (ball.mode) {
          case BallMode::ZeroOnBall:
            v = 0.0;
            break;
          case BallMode::ConeOnBall:
            v = r / f0;
            break;
          case BallMode::LineIntegratedBall:
            v = line_integrated_time(x0, x, free);
            break;
          case BallMode::None:
            break;
        }
        value[k] = std::min(value[k], v);
      }
    }
    if (count < 2) {
      throw std::invalid_argument("initialization ball of radius " + std::to_string(ball.radius) +
                                  " holds no grid node besides the source");
    }
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (value[k] < kInf) seeds.push_back({k, value[k]});
  }
  return seeds;
}

SolveResult fmm_solve(const ObstacleWorld& world, const SpeedField& speed,
                      const SourceSet& sources, const SolverConfig& config) {
  speed.validate(world);
  Solver s(world, speed, sources, config);
  return s.run();
}

}  // namespace eikfac
