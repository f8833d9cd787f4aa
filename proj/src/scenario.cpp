#include "eikfac/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <set>
#include <sstream>

#include "json.hpp"
#include "eikfac/oracles.hpp"

namespace eikfac {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ScenarioError(path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string join(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

void require_object(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) fail(join(path, key), "unknown key");
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

double get_positive(const json& j, const std::string& path) {
  const double v = get_number(j, path);
  if (!(v > 0.0)) fail(path, "must be positive");
  return v;
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

Vec2 get_point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected [x, y]");
  return {get_number(j[0], join(path, 0)), get_number(j[1], join(path, 1))};
}

std::vector<Vec2> get_points(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a list of points");
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_point(j[i], join(path, i)));
  return out;
}

void check_choice(const std::string& value, const std::string& path,
                  std::initializer_list<const char*> choices) {
  for (const char* c : choices) {
    if (value == c) return;
  }
  std::string list;
  for (const char* c : choices) list += (list.empty() ? "" : ", ") + std::string(c);
  fail(path, "unknown value '" + value + "' (expected one of " + list + ")");
}

BaseSpeed parse_speed(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("type")) fail(path, "expected an object with a type");
  const std::string type = get_string(j["type"], join(path, "type"));
  if (type == "constant") {
    require_object(j, path, {"type", "value"});
    ConstantSpeed s;
    if (j.contains("value")) s.value = get_positive(j["value"], join(path, "value"));
    return s;
  }
  if (type == "linear") {
    require_object(j, path, {"type", "s0", "v", "x0"});
    LinearSpeed s;
    if (j.contains("s0")) s.s0 = get_positive(j["s0"], join(path, "s0"));
    if (j.contains("v")) s.v = get_point(j["v"], join(path, "v"));
    if (j.contains("x0")) s.x0 = get_point(j["x0"], join(path, "x0"));
    return s;
  }
  if (type == "sinusoidal") {
    require_object(j, path, {"type", "base", "amp"});
    SinusoidalSpeed s;
    if (j.contains("base")) s.base = get_positive(j["base"], join(path, "base"));
    if (j.contains("amp")) s.amp = get_number(j["amp"], join(path, "amp"));
    return s;
  }
  fail(join(path, "type"), "unknown speed type '" + type + "'");
}

SolverSpec parse_solver(const json& j, const std::string& path) {
  require_object(j, path,
                 {"method", "radius", "source_radius", "corner_factor", "switch_point",
                  "extra_cones", "ball"});
  SolverSpec s;
  if (j.contains("method")) s.method = get_string(j["method"], join(path, "method"));
  check_choice(s.method, join(path, "method"),
               {"original", "global_cone", "global_min_cones", "global_sum_cones",
                "localized_cones", "switching_cones", "just_in_time"});
  if (j.contains("radius")) s.radius = get_positive(j["radius"], join(path, "radius"));
  if (j.contains("source_radius")) {
    s.source_radius = get_positive(j["source_radius"], join(path, "source_radius"));
  }
  if (j.contains("corner_factor")) {
    s.corner_factor = get_string(j["corner_factor"], join(path, "corner_factor"));
  }
  check_choice(s.corner_factor, join(path, "corner_factor"),
               {"cone_plane", "cone_only", "cone_in_s0_only"});
  if (j.contains("switch_point")) {
    s.switch_point = get_point(j["switch_point"], join(path, "switch_point"));
  }
  if (s.method == "switching_cones" && !s.switch_point) {
    fail(join(path, "switch_point"), "required for switching_cones");
  }
  if (j.contains("extra_cones")) s.extra_cones = get_points(j["extra_cones"], join(path, "extra_cones"));
  if (j.contains("ball")) {
    const std::string bp = join(path, "ball");
    require_object(j["ball"], bp, {"mode", "radius"});
    if (j["ball"].contains("mode")) s.ball_mode = get_string(j["ball"]["mode"], join(bp, "mode"));
    check_choice(s.ball_mode, join(bp, "mode"), {"none", "zero", "cone", "line_integrated"});
    if (j["ball"].contains("radius")) {
      s.ball_radius = get_positive(j["ball"]["radius"], join(bp, "radius"));
    }
  }
  return s;
}

json emit_solver(const SolverSpec& s) {
  json j;
  j["method"] = s.method;
  j["radius"] = s.radius;
  j["source_radius"] = s.source_radius.value_or(s.radius);
  j["corner_factor"] = s.corner_factor;
  if (s.switch_point) j["switch_point"] = {s.switch_point->x, s.switch_point->y};
  j["extra_cones"] = json::array();
  for (Vec2 p : s.extra_cones) j["extra_cones"].push_back({p.x, p.y});
  j["ball"] = {{"mode", s.ball_mode}, {"radius", s.ball_radius}};
  return j;
}

json emit_speed(const BaseSpeed& b) {
  if (const auto* c = std::get_if<ConstantSpeed>(&b)) {
    return {{"type", "constant"}, {"value", c->value}};
  }
  if (const auto* l = std::get_if<LinearSpeed>(&b)) {
    return {{"type", "linear"}, {"s0", l->s0}, {"v", {l->v.x, l->v.y}}, {"x0", {l->x0.x, l->x0.y}}};
  }
  const auto& s = std::get<SinusoidalSpeed>(b);
  return {{"type", "sinusoidal"}, {"base", s.base}, {"amp", s.amp}};
}

GroundTruthSpec parse_truth(const json& j, const std::string& path) {
  require_object(j, path, {"type", "h", "solver"});
  GroundTruthSpec g;
  if (j.contains("type")) g.type = get_string(j["type"], join(path, "type"));
  check_choice(g.type, join(path, "type"), {"linear_oracle", "visibility", "fine_grid"});
  if (g.type == "fine_grid") {
    if (!j.contains("h")) fail(join(path, "h"), "required for fine_grid");
    g.h = get_positive(j["h"], join(path, "h"));
    if (j.contains("solver")) g.solver = parse_solver(j["solver"], join(path, "solver"));
  } else if (j.contains("h") || j.contains("solver")) {
    fail(path, "h and solver are only valid for fine_grid");
  }
  return g;
}

// Builds the problem at the configured h so alignment and speed errors
// surface at parse time.
void validate(const Scenario& s) {
  try {
    const Problem p = make_problem(s.problem, s.h);
    p.speed.validate(p.world);
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    fail("<scenario>", e.what());
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("<root>: invalid JSON: ") + e.what());
  }
  require_object(j, "",
                 {"name", "description", "domain", "grid", "speed", "obstacles", "sources",
                  "solver", "study", "outputs"});
  Scenario s;
  if (j.contains("name")) s.name = get_string(j["name"], "name");
  if (j.contains("description")) s.description = get_string(j["description"], "description");

  if (j.contains("domain")) {
    require_object(j["domain"], "domain", {"lo", "hi"});
    if (j["domain"].contains("lo")) s.problem.lo = get_point(j["domain"]["lo"], "domain.lo");
    if (j["domain"].contains("hi")) s.problem.hi = get_point(j["domain"]["hi"], "domain.hi");
  }
  if (!(s.problem.lo.x < s.problem.hi.x) || !(s.problem.lo.y < s.problem.hi.y)) {
    fail("domain", "lo must be below hi on both axes");
  }

  if (!j.contains("grid")) fail("grid", "missing");
  require_object(j["grid"], "grid", {"h", "n"});
  if (j["grid"].contains("h") == j["grid"].contains("n")) fail("grid", "give exactly one of h or n");
  if (j["grid"].contains("h")) {
    s.h = get_positive(j["grid"]["h"], "grid.h");
  } else {
    const int n = get_int(j["grid"]["n"], "grid.n");
    if (n < 2) fail("grid.n", "must be at least 2");
    s.h = (s.problem.hi.x - s.problem.lo.x) / (n - 1);
  }

  if (j.contains("speed")) s.problem.speed = parse_speed(j["speed"], "speed");

  if (j.contains("obstacles")) {
    const json& obs = j["obstacles"];
    if (!obs.is_array()) fail("obstacles", "expected a list");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string p = join("obstacles", i);
      require_object(obs[i], p, {"lo", "hi", "speed"});
      if (!obs[i].contains("lo") || !obs[i].contains("hi")) fail(p, "needs lo and hi");
      RectObstacle r;
      r.lo = get_point(obs[i]["lo"], join(p, "lo"));
      r.hi = get_point(obs[i]["hi"], join(p, "hi"));
      if (obs[i].contains("speed")) r.permeability = Permeable{get_positive(obs[i]["speed"], join(p, "speed"))};
      s.problem.obstacles.push_back(r);
    }
  }

  if (!j.contains("sources")) fail("sources", "missing");
  s.problem.sources = get_points(j["sources"], "sources");
  if (s.problem.sources.empty()) fail("sources", "needs at least one point");

  if (j.contains("solver")) s.solver = parse_solver(j["solver"], "solver");

  if (j.contains("study")) {
    const json& st = j["study"];
    require_object(st, "study", {"h0", "levels", "tail", "ground_truth", "methods"});
    StudySpec study;
    if (st.contains("h0")) study.h0 = get_positive(st["h0"], "study.h0");
    if (st.contains("levels")) study.levels = get_int(st["levels"], "study.levels");
    if (study.levels < 1) fail("study.levels", "must be at least 1");
    if (st.contains("tail")) study.tail = get_int(st["tail"], "study.tail");
    if (study.tail < 2) fail("study.tail", "must be at least 2");
    if (st.contains("ground_truth")) study.ground_truth = parse_truth(st["ground_truth"], "study.ground_truth");
    if (st.contains("methods")) {
      if (!st["methods"].is_array()) fail("study.methods", "expected a list");
      for (std::size_t i = 0; i < st["methods"].size(); ++i) {
        const std::string p = join("study.methods", i);
        const json& m = st["methods"][i];
        require_object(m, p, {"label", "solver"});
        StudyMethod sm;
        sm.label = m.contains("label") ? get_string(m["label"], join(p, "label")) : "";
        if (m.contains("solver")) sm.solver = parse_solver(m["solver"], join(p, "solver"));
        if (sm.label.empty()) sm.label = sm.solver.method;
        study.methods.push_back(sm);
      }
    }
    if (study.methods.empty()) study.methods.push_back({s.solver.method, s.solver});
    s.study = study;
  }

  if (j.contains("outputs")) {
    require_object(j["outputs"], "outputs", {"field_csv", "heatmap_pgm", "fans_csv"});
    const json& o = j["outputs"];
    if (o.contains("field_csv")) s.outputs.field_csv = get_bool(o["field_csv"], "outputs.field_csv");
    if (o.contains("heatmap_pgm")) s.outputs.heatmap_pgm = get_bool(o["heatmap_pgm"], "outputs.heatmap_pgm");
    if (o.contains("fans_csv")) s.outputs.fans_csv = get_bool(o["fans_csv"], "outputs.fans_csv");
  }

  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open scenario file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string emit_scenario(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["description"] = s.description;
  j["domain"] = {{"lo", {s.problem.lo.x, s.problem.lo.y}}, {"hi", {s.problem.hi.x, s.problem.hi.y}}};
  j["grid"] = {{"h", s.h}};
  j["speed"] = emit_speed(s.problem.speed);
  j["obstacles"] = json::array();
  for (const auto& r : s.problem.obstacles) {
    json o = {{"lo", {r.lo.x, r.lo.y}}, {"hi", {r.hi.x, r.hi.y}}};
    if (r.permeable()) o["speed"] = r.obstacle_speed();
    j["obstacles"].push_back(o);
  }
  j["sources"] = json::array();
  for (Vec2 p : s.problem.sources) j["sources"].push_back({p.x, p.y});
  j["solver"] = emit_solver(s.solver);
  if (s.study) {
    json st;
    st["h0"] = s.study->h0;
    st["levels"] = s.study->levels;
    st["tail"] = s.study->tail;
    json gt = {{"type", s.study->ground_truth.type}};
    if (s.study->ground_truth.type == "fine_grid") {
      gt["h"] = s.study->ground_truth.h;
      gt["solver"] = emit_solver(s.study->ground_truth.solver);
    }
    st["ground_truth"] = gt;
    st["methods"] = json::array();
    for (const auto& m : s.study->methods) {
      st["methods"].push_back({{"label", m.label}, {"solver", emit_solver(m.solver)}});
    }
    j["study"] = st;
  }
  j["outputs"] = {{"field_csv", s.outputs.field_csv},
                  {"heatmap_pgm", s.outputs.heatmap_pgm},
                  {"fans_csv", s.outputs.fans_csv}};
  return j.dump(2) + "\n";
}

namespace {

std::vector<Cone> cones_at(const std::vector<Vec2>& points, const ProblemSpec& problem) {
  std::vector<Cone> out;
  for (Vec2 p : points) out.push_back({p, eval_base_speed(problem.speed, p)});
  return out;
}

}  // namespace

SolverConfig to_solver_config(const SolverSpec& spec, const ProblemSpec& problem) {
  SolverConfig cfg;
  if (spec.ball_mode == "zero") cfg.ball.mode = BallMode::ZeroOnBall;
  if (spec.ball_mode == "cone") cfg.ball.mode = BallMode::ConeOnBall;
  if (spec.ball_mode == "line_integrated") cfg.ball.mode = BallMode::LineIntegratedBall;
  cfg.ball.radius = spec.ball_radius;

  const std::vector<Cone> src = cones_at(problem.sources, problem);
  std::vector<Cone> all = src;
  for (const Cone& c : cones_at(spec.extra_cones, problem)) all.push_back(c);

  if (spec.method == "original") {
    cfg.method = OriginalMethod{};
  } else if (spec.method == "global_cone") {
    if (src.size() == 1) {
      cfg.method = GlobalStatic{src.front()};
    } else {
      cfg.method = GlobalStatic{MinOfCones{src}};
    }
  } else if (spec.method == "global_min_cones") {
    cfg.method = GlobalStatic{MinOfCones{all}};
  } else if (spec.method == "global_sum_cones") {
    cfg.method = GlobalStatic{SumOfCones{all}};
  } else if (spec.method == "localized_cones") {
    LocalizedStatic ls;
    for (const Cone& c : all) {
      FanEntry f;
      f.center = c.center;
      f.factor = c;
      f.radius = spec.source_radius.value_or(spec.radius);
      f.origin = FanOrigin::Static;
      ls.fans.push_back(f);
    }
    cfg.method = ls;
  } else if (spec.method == "switching_cones") {
    cfg.method = SwitchingCones{spec.switch_point.value_or(Vec2{})};
  } else {
    JustInTime jit;
    jit.radius = spec.radius;
    jit.source_radius = spec.source_radius.value_or(spec.radius);
    if (spec.corner_factor == "cone_only") jit.corner_factor = CornerFactorKind::ConeOnly;
    if (spec.corner_factor == "cone_in_s0_only") jit.corner_factor = CornerFactorKind::ConeInS0Only;
    cfg.method = jit;
  }
  return cfg;
}

GroundTruth to_ground_truth(const GroundTruthSpec& spec, const ProblemSpec& problem) {
  if (spec.type == "fine_grid") {
    return FineGridTruth{spec.h, to_solver_config(spec.solver, problem)};
  }
  if (spec.type == "visibility") {
    for (const auto& ob : problem.obstacles) {
      if (ob.permeable()) throw ScenarioError("study.ground_truth: visibility needs non-permeable obstacles");
    }
    if (!std::holds_alternative<ConstantSpeed>(problem.speed) ||
        std::get<ConstantSpeed>(problem.speed).value != 1.0) {
      throw ScenarioError("study.ground_truth: visibility needs constant unit speed");
    }
    auto oracle = std::make_shared<VisibilityOracle>(problem.obstacles, problem.sources);
    return AnalyticTruth{[oracle](Vec2 x) { return oracle->distance(x); }};
  }
  const auto* lin = std::get_if<LinearSpeed>(&problem.speed);
  if (lin == nullptr || !problem.obstacles.empty()) {
    throw ScenarioError("study.ground_truth: linear_oracle needs a linear speed and no obstacles");
  }
  std::vector<LinearSpeedProblem> parts;
  for (Vec2 p : problem.sources) {
    parts.push_back({p, 1.0 / eval_base_speed(problem.speed, p), lin->v});
  }
  return AnalyticTruth{[parts](Vec2 x) {
    double best = kInf;
    for (const auto& q : parts) best = std::min(best, eval_linear_speed_solution(q, x));
    return best;
  }};
}

std::vector<MethodSpec> to_methods(const StudySpec& study, const ProblemSpec& problem) {
  std::vector<MethodSpec> out;
  for (const auto& m : study.methods) out.push_back({m.label, to_solver_config(m.solver, problem)});
  return out;
}

}  // namespace eikfac
