// eikfac command-line driver: solve, converge, trajectory, snell.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "eikfac/analysis.hpp"
#include "eikfac/factor.hpp"
#include "eikfac/io.hpp"
#include "eikfac/path.hpp"
#include "eikfac/scenario.hpp"
#include "eikfac/solver.hpp"

namespace {

using namespace eikfac;

eikfac::Vec2 parse_point(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("expected x,y but got '" + text + "'");
  return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_solve(const std::string& scenario_path, const std::string& prefix) {
  const Scenario sc = load_scenario(scenario_path);
  const Problem p = make_problem(sc.problem, sc.h);
  const SolveResult r =
      fmm_solve(p.world, p.speed, p.sources, to_solver_config(sc.solver, sc.problem));
  print_warnings(r.warnings);
  const Grid2D& g = p.world.grid();
  if (sc.outputs.field_csv) {
    write_file(prefix + "_field.csv", [&](std::ostream& o) { emit_field_csv(o, g, r.u); });
  }
  if (sc.outputs.heatmap_pgm) {
    write_file(prefix + "_heatmap.pgm", [&](std::ostream& o) { emit_heatmap_pgm(o, g, r.u); });
  }
  if (sc.outputs.fans_csv) {
    write_file(prefix + "_fans.csv", [&](std::ostream& o) { emit_fans_csv(o, r.fans); });
  }
  std::cout << "nodes " << g.size() << " accepted " << r.stats.accepted << " fans "
            << r.fans.size() << " unreachable " << r.unreachable << '\n';
  for (const auto& f : r.fans) {
    if (f.origin != FanOrigin::Corner) continue;
    std::cout << "corner fan at " << format_double(f.center.x) << ',' << format_double(f.center.y)
              << " a=" << format_double(f.a.x) << ',' << format_double(f.a.y) << '\n';
  }
  return 0;
}

int cmd_converge(const std::string& scenario_path, int levels, int tail, const std::string& out) {
  const Scenario sc = load_scenario(scenario_path);
  if (!sc.study) throw ScenarioError("study: missing from scenario");
  StudyOptions opt;
  opt.h0 = sc.study->h0;
  opt.levels = static_cast<std::size_t>(levels > 0 ? levels : sc.study->levels);
  opt.tail = static_cast<std::size_t>(tail > 0 ? tail : sc.study->tail);
  const auto reports = run_refinement_study(sc.problem, to_methods(*sc.study, sc.problem),
                                            to_ground_truth(sc.study->ground_truth, sc.problem), opt);
  if (out.empty()) {
    emit_convergence_csv(std::cout, reports);
  } else {
    write_file(out, [&](std::ostream& o) { emit_convergence_csv(o, reports); });
  }
  for (const auto& r : reports) print_warnings(r.order.warnings);
  return 0;
}

int cmd_trajectory(const std::string& scenario_path, const std::string& from,
                   const std::string& out) {
  const Scenario sc = load_scenario(scenario_path);
  const Problem p = make_problem(sc.problem, sc.h);
  const SolveResult r =
      fmm_solve(p.world, p.speed, p.sources, to_solver_config(sc.solver, sc.problem));
  print_warnings(r.warnings);
  const Trajectory t = extract_trajectory(r.u, p.world, parse_point(from), sc.problem.sources);
  if (out.empty()) {
    emit_trajectory_csv(std::cout, t);
  } else {
    write_file(out, [&](std::ostream& o) { emit_trajectory_csv(o, t); });
  }
  const char* status = t.status == TrajectoryStatus::ReachedSource ? "reached_source"
                       : t.status == TrajectoryStatus::Stalled     ? "stalled"
                                                                   : "max_steps";
  std::cerr << "length " << format_double(t.length) << " status " << status << '\n';
  return 0;
}

int cmd_snell(double alpha, double upsilon) {
  const double beta = snell_beta(alpha, upsilon);
  const double delta = fan_sector_angle(alpha, beta);
  const SnellAngles r = refract_angles(alpha, upsilon);
  std::cout << "beta " << format_double(beta) << '\n'
            << "delta " << format_double(delta) << '\n'
            << "theta2 " << format_double(r.theta2) << '\n'
            << "theta3 " << format_double(r.theta3) << '\n'
            << "total_internal_reflection " << (r.total_internal_reflection ? 1 : 0) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eikonal solver with localized factoring at point sources and obstacle corners"};
  app.require_subcommand(1);

  std::string scenario;
  std::string prefix = "out";
  auto* solve = app.add_subcommand("solve", "Solve a scenario and write field outputs");
  solve->add_option("--scenario", scenario, "Scenario JSON file")->required();
  solve->add_option("--out-prefix", prefix, "Prefix for output files");

  int levels = 0;
  int tail = 0;
  std::string conv_out;
  auto* converge = app.add_subcommand("converge", "Run the refinement study of a scenario");
  converge->add_option("--scenario", scenario, "Scenario JSON file")->required();
  converge->add_option("--levels", levels, "Number of refinement levels (default: scenario)");
  converge->add_option("--tail", tail, "Rows used for the order fit (default: scenario)");
  converge->add_option("--out", conv_out, "CSV output path (default: stdout)");

  std::string from;
  std::string traj_out;
  auto* trajectory = app.add_subcommand("trajectory", "Extract an optimal path to the sources");
  trajectory->add_option("--scenario", scenario, "Scenario JSON file")->required();
  trajectory->add_option("--from", from, "Start point as x,y")->required();
  trajectory->add_option("--out", traj_out, "CSV output path (default: stdout)");

  double alpha = 0.0;
  double upsilon = 1.0;
  auto* snell = app.add_subcommand("snell", "Print refraction angles at a permeable corner");
  snell->add_option("--alpha", alpha, "Incidence angle in radians")->required();
  snell->add_option("--upsilon", upsilon, "Speed ratio F_free / F_ob")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(scenario, prefix);
    if (*converge) return cmd_converge(scenario, levels, tail, conv_out);
    if (*trajectory) return cmd_trajectory(scenario, from, traj_out);
    if (*snell) return cmd_snell(alpha, upsilon);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
