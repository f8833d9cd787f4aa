#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eikfac/analysis.hpp"
#include "eikfac/solver.hpp"

namespace eikfac {

/// Schema violation; the message starts with the offending key path.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverSpec {
  std::string method = "original";
  double radius = 0.18;
  std::optional<double> source_radius;  // defaults to radius
  std::string corner_factor = "cone_plane";
  std::optional<Vec2> switch_point;
  std::vector<Vec2> extra_cones;
  std::string ball_mode = "none";
  double ball_radius = 0.1;
};

struct GroundTruthSpec {
  std::string type = "linear_oracle";  // linear_oracle | visibility | fine_grid
  double h = 0.0;                      // fine_grid only
  SolverSpec solver;                   // fine_grid only
};

struct StudyMethod {
  std::string label;
  SolverSpec solver;
};

struct StudySpec {
  double h0 = 0.02;
  int levels = 5;
  int tail = 3;
  GroundTruthSpec ground_truth;
  std::vector<StudyMethod> methods;
};

struct OutputSpec {
  bool field_csv = true;
  bool heatmap_pgm = true;
  bool fans_csv = true;
};

struct Scenario {
  std::string name;
  std::string description;
  ProblemSpec problem;
  double h = 0.01;
  SolverSpec solver;
  std::optional<StudySpec> study;
  OutputSpec outputs;
};

/// Parses and validates a JSON scenario. Unknown keys are rejected.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Normalized JSON text with every default filled in.
std::string emit_scenario(const Scenario& s);

SolverConfig to_solver_config(const SolverSpec& spec, const ProblemSpec& problem);
GroundTruth to_ground_truth(const GroundTruthSpec& spec, const ProblemSpec& problem);
std::vector<MethodSpec> to_methods(const StudySpec& study, const ProblemSpec& problem);

}  // namespace eikfac
