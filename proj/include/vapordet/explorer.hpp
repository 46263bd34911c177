#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "vapordet/design.hpp"
#include "vapordet/detector_model.hpp"

namespace vapordet {

/// Metric names understood by sweeps: eta, loss_scatter, loss_transmission,
/// loss_collision, p_dc, net_dark_linear, net_dark_exact, atom_count,
/// tau_col, l_abs, t_ro.
const std::vector<std::string>& metric_names();
std::string_view metric_unit(std::string_view metric);
double metric_value(const BudgetReport& r, std::string_view metric);

struct SweepAxis {
  std::string field;
  std::vector<double> values;
};

struct SweepSpec {
  DetectorDesign base;
  std::vector<SweepAxis> axes;
  std::vector<std::string> outputs;
};

struct SweepRow {
  std::vector<double> coords;   // one per axis
  std::vector<double> metrics;  // one per requested output
  bool valid = false;           // validate_units passed
  bool far_detuned = false;
  bool clamped = false;
  std::string error;            // evaluation failure, empty on success
};

struct SweepTable {
  std::vector<std::string> axes;
  std::vector<std::string> outputs;
  std::vector<SweepRow> rows;
};

/// Throws ConfigError for unknown fields/metrics or empty/non-finite grids.
void validate_sweep(const SweepSpec& spec);

/// Full Cartesian grid, last axis varying fastest.
SweepTable run_sweep(const SweepSpec& spec);

/// Header row names each column with its unit.
std::string sweep_csv(const SweepTable& t);
nlohmann::json to_json(const SweepTable& t);

struct FreeField {
  std::string field;
  double lo = 0.0;
  double hi = 0.0;
};

struct OptimizationProblem {
  DetectorDesign base;
  std::vector<FreeField> free_fields;
  double budget = 1.0;         // on net_dark_count.exact
  int probe_points = 5;        // per free dimension
  double penalty = 1e3;        // per unit of constraint violation
  double xtol = 1e-10;         // simplex size in unit-box coordinates
  int max_evaluations = 20000;
};

/// Throws ConfigError for unknown fields, bad bounds or budget outside (0, 1].
void validate_problem(const OptimizationProblem& p);

struct Evaluation {
  std::vector<double> x;  // free-field values
  double objective = 0.0; // -eta + penalty terms (minimized)
  double eta = 0.0;
  double net_dark = 0.0;
  bool valid = false;     // units ok, far detuned, not clamped
  bool feasible = false;  // valid and net_dark <= budget
};

/// Penalized objective of a design: -eta + penalty * max(0, net_dark - budget);
/// designs with any validity flag raised score penalty.
Evaluation evaluate(const OptimizationProblem& p, const std::vector<double>& x);

DetectorDesign apply_free(const OptimizationProblem& p, const std::vector<double>& x);

struct OptimizationResult {
  DetectorDesign design;
  EfficiencyBudget budget;
  Evaluation best;
  std::vector<Evaluation> trace;
};

/// Coarse probe grid, then Nelder-Mead from the best feasible probe point.
/// Throws InfeasibleError when no probe point is feasible.
OptimizationResult optimize(const OptimizationProblem& p);

/// Largest objective decrease found by moving each free field by +-1%
/// (clamped to bounds); <= 0 certifies a local optimum at that resolution.
double local_improvement(const OptimizationProblem& p, const std::vector<double>& x);

struct ParetoPoint {
  double eta = 0.0;
  double net_dark = 0.0;
  std::vector<double> x;
  DetectorDesign design;
};

/// Nondominated (max eta, min net_dark.exact) set over a grid of
/// grid_density points per free field; invalid designs are skipped.
std::vector<ParetoPoint> pareto_front(const OptimizationProblem& p, int grid_density);

nlohmann::json to_json(const Evaluation& e, const OptimizationProblem& p);
nlohmann::json to_json(const ParetoPoint& pt, const OptimizationProblem& p);

}  // namespace vapordet
