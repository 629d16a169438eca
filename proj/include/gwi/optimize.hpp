#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "gwi/expression.hpp"
#include "gwi/observables.hpp"
#include "gwi/qstate.hpp"
#include "gwi/reduced.hpp"

namespace gwi {

enum class ReducedObjective { Ghz, Cluster, W };

// How the optimizer's angle vector maps onto a SettingSet.
//   XY / XZ: 2 angles per party, (phi_i, phi'_i).
//   Sphere:  4 angles per party, (theta_i, phi_i, theta'_i, phi'_i).
enum class Parametrization { XY, XZ, Sphere };

Parametrization parametrization_for(Plane plane);

// Full-state objective: the correlator-form value of `expr` on `state` with
// settings drawn from `param`.
struct FullObjective {
  PureState state;
  Parametrization param;
  InequalityExpression expr;  // correlator form
  // Equivalent probability-form expression, when one is known; evaluated
  // instead of `expr` and rescaled, which is several times cheaper.
  std::optional<InequalityExpression> probability_source;
};

// GWI of matching arity, correlator form, with the probability form attached.
FullObjective make_full_objective(PureState state, Parametrization param);
// Arbitrary correlator-form expression; a probability-form source is attached
// when it is a member of the GWI family.
FullObjective make_full_objective(PureState state, Parametrization param, InequalityExpression correlator_expr);

using Objective = std::variant<ReducedObjective, FullObjective>;

int dimension(const Objective& objective);
double objective_value(const Objective& objective, std::span<const double> angles);
SettingSet settings_for(const FullObjective& objective, std::span<const double> angles);

// Flat (phi_1, phi'_1, ..., phi_4, phi'_4) settings realizing a reduced
// objective at `reduced` angles, and the state it refers to.
std::vector<double> reduced_settings(ReducedObjective which, std::span<const double> reduced);
Plane reduced_plane(ReducedObjective which);
PureState reduced_state(ReducedObjective which);
std::string_view to_string(ReducedObjective which);

struct OptimizerConfig {
  int restarts = 64;
  std::uint64_t seed = 42;
  double tol = 1e-9;
  int max_iters = 20000;
  double initial_step = 0.5;
};

// Defaults per objective kind: 64 restarts for reduced, 256 for full.
OptimizerConfig default_config(const Objective& objective);

struct LocalSearchResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead simplex ascent (reflection / expansion / contraction / shrink).
// Stops when the simplex diameter drops below `tol` or the spread of vertex
// values below 1e-12.
LocalSearchResult nelder_mead_maximize(const std::function<double(std::span<const double>)>& f,
                                       std::vector<double> start, double step, double tol,
                                       int max_iters);

struct OptimizationResult {
  double best_value = 0.0;
  std::vector<double> best_angles;  // wrapped to [0, 2 pi)
  int restarts_used = 0;
  std::uint64_t seed = 0;
  bool converged = false;  // local search of the winning restart converged
  int best_restart = 0;
  long evaluations = 0;
};

// Start point of restart `index`: uniform in [0, 2 pi)^dim from a generator
// seeded by (seed, index) alone.
std::vector<double> restart_point(std::uint64_t seed, int index, int dim);

OptimizationResult maximize(const Objective& objective, const OptimizerConfig& config);

struct VisibilityResult {
  double threshold = 1.0;
  double max_violation = 0.0;
  double bound = 0.0;
  bool attainable = false;  // max_violation > bound
  std::vector<double> angles;
  // Direct evaluation on white-noise mixtures at threshold +- 0.01.
  double value_above = 0.0;
  double value_below = 0.0;
  bool bracket_ok = false;
  double linearity_error = 0.0;
};

// Threshold visibility of `state` for a correlator-form expression, with the
// maximal violation searched over the full plane.
VisibilityResult visibility_threshold(const PureState& state, const InequalityExpression& correlator_expr,
                                      Plane plane, const OptimizerConfig& config);

// Threshold visibility when the violation is maximized over a reduced family
// of settings for the 4-party GWI.
VisibilityResult visibility_threshold(ReducedObjective family, const OptimizerConfig& config);

}  // namespace gwi
