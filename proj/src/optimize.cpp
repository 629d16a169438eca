#include "gwi/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "gwi/error.hpp"

namespace gwi {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSpreadTol = 1e-12;
constexpr int kMaxSourceSearchParties = 6;

double wrap_angle(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

int angles_per_party(Parametrization p) { return p == Parametrization::Sphere ? 4 : 2; }

std::optional<InequalityExpression> find_probability_source(const InequalityExpression& corr) {
  const int n = corr.n_parties;
  if (n < 2 || n > kMaxSourceSearchParties) return std::nullopt;
  for (std::uint32_t s = 0; s < (1U << n); ++s) {
    const InequalityExpression base = build_gwi(n, s);
    for (std::uint32_t w = 0; w < (1U << n); ++w) {
      InequalityExpression candidate = relabel_settings(base, w);
      if (expand_to_correlators(candidate) == corr) return candidate;
    }
  }
  return std::nullopt;
}

void finish_visibility(VisibilityResult& out, const PureState& state,
                       const InequalityExpression& corr, const SettingSet& settings) {
  out.attainable = out.max_violation > out.bound;
  if (!out.attainable) {
    out.threshold = 1.0;
    return;
  }
  out.threshold = out.bound / out.max_violation;
  const double above = std::min(1.0, out.threshold + 0.01);
  const double below = std::max(0.0, out.threshold - 0.01);
  out.value_above = evaluate(corr, add_white_noise(state, above), settings);
  out.value_below = evaluate(corr, add_white_noise(state, below), settings);
  out.linearity_error = std::max(std::abs(out.value_above - above * out.max_violation),
                                 std::abs(out.value_below - below * out.max_violation));
  out.bracket_ok = out.value_above > out.bound && out.value_below < out.bound &&
                   out.linearity_error <= 1e-6;
}

}  // namespace

Parametrization parametrization_for(Plane plane) {
  return plane == Plane::XY ? Parametrization::XY : Parametrization::XZ;
}

FullObjective make_full_objective(PureState state, Parametrization param) {
  InequalityExpression prob = build_gwi(state.n_parties());
  InequalityExpression corr = expand_to_correlators(prob);
  return FullObjective{std::move(state), param, std::move(corr), std::move(prob)};
}

FullObjective make_full_objective(PureState state, Parametrization param,
                                  InequalityExpression correlator_expr) {
  if (correlator_expr.form != Form::Correlator) {
    throw ValidationError("make_full_objective: expression must be in correlator form");
  }
  if (correlator_expr.n_parties != state.n_parties()) {
    throw ArityError("make_full_objective: expression and state arity differ");
  }
  auto source = find_probability_source(correlator_expr);
  return FullObjective{std::move(state), param, std::move(correlator_expr), std::move(source)};
}

int dimension(const Objective& objective) {
  if (const auto* r = std::get_if<ReducedObjective>(&objective)) {
    switch (*r) {
      case ReducedObjective::Ghz: return 2;
      case ReducedObjective::Cluster: return 2;
      case ReducedObjective::W: return 5;
    }
  }
  const auto& f = std::get<FullObjective>(objective);
  return angles_per_party(f.param) * f.state.n_parties();
}

SettingSet settings_for(const FullObjective& objective, std::span<const double> angles) {
  const int n = objective.state.n_parties();
  const int per = angles_per_party(objective.param);
  if (angles.size() != static_cast<std::size_t>(per * n)) {
    throw ArityError("settings_for: expected " + std::to_string(per * n) + " angles, got " +
                     std::to_string(angles.size()));
  }
  switch (objective.param) {
    case Parametrization::XY: return setting_set_from_flat(Plane::XY, angles);
    case Parametrization::XZ: return setting_set_from_flat(Plane::XZ, angles);
    case Parametrization::Sphere: break;
  }
  std::vector<SettingPair> pairs;
  for (int k = 0; k < n; ++k) {
    const double* a = angles.data() + 4 * k;
    pairs.push_back({sphere_setting(a[0], a[1]), sphere_setting(a[2], a[3])});
  }
  return SettingSet(std::move(pairs));
}

double objective_value(const Objective& objective, std::span<const double> x) {
  if (const auto* r = std::get_if<ReducedObjective>(&objective)) {
    if (x.size() != static_cast<std::size_t>(dimension(objective))) {
      throw ArityError("objective_value: wrong number of reduced angles");
    }
    switch (*r) {
      case ReducedObjective::Ghz: return ghz_reduced(x[0], x[1]);
      case ReducedObjective::Cluster: return cluster_reduced(x[0], x[1]);
      case ReducedObjective::W: return w_reduced(x[0], x[1], x[2], x[3], x[4]);
    }
  }
  const auto& f = std::get<FullObjective>(objective);
  const SettingSet settings = settings_for(f, x);
  if (f.probability_source) {
    const double vp = evaluate(*f.probability_source, f.state, settings);
    const double scale = static_cast<double>(correlator_scale(f.state.n_parties()));
    return scale * (vp - f.probability_source->bound.to_double()) + f.expr.bound.to_double();
  }
  return evaluate(f.expr, f.state, settings);
}

std::vector<double> reduced_settings(ReducedObjective which, std::span<const double> r) {
  const auto expected = static_cast<std::size_t>(dimension(Objective{which}));
  if (r.size() != expected) throw ArityError("reduced_settings: wrong number of reduced angles");
  switch (which) {
    case ReducedObjective::Ghz: {
      const double phi = r[0] / 4.0;
      return {phi, phi + r[1], phi, phi + r[1], phi, phi + r[1], phi, phi + r[1]};
    }
    case ReducedObjective::Cluster: {
      const double p = r[0], q = r[1];
      return {p, q, -p, kTwoPi - q, -p, -q, p, q - kTwoPi};
    }
    case ReducedObjective::W:
      return {0.0, r[0], r[1], r[2], r[3], r[4], r[1], r[2]};
  }
  return {};
}

Plane reduced_plane(ReducedObjective which) {
  return which == ReducedObjective::Ghz ? Plane::XY : Plane::XZ;
}

PureState reduced_state(ReducedObjective which) {
  switch (which) {
    case ReducedObjective::Ghz: return make_ghz(4);
    case ReducedObjective::Cluster: return make_cluster4();
    case ReducedObjective::W: return make_w(4);
  }
  return make_ghz(4);
}

std::string_view to_string(ReducedObjective which) {
  switch (which) {
    case ReducedObjective::Ghz: return "ghz-reduced";
    case ReducedObjective::Cluster: return "cluster-reduced";
    case ReducedObjective::W: return "w-reduced";
  }
  return "?";
}

OptimizerConfig default_config(const Objective& objective) {
  OptimizerConfig c;
  if (std::holds_alternative<FullObjective>(objective)) c.restarts = 256;
  return c;
}

LocalSearchResult nelder_mead_maximize(const std::function<double(std::span<const double>)>& f,
                                       std::vector<double> start, double step, double tol,
                                       int max_iters) {
  const std::size_t dim = start.size();
  std::vector<std::vector<double>> pts(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += step;
  std::vector<double> vals(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) vals[i] = f(pts[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  auto along = [&](std::vector<double>& out, double t, const std::vector<double>& from) {
    // out = centroid + t * (centroid - from)
    for (std::size_t j = 0; j < dim; ++j) out[j] = centroid[j] + t * (centroid[j] - from[j]);
  };

  LocalSearchResult res;
  int it = 0;
  for (; it < max_iters; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[dim - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        diameter = std::max(diameter, std::abs(pts[i][j] - pts[best][j]));
      }
    }
    if (diameter < tol || vals[best] - vals[worst] < kSpreadTol) {
      res.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += pts[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    along(trial, 1.0, pts[worst]);
    const double fr = f(trial);
    if (fr > vals[best]) {
      along(trial2, 2.0, pts[worst]);
      const double fe = f(trial2);
      if (fe > fr) {
        pts[worst] = trial2;
        vals[worst] = fe;
      } else {
        pts[worst] = trial;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr > vals[second]) {
      pts[worst] = trial;
      vals[worst] = fr;
      continue;
    }
    // Contraction: outside when the reflection beat the worst vertex.
    const bool outside = fr > vals[worst];
    along(trial2, outside ? 0.5 : -0.5, pts[worst]);
    const double fc = f(trial2);
    if (outside ? fc >= fr : fc > vals[worst]) {
      pts[worst] = trial2;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < dim; ++j) pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
      vals[i] = f(pts[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  res.x = pts[best];
  res.value = vals[best];
  res.iterations = it;
  return res;
}

std::vector<double> restart_point(std::uint64_t seed, int index, int dim) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 gen(seq);
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (double& v : x) v = static_cast<double>(gen() >> 11) * 0x1.0p-53 * kTwoPi;
  return x;
}

OptimizationResult maximize(const Objective& objective, const OptimizerConfig& config) {
  if (config.restarts < 1) throw DomainError("maximize: restarts must be at least 1");
  if (!(config.tol > 0)) throw DomainError("maximize: tol must be positive");
  if (config.max_iters < 1) throw DomainError("maximize: max_iters must be at least 1");

  const int dim = dimension(objective);
  long evaluations = 0;
  auto f = [&](std::span<const double> x) {
    ++evaluations;
    return objective_value(objective, x);
  };

  OptimizationResult out;
  out.seed = config.seed;
  out.restarts_used = config.restarts;
  bool have = false;
  LocalSearchResult winner;
  for (int r = 0; r < config.restarts; ++r) {
    LocalSearchResult local =
        nelder_mead_maximize(f, restart_point(config.seed, r, dim), config.initial_step, config.tol,
                             config.max_iters);
    if (!have || local.value > winner.value) {
      winner = std::move(local);
      out.best_restart = r;
      have = true;
    }
  }
  out.best_angles = winner.x;
  for (double& a : out.best_angles) a = wrap_angle(a);
  out.best_value = f(out.best_angles);
  out.converged = winner.converged;
  out.evaluations = evaluations;
  return out;
}

VisibilityResult visibility_threshold(const PureState& state, const InequalityExpression& correlator_expr,
                                      Plane plane, const OptimizerConfig& config) {
  if (correlator_expr.form != Form::Correlator) {
    throw ValidationError("visibility_threshold: expression must be in correlator form");
  }
  if (correlator_expr.n_parties != state.n_parties()) {
    throw ArityError("visibility_threshold: expression and state arity differ");
  }
  const Objective objective = make_full_objective(state, parametrization_for(plane), correlator_expr);
  const OptimizationResult best = maximize(objective, config);
  VisibilityResult out;
  out.max_violation = best.best_value;
  out.bound = correlator_expr.bound.to_double();
  out.angles = best.best_angles;
  finish_visibility(out, state, correlator_expr,
                    settings_for(std::get<FullObjective>(objective), best.best_angles));
  return out;
}

VisibilityResult visibility_threshold(ReducedObjective family, const OptimizerConfig& config) {
  const OptimizationResult best = maximize(Objective{family}, config);
  const InequalityExpression corr = build_gwi_correlator(4);
  VisibilityResult out;
  out.max_violation = best.best_value;
  out.bound = corr.bound.to_double();
  out.angles = best.best_angles;
  const std::vector<double> flat = reduced_settings(family, best.best_angles);
  finish_visibility(out, reduced_state(family), corr, setting_set_from_flat(reduced_plane(family), flat));
  return out;
}

}  // namespace gwi
