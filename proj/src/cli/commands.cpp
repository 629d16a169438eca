#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "CLI11.hpp"
#include "cli.hpp"
#include "gwi/gwi.hpp"

namespace gwi::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

double finite_or_throw(double x, const char* what) {
  if (!std::isfinite(x)) throw NumericalFailure(std::string(what) + " is not finite");
  return x;
}

json bloch_json(const Observable& o) { return json::array({o.bloch()(0), o.bloch()(1), o.bloch()(2)}); }

json settings_json(const SettingSet& s) {
  json arr = json::array();
  for (const SettingPair& p : s.pairs()) arr.push_back({{"unprimed", bloch_json(p.unprimed)}, {"primed", bloch_json(p.primed)}});
  return arr;
}

json outcomes_json(const std::vector<Outcome>& o) {
  json arr = json::array();
  for (Outcome x : o) arr.push_back(sign_of(x));
  return arr;
}

// ---- state selection ----

struct StateArgs {
  std::string state = "ghz";
  std::optional<int> n;
  std::string base = "ghz";
  std::string file;

  void add(CLI::App& app) {
    app.add_option("--state", state, "ghz | cluster4 | w | singlet | mixed:<v> | file");
    app.add_option("--n", n, "number of parties")->check(CLI::Range(1, 10));
    app.add_option("--base", base, "pure state mixed with white noise by --state mixed:<v>");
    app.add_option("--state-file", file, "JSON {\"n\", \"amplitudes\": [[re, im], ...]} for --state file");
  }
};

int default_arity(const std::string& name) { return name == "singlet" ? 2 : 4; }

PureState named_state(const std::string& name, std::optional<int> n, const std::string& file) {
  const int k = n.value_or(default_arity(name));
  if (name == "ghz") return make_ghz(k);
  if (name == "w") return make_w(k);
  if (name == "cluster4" || name == "cluster") {
    if (k != 4) throw ArityError("cluster4 has 4 parties, got --n " + std::to_string(k));
    return make_cluster4();
  }
  if (name == "singlet") {
    if (k != 2) throw ArityError("singlet has 2 parties, got --n " + std::to_string(k));
    return make_singlet();
  }
  if (name == "file") {
    if (file.empty()) throw UsageError("--state file requires --state-file");
    const json j = read_json_file(file);
    if (!j.contains("n") || !j.contains("amplitudes") || !j["amplitudes"].is_array())
      throw ValidationError(file + ": expected keys n and amplitudes");
    const int fn = j["n"].get<int>();
    if (n && *n != fn) throw ArityError("--n " + std::to_string(*n) + " does not match state file n " + std::to_string(fn));
    const json& a = j["amplitudes"];
    Eigen::VectorXcd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
      const json& x = a[i];
      if (x.is_number()) {
        v(static_cast<Eigen::Index>(i)) = x.get<double>();
      } else if (x.is_array() && x.size() == 2) {
        v(static_cast<Eigen::Index>(i)) = Complex(x[0].get<double>(), x[1].get<double>());
      } else {
        throw ValidationError(file + ": amplitude must be a number or [re, im]");
      }
    }
    return PureState(fn, v);
  }
  throw UsageError("unknown state '" + name + "'");
}

struct ResolvedState {
  std::optional<PureState> pure;
  std::optional<MixedState> mixed;
  int n = 0;
};

ResolvedState resolve_state(const StateArgs& a) {
  ResolvedState r;
  if (a.state.rfind("mixed:", 0) == 0) {
    double v = 0;
    try {
      std::size_t used = 0;
      v = std::stod(a.state.substr(6), &used);
      if (used != a.state.size() - 6) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw UsageError("--state mixed:<v> needs a number, got '" + a.state + "'");
    }
    r.mixed = add_white_noise(named_state(a.base, a.n, a.file), v);
    r.n = r.mixed->n_parties();
  } else {
    r.pure = named_state(a.state, a.n, a.file);
    r.n = r.pure->n_parties();
  }
  return r;
}

PureState require_pure(const ResolvedState& r, const std::string& cmd) {
  if (!r.pure) throw ValidationError(cmd + " requires a pure state");
  return *r.pure;
}

// ---- settings selection ----

struct SettingsArgs {
  std::string plane = "xy";
  std::vector<double> angles;
  std::vector<double> ghz_reduced;
  std::vector<double> cluster_reduced;
  std::vector<double> w_reduced;
  std::string file;
  bool degrees = false;

  void add(CLI::App& app) {
    app.add_option("--plane", plane, "xy | xz")->check(CLI::IsMember({"xy", "xz", "XY", "XZ"}));
    app.add_option("--angles", angles, "phi_1 phi'_1 ... phi_N phi'_N")->expected(1, -1);
    app.add_option("--ghz-reduced", ghz_reduced, "alpha beta")->expected(2);
    app.add_option("--cluster-reduced", cluster_reduced, "phi_1 phi'_1")->expected(2);
    app.add_option("--w-reduced", w_reduced, "phi'_1 phi_2 phi'_2 phi_3 phi'_3")->expected(5);
    app.add_option("--settings", file, "settings JSON file");
    app.add_flag("--degrees", degrees, "angles given in degrees");
  }
};

std::vector<double> to_radians(std::vector<double> v, bool degrees) {
  if (degrees)
    for (double& x : v) x *= std::numbers::pi / 180.0;
  return v;
}

SettingSet settings_from_file(const std::string& path) {
  const json j = read_json_file(path);
  if (j.contains("bloch_pairs")) {
    std::vector<SettingPair> pairs;
    for (const json& p : j["bloch_pairs"]) {
      if (!p.is_array() || p.size() != 2) throw ValidationError(path + ": each bloch pair needs two vectors");
      const auto vec = [&](const json& v) {
        if (!v.is_array() || v.size() != 3) throw ValidationError(path + ": Bloch vector needs 3 components");
        return Observable(Eigen::Vector3d(v[0].get<double>(), v[1].get<double>(), v[2].get<double>()));
      };
      pairs.push_back({vec(p[0]), vec(p[1])});
    }
    return SettingSet(pairs);
  }
  if (!j.contains("plane") || !j.contains("pairs")) throw ValidationError(path + ": expected plane and pairs, or bloch_pairs");
  std::vector<std::pair<double, double>> ang;
  for (const json& p : j["pairs"]) {
    if (!p.is_array() || p.size() != 2) throw ValidationError(path + ": each pair needs two angles");
    ang.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return setting_set_from_angles(parse_plane(j["plane"].get<std::string>()), ang);
}

SettingSet resolve_settings(const SettingsArgs& a, int n, json& echo) {
  const int given = !a.angles.empty() + !a.ghz_reduced.empty() + !a.cluster_reduced.empty() + !a.w_reduced.empty() +
                    !a.file.empty();
  if (given != 1)
    throw UsageError("give exactly one of --angles, --ghz-reduced, --cluster-reduced, --w-reduced, --settings");
  if (!a.file.empty()) {
    echo["settings_file"] = a.file;
    return settings_from_file(a.file);
  }
  const auto reduced = [&](ReducedObjective which, const std::vector<double>& raw) {
    if (n != 4) throw ArityError(std::string(to_string(which)) + " settings need 4 parties");
    const std::vector<double> r = to_radians(raw, a.degrees);
    echo["reduced"] = {{"objective", to_string(which)}, {"angles", r}};
    const std::vector<double> flat = reduced_settings(which, r);
    echo["plane"] = to_string(reduced_plane(which));
    echo["angles"] = flat;
    return setting_set_from_flat(reduced_plane(which), flat);
  };
  if (!a.ghz_reduced.empty()) return reduced(ReducedObjective::Ghz, a.ghz_reduced);
  if (!a.cluster_reduced.empty()) return reduced(ReducedObjective::Cluster, a.cluster_reduced);
  if (!a.w_reduced.empty()) return reduced(ReducedObjective::W, a.w_reduced);
  const std::vector<double> flat = to_radians(a.angles, a.degrees);
  const Plane plane = parse_plane(a.plane);
  echo["plane"] = to_string(plane);
  echo["angles"] = flat;
  return setting_set_from_flat(plane, flat);
}

// ---- optimizer configuration ----

struct ConfigArgs {
  std::optional<int> restarts;
  std::optional<double> tol;
  std::optional<int> max_iters;

  void add(CLI::App& app) {
    app.add_option("--restarts", restarts, "multistart count");
    app.add_option("--tol", tol, "simplex diameter tolerance");
    app.add_option("--max-iters", max_iters, "iterations per restart");
  }

  OptimizerConfig resolve(OptimizerConfig base, std::uint64_t seed) const {
    base.seed = seed;
    if (restarts) base.restarts = *restarts;
    if (tol) base.tol = *tol;
    if (max_iters) base.max_iters = *max_iters;
    return base;
  }
};

json config_json(const OptimizerConfig& c) {
  return {{"restarts", c.restarts}, {"seed", c.seed}, {"tol", c.tol}, {"max_iters", c.max_iters}};
}

json optimization_json(const OptimizationResult& r) {
  return {{"best_value", finite_or_throw(r.best_value, "best value")},
          {"best_angles", r.best_angles},
          {"restarts_used", r.restarts_used},
          {"seed", r.seed},
          {"converged", r.converged},
          {"best_restart", r.best_restart},
          {"evaluations", r.evaluations}};
}

json visibility_json(const VisibilityResult& v) {
  return {{"threshold", finite_or_throw(v.threshold, "threshold")},
          {"max_violation", v.max_violation},
          {"bound", v.bound},
          {"attainable", v.attainable},
          {"angles", v.angles},
          {"value_above", v.value_above},
          {"value_below", v.value_below},
          {"bracket_ok", v.bracket_ok},
          {"linearity_error", v.linearity_error}};
}

Form parse_form(const std::string& s) { return s == "probability" ? Form::Probability : Form::Correlator; }

InequalityExpression gwi_of_form(int n, Form form, std::uint32_t mask) {
  return form == Form::Probability ? build_gwi(n, mask) : build_gwi_correlator(n, mask);
}

Parametrization parse_parametrization(const std::string& s) {
  if (s == "sphere") return Parametrization::Sphere;
  return parametrization_for(parse_plane(s));
}

std::optional<ReducedObjective> parse_reduced(const std::string& s) {
  for (ReducedObjective r : {ReducedObjective::Ghz, ReducedObjective::Cluster, ReducedObjective::W})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

// ---- command bodies ----

RunReport cmd_evaluate(const StateArgs& sa, const SettingsArgs& st, const std::string& form_name, std::uint32_t mask) {
  RunReport rep;
  rep.command = "evaluate";
  rep.inputs = {{"state", sa.state}, {"form", form_name}, {"sign_mask", mask}};
  if (sa.state.rfind("mixed:", 0) == 0) rep.inputs["base"] = sa.base;
  const ResolvedState state = resolve_state(sa);
  rep.inputs["n"] = state.n;
  const SettingSet settings = resolve_settings(st, state.n, rep.inputs);
  if (settings.n_parties() != state.n)
    throw ArityError("settings have " + std::to_string(settings.n_parties()) + " parties, state has " +
                     std::to_string(state.n));
  const InequalityExpression expr = gwi_of_form(state.n, parse_form(form_name), mask);
  double value = 0;
  {
    PhaseTimer t(rep, "evaluate");
    value = state.pure ? evaluate(expr, *state.pure, settings) : evaluate(expr, *state.mixed, settings);
  }
  finite_or_throw(value, "value");
  const double bound = expr.bound.to_double();
  rep.outputs = {{"value", value},
                 {"bound", expr.bound.str()},
                 {"violated", value > bound + tol::kNumerical},
                 {"expression", to_text(expr)},
                 {"settings", settings_json(settings)}};
  if (state.n == 2 && mask == 0) {
    const HardyWitness h = state.pure ? hardy_witness(*state.pure, settings) : hardy_witness(*state.mixed, settings);
    rep.outputs["hardy"] = {{"p1", h.p1}, {"p2", h.p2}, {"p3", h.p3}, {"p4", h.p4}, {"is_hardy", h.is_hardy}};
  }
  return rep;
}

RunReport cmd_optimize(const std::string& objective_name, const StateArgs& sa, const std::string& param_name,
                       const ConfigArgs& ca, std::uint64_t seed) {
  RunReport rep;
  rep.command = "optimize";
  rep.inputs["objective"] = objective_name;
  std::optional<Objective> objective;
  if (auto r = parse_reduced(objective_name)) {
    objective = *r;
  } else {
    const ResolvedState state = resolve_state(sa);
    rep.inputs.update({{"state", sa.state}, {"n", state.n}, {"plane", param_name}});
    objective = make_full_objective(require_pure(state, "optimize"), parse_parametrization(param_name));
  }
  const OptimizerConfig cfg = ca.resolve(default_config(*objective), seed);
  rep.inputs["config"] = config_json(cfg);
  OptimizationResult r;
  {
    PhaseTimer t(rep, "optimize");
    r = maximize(*objective, cfg);
  }
  rep.outputs = optimization_json(r);
  if (auto red = parse_reduced(objective_name)) {
    rep.outputs["plane"] = to_string(reduced_plane(*red));
    rep.outputs["settings_angles"] = reduced_settings(*red, r.best_angles);
  }
  return rep;
}

RunReport cmd_lhv_bound(int n, const std::string& form_name, std::uint32_t mask) {
  RunReport rep;
  rep.command = "lhv bound";
  rep.inputs = {{"n", n}, {"form", form_name}, {"sign_mask", mask}};
  const InequalityExpression expr = gwi_of_form(n, parse_form(form_name), mask);
  const LhvBound b = lhv_max(expr);
  rep.outputs = {{"value", b.value.str()},
                 {"value_double", b.value.to_double()},
                 {"maximizer", {{"index", b.maximizer.index()}, {"outcomes", outcomes_json(b.maximizer.outcomes())}}},
                 {"strategies", std::uint64_t{1} << (2 * n)},
                 {"expression", to_text(expr)}};
  return rep;
}

RunReport cmd_lhv_identity(int n) {
  RunReport rep;
  rep.command = "lhv identity";
  rep.inputs = {{"n", n}};
  const MarginalIdentity m = verify_marginal_identity(n);
  rep.outputs = {{"nonneg", m.all_nonneg},
                 {"count", m.residual_count},
                 {"expected_count", static_cast<std::int64_t>(n) << n},
                 {"atoms", m.coefficients.size()}};
  return rep;
}

RunReport cmd_lhv_jpd(const std::string& path, double tolerance) {
  RunReport rep;
  rep.command = "lhv jpd";
  rep.inputs = {{"behavior", path}, {"tol", tolerance}};
  const Behavior b = Behavior::from_json(read_json_file(path));
  rep.inputs["n"] = b.n_parties();
  const JpdVerdict v = jpd_feasible(b, tolerance);
  rep.outputs = {{"feasible", v.feasible}, {"residual", v.residual}, {"pivots", v.pivots}};
  if (v.witness) {
    json atoms = json::array();
    for (std::size_t s = 0; s < v.witness->atoms.size(); ++s) {
      if (v.witness->atoms[s] <= tol::kLinearProgram) continue;
      atoms.push_back({{"index", s},
                       {"outcomes", outcomes_json(DeterministicStrategy(b.n_parties(), s).outcomes())},
                       {"probability", v.witness->atoms[s]}});
    }
    rep.outputs["witness"] = atoms;
  }
  if (v.violated) {
    rep.outputs["violated"] = {{"expression", to_text(*v.violated)}, {"violation", v.violation}};
  }
  return rep;
}

RunReport cmd_lhv_behavior(const StateArgs& sa, const SettingsArgs& st, const std::string& output) {
  RunReport rep;
  rep.command = "lhv behavior";
  rep.inputs = {{"state", sa.state}};
  const ResolvedState state = resolve_state(sa);
  rep.inputs["n"] = state.n;
  const SettingSet settings = resolve_settings(st, state.n, rep.inputs);
  if (settings.n_parties() != state.n) throw ArityError("settings and state arity differ");
  const Behavior b = state.pure ? behavior_from_state(*state.pure, settings) : behavior_from_state(*state.mixed, settings);
  rep.outputs = {{"behavior", b.to_json()}};
  if (!output.empty()) {
    std::ofstream f(output);
    if (!f) throw ValidationError("cannot write " + output);
    f << b.to_json().dump(2) << '\n';
    rep.inputs["output"] = output;
  }
  return rep;
}

RunReport cmd_visibility(const StateArgs& sa, std::optional<std::string> plane_name, const std::string& family,
                         const ConfigArgs& ca, std::uint64_t seed) {
  RunReport rep;
  rep.command = "visibility";
  rep.inputs = {{"state", sa.state}, {"family", family}};
  VisibilityResult v;
  if (family == "reduced") {
    std::optional<ReducedObjective> which;
    if (sa.state == "ghz") which = ReducedObjective::Ghz;
    if (sa.state == "cluster4" || sa.state == "cluster") which = ReducedObjective::Cluster;
    if (sa.state == "w") which = ReducedObjective::W;
    if (!which) throw ValidationError("reduced family exists only for ghz, cluster4 and w");
    if (sa.n.value_or(4) != 4) throw ArityError("reduced family needs 4 parties");
    const OptimizerConfig cfg = ca.resolve(default_config(Objective{*which}), seed);
    rep.inputs.update({{"n", 4}, {"plane", to_string(reduced_plane(*which))}, {"config", config_json(cfg)}});
    PhaseTimer t(rep, "optimize");
    v = visibility_threshold(*which, cfg);
  } else {
    const ResolvedState state = resolve_state(sa);
    const PureState psi = require_pure(state, "visibility");
    const Plane plane = parse_plane(plane_name.value_or(sa.state == "ghz" ? "xy" : "xz"));
    const InequalityExpression expr = build_gwi_correlator(state.n);
    const OptimizerConfig cfg =
        ca.resolve(default_config(Objective{make_full_objective(psi, parametrization_for(plane))}), seed);
    rep.inputs.update({{"n", state.n}, {"plane", to_string(plane)}, {"config", config_json(cfg)}});
    PhaseTimer t(rep, "optimize");
    v = visibility_threshold(psi, expr, plane, cfg);
  }
  rep.outputs = visibility_json(v);
  return rep;
}

template <typename F>
void emit(std::ostream& out, F&& command) {
  const auto start = std::chrono::steady_clock::now();
  RunReport rep = command();
  record_total(rep, start);
  out << rep.to_json().dump(2) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized Wigner inequality toolkit", "gwi"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 42;
  app.add_option("--seed", seed, "random seed")->capture_default_str();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "evaluate the GWI on a state and settings");
  StateArgs ev_state;
  SettingsArgs ev_settings;
  std::string ev_form = "correlator";
  std::uint32_t ev_mask = 0;
  ev_state.add(*ev);
  ev_settings.add(*ev);
  ev->add_option("--form", ev_form)->check(CLI::IsMember({"probability", "correlator"}));
  ev->add_option("--sign-mask", ev_mask, "bit k flips party k's outcome labels");

  // optimize
  auto* op = app.add_subcommand("optimize", "maximize a GWI objective over settings");
  std::string op_objective;
  StateArgs op_state;
  std::string op_plane = "xy";
  ConfigArgs op_cfg;
  op->add_option("--objective", op_objective)
      ->required()
      ->check(CLI::IsMember({"ghz-reduced", "cluster-reduced", "w-reduced", "full"}));
  op_state.add(*op);
  op->add_option("--plane", op_plane, "xy | xz | sphere")->check(CLI::IsMember({"xy", "xz", "sphere"}));
  op_cfg.add(*op);

  // lhv
  auto* lhv = app.add_subcommand("lhv", "local hidden variable tools");
  lhv->require_subcommand(1);
  auto* lb = lhv->add_subcommand("bound", "exact LHV bound by strategy enumeration");
  int lb_n = 0;
  std::string lb_form = "correlator";
  std::uint32_t lb_mask = 0;
  lb->add_option("--n", lb_n)->required();
  lb->add_option("--form", lb_form)->check(CLI::IsMember({"probability", "correlator"}));
  lb->add_option("--sign-mask", lb_mask);
  auto* li = lhv->add_subcommand("identity", "check the marginal decomposition identity");
  int li_n = 0;
  li->add_option("--n", li_n)->required();
  auto* lj = lhv->add_subcommand("jpd", "decide whether a behavior has a joint distribution");
  std::string lj_path;
  double lj_tol = tol::kLinearProgram;
  lj->add_option("--behavior", lj_path)->required();
  lj->add_option("--tol", lj_tol);
  auto* lbh = lhv->add_subcommand("behavior", "write the behavior of a state under given settings");
  StateArgs lbh_state;
  SettingsArgs lbh_settings;
  std::string lbh_output;
  lbh_state.add(*lbh);
  lbh_settings.add(*lbh);
  lbh->add_option("--output", lbh_output, "also write the behavior JSON here");

  // visibility
  auto* vi = app.add_subcommand("visibility", "white-noise threshold visibility");
  StateArgs vi_state;
  std::optional<std::string> vi_plane;
  std::string vi_family = "full";
  ConfigArgs vi_cfg;
  vi_state.add(*vi);
  vi->add_option("--plane", vi_plane, "xy | xz (default xy for ghz, xz otherwise)")
      ->check(CLI::IsMember({"xy", "xz"}));
  vi->add_option("--family", vi_family, "full | reduced")->check(CLI::IsMember({"full", "reduced"}));
  vi_cfg.add(*vi);

  // reproduce
  auto* rp = app.add_subcommand("reproduce", "recompute the headline table and compare with targets");
  ReproduceOptions rp_opts;
  rp->add_option("--format", rp_opts.format)->check(CLI::IsMember({"json", "csv", "markdown"}));

  std::vector<std::string> argv_store{"gwi"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*ev) {
      emit(out, [&] { return cmd_evaluate(ev_state, ev_settings, ev_form, ev_mask); });
    } else if (*op) {
      emit(out, [&] { return cmd_optimize(op_objective, op_state, op_plane, op_cfg, seed); });
    } else if (*lb) {
      emit(out, [&] { return cmd_lhv_bound(lb_n, lb_form, lb_mask); });
    } else if (*li) {
      emit(out, [&] { return cmd_lhv_identity(li_n); });
    } else if (*lj) {
      emit(out, [&] { return cmd_lhv_jpd(lj_path, lj_tol); });
    } else if (*lbh) {
      emit(out, [&] { return cmd_lhv_behavior(lbh_state, lbh_settings, lbh_output); });
    } else if (*vi) {
      emit(out, [&] { return cmd_visibility(vi_state, vi_plane, vi_family, vi_cfg, seed); });
    } else if (*rp) {
      rp_opts.seed = seed;
      return reproduce(rp_opts, out, err);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
  return kOk;
}

}  // namespace gwi::cli
