#include <cmath>
#include <numbers>

#include "cli.hpp"
#include "gwi/gwi.hpp"

namespace gwi::cli {

namespace {

Row numeric(std::string metric, double target, int target_digits, double value, double tolerance) {
  Row r;
  r.metric = std::move(metric);
  r.target = format_double(target, target_digits);
  r.value = format_double(value);
  r.tolerance = tolerance;
  r.pass = std::abs(value - target) <= tolerance;
  return r;
}

Row exact(std::string metric, const std::string& target, const std::string& value) {
  Row r;
  r.metric = std::move(metric);
  r.target = target;
  r.value = value;
  r.pass = target == value;
  return r;
}

Row info(std::string metric, std::string value, std::string target = {}) {
  Row r;
  r.metric = std::move(metric);
  r.target = std::move(target);
  r.value = std::move(value);
  r.informational = true;
  return r;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i], 4);
  return s;
}

struct Family {
  ReducedObjective which;
  const char* name;
  double max_target;
  double visibility_target;
  std::vector<std::vector<double>> printed_angles;
};

}  // namespace

int reproduce(const ReproduceOptions& options, std::ostream& out, std::ostream& err) {
  RunReport rep;
  rep.command = "reproduce";
  rep.inputs = {{"format", options.format}, {"seed", options.seed}};
  std::vector<Row> rows;
  nlohmann::json headline;
  const auto start = std::chrono::steady_clock::now();

  const std::vector<Family> families = {
      {ReducedObjective::Ghz, "ghz", 5.6568, 0.7071, {{0.6981, 2.2427}, {5.5938, 4.0492}}},
      {ReducedObjective::Cluster, "cluster", 5.7442, 0.6964, {{0.3578, 2.2689}, {5.9341, 4.0230}}},
      {ReducedObjective::W, "w", 6.5603, 0.6097, {{2.271, 0.131, 2.298, -2.557, -0.892}}},
  };

  {
    PhaseTimer t(rep, "maxima");
    for (const Family& f : families) {
      OptimizerConfig cfg = default_config(Objective{f.which});
      cfg.seed = options.seed;
      const VisibilityResult v = visibility_threshold(f.which, cfg);
      const std::string name = f.name;
      rows.push_back(numeric(name + " maximum (reduced)", f.max_target, 4, v.max_violation, 1e-4));
      rows.push_back(info(name + " optimal angles", join(v.angles)));
      rows.push_back(numeric(name + " visibility", f.visibility_target, 4, v.threshold, 1e-3));
      rows.push_back(exact(name + " visibility bracket", "true", v.bracket_ok ? "true" : "false"));
      headline[name + "_max"] = v.max_violation;
      headline[name + "_visibility"] = v.threshold;
      for (const auto& a : f.printed_angles) {
        rows.push_back(info(name + " value at printed angles (" + join(a) + ")",
                            format_double(objective_value(Objective{f.which}, a)), format_double(f.max_target, 4)));
      }
    }
  }

  {
    PhaseTimer t(rep, "lhv");
    for (int n = 2; n <= 5; ++n) {
      rows.push_back(exact("lhv bound correlator n=" + std::to_string(n), std::to_string(n),
                           lhv_max(build_gwi_correlator(n)).value.str()));
      rows.push_back(exact("lhv bound probability n=" + std::to_string(n), "0", lhv_max(build_gwi(n)).value.str()));
    }
    for (int n = 2; n <= 6; ++n) {
      const MarginalIdentity m = verify_marginal_identity(n);
      Row r = exact("identity terms n=" + std::to_string(n), std::to_string(static_cast<std::int64_t>(n) << n),
                    std::to_string(m.residual_count));
      r.pass = r.pass && m.all_nonneg;
      rows.push_back(r);
    }
  }

  {
    PhaseTimer t(rep, "full_plane");
    const struct {
      const char* name;
      PureState state;
      Plane plane;
    } full[] = {{"ghz", make_ghz(4), Plane::XY}, {"cluster", make_cluster4(), Plane::XZ}, {"w", make_w(4), Plane::XZ}};
    for (const auto& f : full) {
      const Objective objective{make_full_objective(f.state, parametrization_for(f.plane))};
      OptimizerConfig cfg = default_config(objective);
      cfg.seed = options.seed;
      const OptimizationResult r = maximize(objective, cfg);
      const std::string plane(to_string(f.plane));
      rows.push_back(info(std::string(f.name) + " maximum (full " + plane + " plane)", format_double(r.best_value)));
      rows.push_back(info(std::string(f.name) + " visibility (full " + plane + " plane)",
                          format_double(4.0 / r.best_value)));
    }
  }

  bool all_pass = true;
  nlohmann::json jrows = nlohmann::json::array();
  std::vector<Row> failures;
  for (const Row& r : rows) {
    jrows.push_back(to_json(r));
    if (!r.informational && !r.pass) {
      all_pass = false;
      failures.push_back(r);
    }
  }
  rep.outputs = {{"rows", jrows}, {"headline", headline}, {"all_pass", all_pass}};
  record_total(rep, start);

  if (options.format == "csv") {
    out << to_csv(rows);
  } else if (options.format == "markdown") {
    out << to_markdown(rows);
  } else {
    out << rep.to_json().dump(2) << '\n';
  }
  if (!all_pass) {
    err << "reproduction mismatch:\n" << to_markdown(failures);
    return kMismatch;
  }
  return kOk;
}

}  // namespace gwi::cli
