#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gwi/expression.hpp"
#include "gwi/observables.hpp"
#include "gwi/qstate.hpp"
#include "gwi/rational.hpp"
#include "json.hpp"

namespace gwi {

// Largest N handled by exhaustive strategy enumeration (4^8 = 65536 strategies).
inline constexpr int kMaxLhvParties = 8;
// Largest N handled by the JPD linear program (4^4 = 256 atoms).
inline constexpr int kMaxJpdParties = 4;

// A +-1 value for each of the 2N observables, ordered
// (v(a_1), v(a'_1), ..., v(a_N), v(a'_N)). Entry j is stored in bit j of the
// index, set for -1, so indices 0 .. 4^N - 1 enumerate all strategies.
class DeterministicStrategy {
 public:
  DeterministicStrategy(int n_parties, std::uint64_t index);
  static DeterministicStrategy from_outcomes(std::span<const Outcome> outcomes);

  int n_parties() const { return n_; }
  std::uint64_t index() const { return bits_; }
  Outcome outcome(int party, bool primed) const;
  std::vector<Outcome> outcomes() const;

 private:
  int n_;
  std::uint64_t bits_;
};

// Outcome distributions for every combination of setting choices.
// Combination and outcome indices both put party 1 in the most significant
// bit; a set choice bit selects the primed observable, a set outcome bit
// means -1.
class Behavior {
 public:
  // Validates shape, non-negativity, normalization and no-signalling to
  // `tolerance`; throws ValidationError on failure.
  Behavior(int n_parties, std::vector<std::vector<double>> distributions, double tolerance = 1e-9);

  int n_parties() const { return n_; }
  std::size_t combinations() const { return dist_.size(); }
  double probability(std::size_t combination, std::size_t outcome) const {
    return dist_[combination][outcome];
  }
  const std::vector<double>& distribution(std::size_t combination) const { return dist_[combination]; }

  static Behavior from_json(const nlohmann::json& j, double tolerance = 1e-9);
  nlohmann::json to_json() const;

 private:
  int n_;
  std::vector<std::vector<double>> dist_;
};

Behavior behavior_from_state(const PureState& psi, const SettingSet& settings);
Behavior behavior_from_state(const MixedState& rho, const SettingSet& settings);
Behavior behavior_from_strategy(const DeterministicStrategy& s);

// Probability of each of the 4^N strategies, indexed by strategy index.
struct JointDistribution {
  int n_parties = 0;
  std::vector<double> atoms;
};

Behavior marginals(const JointDistribution& jpd, double tolerance = 1e-9);

// Expression value on an arbitrary behavior (probability or correlator form).
double evaluate(const InequalityExpression& expr, const Behavior& behavior);

Rational strategy_value(const InequalityExpression& expr, const DeterministicStrategy& s);

struct LhvBound {
  Rational value;
  DeterministicStrategy maximizer;  // lowest-index strategy attaining value
};

// Maximum of the expression over all deterministic strategies, i.e. its bound
// over every local hidden variable model.
LhvBound lhv_max(const InequalityExpression& expr);

struct MarginalIdentity {
  bool all_nonneg = false;
  std::int64_t residual_count = 0;
  // Coefficient of each JPD atom in
  //   sum_k p(a'_k+, rest a+) + p(all a'-) - p(all a+).
  std::vector<int> coefficients;
};

MarginalIdentity verify_marginal_identity(int n);

struct JpdVerdict {
  bool feasible = false;
  std::optional<JointDistribution> witness;
  // On infeasibility: the most violated member of the GWI family, if any
  // member is violated by more than the tolerance.
  std::optional<InequalityExpression> violated;
  double violation = 0.0;
  double residual = 0.0;
  int pivots = 0;
};

JpdVerdict jpd_feasible(const Behavior& behavior, double tolerance = 1e-9);

}  // namespace gwi
