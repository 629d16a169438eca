#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gwi/observables.hpp"
#include "gwi/qstate.hpp"
#include "gwi/rational.hpp"
#include "json.hpp"

namespace gwi {

// Which of a party's two observables a term uses. Identity only appears in
// correlator terms. The enumerator order is the canonical sort order.
enum class Choice : std::uint8_t { Unprimed = 0, Primed = 1, Identity = 2 };

enum class Form { Probability, Correlator };

// coefficient * p(choice_1 outcome_1, ..., choice_N outcome_N)
struct ProbabilityTerm {
  Rational coefficient;
  std::vector<Choice> choices;
  std::vector<Outcome> outcomes;

  friend bool operator==(const ProbabilityTerm&, const ProbabilityTerm&) = default;
};

// coefficient * < (x)_i choice_i >
struct CorrelatorTerm {
  Rational coefficient;
  std::vector<Choice> choices;

  int identity_count() const;
  friend bool operator==(const CorrelatorTerm&, const CorrelatorTerm&) = default;
};

// Linear expression whose local-realist statement is `value <= bound`.
// Only the term list matching `form` is populated.
struct InequalityExpression {
  Form form = Form::Probability;
  int n_parties = 0;
  std::vector<ProbabilityTerm> probability_terms;
  std::vector<CorrelatorTerm> correlator_terms;
  Rational bound;

  std::size_t size() const {
    return form == Form::Probability ? probability_terms.size() : correlator_terms.size();
  }
  friend bool operator==(const InequalityExpression&, const InequalityExpression&) = default;
};

// N-partite GWI in probability form:
//   p(a_1+,...,a_N+) - sum_k p(a_1+,..,a'_k+,..,a_N+) - p(a'_1-,...,a'_N-) <= 0.
// Bit k of `sign_mask` flips every outcome of party k (0-based), giving the
// sign-flipped members of the family.
InequalityExpression build_gwi(int n, std::uint32_t sign_mask = 0);

// Correlator form of build_gwi(n, sign_mask); bound N.
InequalityExpression build_gwi_correlator(int n, std::uint32_t sign_mask = 0);

// Exchanges the primed and unprimed observable of each party whose bit is
// set in `swap_mask`. Preserves validity of any local-realist inequality.
InequalityExpression relabel_settings(const InequalityExpression& expr, std::uint32_t swap_mask);

// Every sign-flip / relabelling combination of the N-partite GWI
// (4^N probability-form expressions, sign mask major).
std::vector<InequalityExpression> gwi_family(int n);

// Wigner's three-direction inequality p(a+,b+) - p(a+,c+) - p(c+,b+) <= 0.
// Party 1 measures a (unprimed) or c (primed); party 2 measures b or c.
InequalityExpression build_wigner_original();
SettingSet wigner_settings(const Observable& a, const Observable& b, const Observable& c);

// Replaces every probability by 2^-N prod_i (1 + o_i A_i), merges like terms
// exactly, moves the constant into the bound and rescales by 2^N so the
// coefficients of the correlator form are the integers of the printed
// expectation-value forms. Terms are sorted canonically: identity count
// descending, then lexicographically by per-party choice.
InequalityExpression expand_to_correlators(const InequalityExpression& expr);

// Multiplier applied by expand_to_correlators: v_c - bound_c = scale * (v_p - bound_p).
std::int64_t correlator_scale(int n_parties);

double evaluate(const InequalityExpression& expr, const PureState& psi, const SettingSet& settings);
double evaluate(const InequalityExpression& expr, const MixedState& rho, const SettingSet& settings);

// Hardy's special case of the bipartite GWI: p1 = p(a+,b+) > 0 while
// p(a+,b'+) = p(a'+,b+) = p(a'-,b'-) = 0.
struct HardyWitness {
  double p1 = 0, p2 = 0, p3 = 0, p4 = 0;
  bool is_hardy = false;
};

HardyWitness hardy_witness(const PureState& psi, const SettingSet& settings);
HardyWitness hardy_witness(const MixedState& rho, const SettingSet& settings);

// Deterministic renderings, e.g. "<a1 a2> - <a1 a'2> - ... <= 2".
std::string to_text(const InequalityExpression& expr);
nlohmann::json to_json(const InequalityExpression& expr);
std::string term_label(const std::vector<Choice>& choices);

}  // namespace gwi
