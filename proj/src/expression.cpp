#include "gwi/expression.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "gwi/error.hpp"
#include "gwi/tolerance.hpp"

namespace gwi {
namespace {

constexpr int kMaxExpressionParties = 10;

void check_gwi_arity(int n, const char* what) {
  if (n < 2 || n > kMaxExpressionParties) {
    throw ArityError(std::string(what) + ": GWI needs between 2 and " +
                     std::to_string(kMaxExpressionParties) + " parties, got " + std::to_string(n));
  }
}

bool canonical_less(const CorrelatorTerm& a, const CorrelatorTerm& b) {
  const int ia = a.identity_count();
  const int ib = b.identity_count();
  if (ia != ib) return ia > ib;
  return a.choices < b.choices;
}

ProbabilityTerm make_term(Rational coefficient, std::vector<Choice> choices, Outcome uniform,
                          std::uint32_t sign_mask) {
  std::vector<Outcome> outcomes(choices.size(), uniform);
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if ((sign_mask >> k) & 1U) outcomes[k] = flip(outcomes[k]);
  }
  return {coefficient, std::move(choices), std::move(outcomes)};
}

template <typename State>
void check_eval_arity(const InequalityExpression& expr, const State& state, const SettingSet& settings) {
  if (expr.n_parties != state.n_parties() || expr.n_parties != settings.n_parties()) {
    throw ArityError("evaluate: expression has " + std::to_string(expr.n_parties) +
                     " parties, state " + std::to_string(state.n_parties()) + ", settings " +
                     std::to_string(settings.n_parties()));
  }
}

template <typename State>
double evaluate_impl(const InequalityExpression& expr, const State& state, const SettingSet& settings) {
  check_eval_arity(expr, state, settings);
  const auto n = static_cast<std::size_t>(expr.n_parties);
  double value = 0.0;
  if (expr.form == Form::Probability) {
    std::vector<Observable> obs;
    obs.reserve(n);
    for (const auto& t : expr.probability_terms) {
      obs.clear();
      for (std::size_t k = 0; k < n; ++k) {
        obs.push_back(settings.get(static_cast<int>(k), t.choices[k] == Choice::Primed));
      }
      value += t.coefficient.to_double() * joint_probability(state, obs, t.outcomes);
    }
  } else {
    std::vector<Selector> sel(n);
    for (const auto& t : expr.correlator_terms) {
      for (std::size_t k = 0; k < n; ++k) {
        if (t.choices[k] == Choice::Identity) {
          sel[k].reset();
        } else {
          sel[k] = settings.get(static_cast<int>(k), t.choices[k] == Choice::Primed);
        }
      }
      value += t.coefficient.to_double() * expectation(state, sel);
    }
  }
  return value;
}

template <typename State>
HardyWitness hardy_impl(const State& state, const SettingSet& settings) {
  if (state.n_parties() != 2 || settings.n_parties() != 2) {
    throw ArityError("hardy_witness: requires a bipartite state and settings");
  }
  const auto& a = settings[0];
  const auto& b = settings[1];
  auto p = [&](const Observable& x, const Observable& y, Outcome o) {
    const Observable obs[] = {x, y};
    const Outcome out[] = {o, o};
    return joint_probability(state, obs, out);
  };
  HardyWitness w;
  w.p1 = p(a.unprimed, b.unprimed, Outcome::Plus);
  w.p2 = p(a.unprimed, b.primed, Outcome::Plus);
  w.p3 = p(a.primed, b.unprimed, Outcome::Plus);
  w.p4 = p(a.primed, b.primed, Outcome::Minus);
  w.is_hardy = w.p1 > tol::kHardyZero && w.p2 < tol::kHardyZero && w.p3 < tol::kHardyZero &&
               w.p4 < tol::kHardyZero;
  return w;
}

std::string choice_label(Choice c, std::size_t party) {
  const std::string idx = std::to_string(party + 1);
  return c == Choice::Primed ? "a'" + idx : "a" + idx;
}

const char* choice_name(Choice c) {
  switch (c) {
    case Choice::Unprimed: return "unprimed";
    case Choice::Primed: return "primed";
    case Choice::Identity: return "identity";
  }
  return "?";
}

void append_coefficient(std::ostringstream& os, const Rational& c, bool first) {
  const bool negative = c < Rational(0);
  const Rational mag = negative ? -c : c;
  if (first) {
    if (negative) os << "-";
  } else {
    os << (negative ? " - " : " + ");
  }
  if (mag != Rational(1)) os << mag.str() << " ";
}

}  // namespace

int CorrelatorTerm::identity_count() const {
  return static_cast<int>(std::count(choices.begin(), choices.end(), Choice::Identity));
}

InequalityExpression build_gwi(int n, std::uint32_t sign_mask) {
  check_gwi_arity(n, "build_gwi");
  InequalityExpression e;
  e.form = Form::Probability;
  e.n_parties = n;
  e.bound = Rational(0);
  const auto un = static_cast<std::size_t>(n);
  e.probability_terms.push_back(
      make_term(Rational(1), std::vector<Choice>(un, Choice::Unprimed), Outcome::Plus, sign_mask));
  for (std::size_t k = 0; k < un; ++k) {
    std::vector<Choice> ch(un, Choice::Unprimed);
    ch[k] = Choice::Primed;
    e.probability_terms.push_back(make_term(Rational(-1), std::move(ch), Outcome::Plus, sign_mask));
  }
  e.probability_terms.push_back(
      make_term(Rational(-1), std::vector<Choice>(un, Choice::Primed), Outcome::Minus, sign_mask));
  return e;
}

InequalityExpression build_gwi_correlator(int n, std::uint32_t sign_mask) {
  return expand_to_correlators(build_gwi(n, sign_mask));
}

InequalityExpression relabel_settings(const InequalityExpression& expr, std::uint32_t swap_mask) {
  InequalityExpression out = expr;
  auto swap = [&](std::vector<Choice>& ch) {
    for (std::size_t k = 0; k < ch.size(); ++k) {
      if (!((swap_mask >> k) & 1U)) continue;
      if (ch[k] == Choice::Unprimed) {
        ch[k] = Choice::Primed;
      } else if (ch[k] == Choice::Primed) {
        ch[k] = Choice::Unprimed;
      }
    }
  };
  for (auto& t : out.probability_terms) swap(t.choices);
  for (auto& t : out.correlator_terms) swap(t.choices);
  if (out.form == Form::Correlator) {
    std::sort(out.correlator_terms.begin(), out.correlator_terms.end(), canonical_less);
  }
  return out;
}

std::vector<InequalityExpression> gwi_family(int n) {
  check_gwi_arity(n, "gwi_family");
  std::vector<InequalityExpression> family;
  const std::uint32_t masks = 1U << n;
  family.reserve(static_cast<std::size_t>(masks) * masks);
  for (std::uint32_t s = 0; s < masks; ++s) {
    const InequalityExpression base = build_gwi(n, s);
    for (std::uint32_t w = 0; w < masks; ++w) family.push_back(relabel_settings(base, w));
  }
  return family;
}

InequalityExpression build_wigner_original() {
  using C = Choice;
  InequalityExpression e;
  e.form = Form::Probability;
  e.n_parties = 2;
  e.bound = Rational(0);
  const std::vector<Outcome> pp{Outcome::Plus, Outcome::Plus};
  e.probability_terms = {
      {Rational(1), {C::Unprimed, C::Unprimed}, pp},   // p(a+, b+)
      {Rational(-1), {C::Unprimed, C::Primed}, pp},    // p(a+, c+)
      {Rational(-1), {C::Primed, C::Unprimed}, pp},    // p(c+, b+)
  };
  return e;
}

SettingSet wigner_settings(const Observable& a, const Observable& b, const Observable& c) {
  return SettingSet({{a, c}, {b, c}});
}

std::int64_t correlator_scale(int n_parties) { return std::int64_t{1} << n_parties; }

InequalityExpression expand_to_correlators(const InequalityExpression& expr) {
  if (expr.form != Form::Probability) {
    throw ValidationError("expand_to_correlators: expression is already in correlator form");
  }
  const int n = expr.n_parties;
  const auto un = static_cast<std::size_t>(n);
  const Rational scale(correlator_scale(n));

  // After rescaling by 2^N each probability contributes its coefficient times
  // prod_i (1 + o_i A_i); expand over the subsets of parties that keep A_i.
  std::map<std::vector<Choice>, Rational> acc;
  for (const auto& t : expr.probability_terms) {
    if (t.choices.size() != un || t.outcomes.size() != un) {
      throw ArityError("expand_to_correlators: term arity mismatch");
    }
    for (std::uint32_t subset = 0; subset < (1U << n); ++subset) {
      std::vector<Choice> ch(un, Choice::Identity);
      int sign = 1;
      for (std::size_t k = 0; k < un; ++k) {
        if ((subset >> k) & 1U) {
          ch[k] = t.choices[k];
          sign *= sign_of(t.outcomes[k]);
        }
      }
      acc[ch] += t.coefficient * Rational(sign);
    }
  }

  InequalityExpression out;
  out.form = Form::Correlator;
  out.n_parties = n;
  out.bound = expr.bound * scale;
  const std::vector<Choice> constant(un, Choice::Identity);
  for (auto& [ch, coeff] : acc) {
    if (coeff.is_zero()) continue;
    if (ch == constant) {
      out.bound -= coeff;
    } else {
      out.correlator_terms.push_back({coeff, ch});
    }
  }
  std::sort(out.correlator_terms.begin(), out.correlator_terms.end(), canonical_less);
  return out;
}

double evaluate(const InequalityExpression& expr, const PureState& psi, const SettingSet& settings) {
  return evaluate_impl(expr, psi, settings);
}

double evaluate(const InequalityExpression& expr, const MixedState& rho, const SettingSet& settings) {
  return evaluate_impl(expr, rho, settings);
}

HardyWitness hardy_witness(const PureState& psi, const SettingSet& settings) {
  return hardy_impl(psi, settings);
}

HardyWitness hardy_witness(const MixedState& rho, const SettingSet& settings) {
  return hardy_impl(rho, settings);
}

std::string term_label(const std::vector<Choice>& choices) {
  std::string s;
  for (std::size_t k = 0; k < choices.size(); ++k) {
    if (choices[k] == Choice::Identity) continue;
    if (!s.empty()) s += " ";
    s += choice_label(choices[k], k);
  }
  return s;
}

std::string to_text(const InequalityExpression& expr) {
  std::ostringstream os;
  bool first = true;
  if (expr.form == Form::Probability) {
    for (const auto& t : expr.probability_terms) {
      append_coefficient(os, t.coefficient, first);
      first = false;
      os << "p(";
      for (std::size_t k = 0; k < t.choices.size(); ++k) {
        if (k) os << ",";
        os << choice_label(t.choices[k], k) << (t.outcomes[k] == Outcome::Plus ? "+" : "-");
      }
      os << ")";
    }
  } else {
    for (const auto& t : expr.correlator_terms) {
      append_coefficient(os, t.coefficient, first);
      first = false;
      os << "<" << term_label(t.choices) << ">";
    }
  }
  if (first) os << "0";
  os << " <= " << expr.bound.str();
  return os.str();
}

nlohmann::json to_json(const InequalityExpression& expr) {
  nlohmann::json terms = nlohmann::json::array();
  if (expr.form == Form::Probability) {
    for (const auto& t : expr.probability_terms) {
      nlohmann::json ch = nlohmann::json::array();
      nlohmann::json out = nlohmann::json::array();
      for (std::size_t k = 0; k < t.choices.size(); ++k) {
        ch.push_back(choice_name(t.choices[k]));
        out.push_back(t.outcomes[k] == Outcome::Plus ? "+" : "-");
      }
      terms.push_back({{"coefficient", t.coefficient.str()}, {"choices", ch}, {"outcomes", out}});
    }
  } else {
    for (const auto& t : expr.correlator_terms) {
      nlohmann::json ch = nlohmann::json::array();
      for (Choice c : t.choices) ch.push_back(choice_name(c));
      terms.push_back({{"coefficient", t.coefficient.str()}, {"choices", ch}, {"label", term_label(t.choices)}});
    }
  }
  return {{"form", expr.form == Form::Probability ? "probability" : "correlator"},
          {"n", expr.n_parties},
          {"bound", expr.bound.str()},
          {"terms", terms},
          {"text", to_text(expr)}};
}

}  // namespace gwi
