#include "gwi/lhv.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "gwi/error.hpp"
#include "simplex.hpp"

namespace gwi {
namespace {

std::size_t pow2(int n) { return std::size_t{1} << n; }

void check_strategy_arity(const InequalityExpression& expr, int n) {
  if (expr.n_parties != n) {
    throw ArityError("strategy arity " + std::to_string(n) + " does not match expression arity " +
                     std::to_string(expr.n_parties));
  }
}

std::uint64_t strategy_bit(std::size_t party, Choice c) {
  return std::uint64_t{1} << (2 * party + (c == Choice::Primed ? 1 : 0));
}

// Integer form of an expression over strategies: each term is
// (mask, pattern, weight); probability terms count when (s & mask) == pattern,
// correlator terms contribute weight * (-1)^popcount(s & mask).
struct IntegerTerm {
  std::uint64_t mask = 0;
  std::uint64_t pattern = 0;
  std::int64_t weight = 0;
};

struct IntegerExpression {
  bool probability = true;
  std::int64_t denominator = 1;
  std::vector<IntegerTerm> terms;
};

IntegerExpression to_integer(const InequalityExpression& expr) {
  IntegerExpression ie;
  ie.probability = expr.form == Form::Probability;
  auto lcm_with = [&](const Rational& c) { ie.denominator = std::lcm(ie.denominator, c.den()); };
  for (const auto& t : expr.probability_terms) lcm_with(t.coefficient);
  for (const auto& t : expr.correlator_terms) lcm_with(t.coefficient);
  auto weight = [&](const Rational& c) { return c.num() * (ie.denominator / c.den()); };
  for (const auto& t : expr.probability_terms) {
    IntegerTerm it;
    for (std::size_t k = 0; k < t.choices.size(); ++k) {
      const std::uint64_t bit = strategy_bit(k, t.choices[k]);
      it.mask |= bit;
      if (t.outcomes[k] == Outcome::Minus) it.pattern |= bit;
    }
    it.weight = weight(t.coefficient);
    ie.terms.push_back(it);
  }
  for (const auto& t : expr.correlator_terms) {
    IntegerTerm it;
    for (std::size_t k = 0; k < t.choices.size(); ++k) {
      if (t.choices[k] != Choice::Identity) it.mask |= strategy_bit(k, t.choices[k]);
    }
    it.weight = weight(t.coefficient);
    ie.terms.push_back(it);
  }
  return ie;
}

std::int64_t integer_value(const IntegerExpression& ie, std::uint64_t s) {
  std::int64_t v = 0;
  if (ie.probability) {
    for (const auto& t : ie.terms) {
      if ((s & t.mask) == t.pattern) v += t.weight;
    }
  } else {
    for (const auto& t : ie.terms) v += (std::popcount(s & t.mask) & 1) ? -t.weight : t.weight;
  }
  return v;
}

// Whether strategy `s` reproduces outcome index `o` under choice combination `c`.
bool strategy_matches(int n, std::uint64_t s, std::size_t c, std::size_t o) {
  for (int k = 0; k < n; ++k) {
    const std::size_t bb = basis_bit(n, k);
    const bool primed = (c & bb) != 0;
    const bool minus = (s >> (2 * k + (primed ? 1 : 0))) & 1U;
    if (minus != ((o & bb) != 0)) return false;
  }
  return true;
}

template <typename State>
Behavior behavior_impl(const State& state, const SettingSet& settings) {
  const int n = state.n_parties();
  if (settings.n_parties() != n) throw ArityError("behavior_from_state: settings arity mismatch");
  const std::size_t d = pow2(n);
  std::vector<std::vector<double>> dist(d, std::vector<double>(d));
  std::vector<Observable> obs;
  std::vector<Outcome> out(static_cast<std::size_t>(n));
  for (std::size_t c = 0; c < d; ++c) {
    obs.clear();
    for (int k = 0; k < n; ++k) obs.push_back(settings.get(k, (c & basis_bit(n, k)) != 0));
    for (std::size_t o = 0; o < d; ++o) {
      for (int k = 0; k < n; ++k) {
        out[static_cast<std::size_t>(k)] = (o & basis_bit(n, k)) ? Outcome::Minus : Outcome::Plus;
      }
      dist[c][o] = joint_probability(state, obs, out);
    }
  }
  return Behavior(n, std::move(dist));
}

std::string bitstring(std::size_t value, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int k = 0; k < n; ++k) {
    if (value & basis_bit(n, k)) s[static_cast<std::size_t>(k)] = '1';
  }
  return s;
}

}  // namespace

DeterministicStrategy::DeterministicStrategy(int n_parties, std::uint64_t index)
    : n_(n_parties), bits_(index) {
  if (n_parties < 1 || n_parties > 31) throw ArityError("DeterministicStrategy: bad party count");
  if (2 * n_parties < 64 && (index >> (2 * n_parties)) != 0) {
    throw DomainError("DeterministicStrategy: index out of range");
  }
}

DeterministicStrategy DeterministicStrategy::from_outcomes(std::span<const Outcome> outcomes) {
  if (outcomes.empty() || outcomes.size() % 2 != 0) {
    throw ArityError("DeterministicStrategy: expected 2N outcomes");
  }
  std::uint64_t bits = 0;
  for (std::size_t j = 0; j < outcomes.size(); ++j) {
    if (outcomes[j] == Outcome::Minus) bits |= std::uint64_t{1} << j;
  }
  return DeterministicStrategy(static_cast<int>(outcomes.size() / 2), bits);
}

Outcome DeterministicStrategy::outcome(int party, bool primed) const {
  return ((bits_ >> (2 * party + (primed ? 1 : 0))) & 1U) ? Outcome::Minus : Outcome::Plus;
}

std::vector<Outcome> DeterministicStrategy::outcomes() const {
  std::vector<Outcome> v;
  for (int k = 0; k < n_; ++k) {
    v.push_back(outcome(k, false));
    v.push_back(outcome(k, true));
  }
  return v;
}

Behavior::Behavior(int n_parties, std::vector<std::vector<double>> distributions, double tolerance)
    : n_(n_parties), dist_(std::move(distributions)) {
  if (n_ < 1 || n_ > 10) throw ValidationError("Behavior: party count out of range");
  const std::size_t d = pow2(n_);
  if (dist_.size() != d) {
    throw ValidationError("Behavior: expected " + std::to_string(d) + " choice combinations");
  }
  for (std::size_t c = 0; c < d; ++c) {
    if (dist_[c].size() != d) {
      throw ValidationError("Behavior: distribution " + bitstring(c, n_) + " must have " +
                            std::to_string(d) + " entries");
    }
    double sum = 0.0;
    for (double p : dist_[c]) {
      if (!std::isfinite(p) || p < -tolerance) {
        throw ValidationError("Behavior: negative or non-finite probability in " + bitstring(c, n_));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > tolerance) {
      throw ValidationError("Behavior: distribution " + bitstring(c, n_) + " is not normalized");
    }
  }
  // No-signalling: the marginal of the other parties must not depend on which
  // observable party k measures.
  for (int k = 0; k < n_; ++k) {
    const std::size_t bb = basis_bit(n_, k);
    for (std::size_t c = 0; c < d; ++c) {
      if (c & bb) continue;
      for (std::size_t o = 0; o < d; ++o) {
        if (o & bb) continue;
        const double m0 = dist_[c][o] + dist_[c][o | bb];
        const double m1 = dist_[c | bb][o] + dist_[c | bb][o | bb];
        if (std::abs(m0 - m1) > tolerance) {
          throw ValidationError("Behavior: marginals signal through party " + std::to_string(k + 1));
        }
      }
    }
  }
}

Behavior Behavior::from_json(const nlohmann::json& j, double tolerance) {
  if (!j.is_object() || !j.contains("n") || !j.contains("distributions")) {
    throw ValidationError("behavior JSON needs keys \"n\" and \"distributions\"");
  }
  if (!j["n"].is_number_integer()) throw ValidationError("behavior JSON: \"n\" must be an integer");
  const int n = j["n"].get<int>();
  if (n < 1 || n > 10) throw ValidationError("behavior JSON: n out of range");
  const auto& dj = j["distributions"];
  if (!dj.is_object()) throw ValidationError("behavior JSON: \"distributions\" must be an object");
  const std::size_t d = pow2(n);
  std::vector<std::vector<double>> dist(d);
  std::vector<bool> seen(d, false);
  for (const auto& [key, val] : dj.items()) {
    if (key.size() != static_cast<std::size_t>(n) ||
        key.find_first_not_of("01") != std::string::npos) {
      throw ValidationError("behavior JSON: bad choice bitstring '" + key + "'");
    }
    const std::size_t c = std::stoul(key, nullptr, 2);
    if (!val.is_array()) throw ValidationError("behavior JSON: distribution must be an array");
    for (const auto& p : val) {
      if (!p.is_number()) throw ValidationError("behavior JSON: probabilities must be numbers");
      dist[c].push_back(p.get<double>());
    }
    seen[c] = true;
  }
  for (std::size_t c = 0; c < d; ++c) {
    if (!seen[c]) throw ValidationError("behavior JSON: missing combination " + bitstring(c, n));
  }
  return Behavior(n, std::move(dist), tolerance);
}

nlohmann::json Behavior::to_json() const {
  nlohmann::json d = nlohmann::json::object();
  for (std::size_t c = 0; c < dist_.size(); ++c) d[bitstring(c, n_)] = dist_[c];
  return {{"n", n_}, {"distributions", d}};
}

Behavior behavior_from_state(const PureState& psi, const SettingSet& settings) {
  return behavior_impl(psi, settings);
}

Behavior behavior_from_state(const MixedState& rho, const SettingSet& settings) {
  return behavior_impl(rho, settings);
}

Behavior behavior_from_strategy(const DeterministicStrategy& s) {
  JointDistribution jpd;
  jpd.n_parties = s.n_parties();
  jpd.atoms.assign(pow2(2 * s.n_parties()), 0.0);
  jpd.atoms[s.index()] = 1.0;
  return marginals(jpd);
}

Behavior marginals(const JointDistribution& jpd, double tolerance) {
  const int n = jpd.n_parties;
  if (n < 1 || n > kMaxLhvParties) throw ArityError("marginals: party count out of range");
  if (jpd.atoms.size() != pow2(2 * n)) throw ArityError("marginals: expected 4^N atoms");
  const std::size_t d = pow2(n);
  std::vector<std::vector<double>> dist(d, std::vector<double>(d, 0.0));
  for (std::uint64_t s = 0; s < jpd.atoms.size(); ++s) {
    const double w = jpd.atoms[s];
    if (w == 0.0) continue;
    for (std::size_t c = 0; c < d; ++c) {
      std::size_t o = 0;
      for (int k = 0; k < n; ++k) {
        const bool primed = (c & basis_bit(n, k)) != 0;
        if ((s >> (2 * k + (primed ? 1 : 0))) & 1U) o |= basis_bit(n, k);
      }
      dist[c][o] += w;
    }
  }
  return Behavior(n, std::move(dist), tolerance);
}

double evaluate(const InequalityExpression& expr, const Behavior& behavior) {
  const int n = behavior.n_parties();
  if (expr.n_parties != n) throw ArityError("evaluate: behavior arity mismatch");
  const std::size_t d = pow2(n);
  double value = 0.0;
  if (expr.form == Form::Probability) {
    for (const auto& t : expr.probability_terms) {
      std::size_t c = 0, o = 0;
      for (int k = 0; k < n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        if (t.choices[uk] == Choice::Primed) c |= basis_bit(n, k);
        if (t.outcomes[uk] == Outcome::Minus) o |= basis_bit(n, k);
      }
      value += t.coefficient.to_double() * behavior.probability(c, o);
    }
  } else {
    for (const auto& t : expr.correlator_terms) {
      // Identity slots may take either choice: no-signalling makes the
      // marginal independent of it, so use the unprimed one.
      std::size_t c = 0, used = 0;
      for (int k = 0; k < n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        if (t.choices[uk] == Choice::Identity) continue;
        used |= basis_bit(n, k);
        if (t.choices[uk] == Choice::Primed) c |= basis_bit(n, k);
      }
      double corr = 0.0;
      for (std::size_t o = 0; o < d; ++o) {
        corr += ((std::popcount(o & used) & 1) ? -1.0 : 1.0) * behavior.probability(c, o);
      }
      value += t.coefficient.to_double() * corr;
    }
  }
  return value;
}

Rational strategy_value(const InequalityExpression& expr, const DeterministicStrategy& s) {
  check_strategy_arity(expr, s.n_parties());
  Rational v(0);
  for (const auto& t : expr.probability_terms) {
    bool hit = true;
    for (std::size_t k = 0; k < t.choices.size() && hit; ++k) {
      hit = s.outcome(static_cast<int>(k), t.choices[k] == Choice::Primed) == t.outcomes[k];
    }
    if (hit) v += t.coefficient;
  }
  for (const auto& t : expr.correlator_terms) {
    int sign = 1;
    for (std::size_t k = 0; k < t.choices.size(); ++k) {
      if (t.choices[k] != Choice::Identity) {
        sign *= sign_of(s.outcome(static_cast<int>(k), t.choices[k] == Choice::Primed));
      }
    }
    v += t.coefficient * Rational(sign);
  }
  return v;
}

LhvBound lhv_max(const InequalityExpression& expr) {
  const int n = expr.n_parties;
  if (n < 1) throw ArityError("lhv_max: expression has no parties");
  if (n > kMaxLhvParties) {
    throw CapacityError("lhv_max: strategy enumeration supports at most " +
                        std::to_string(kMaxLhvParties) + " parties, got " + std::to_string(n));
  }
  const IntegerExpression ie = to_integer(expr);
  const std::uint64_t count = std::uint64_t{1} << (2 * n);
  std::int64_t best = integer_value(ie, 0);
  std::uint64_t arg = 0;
  for (std::uint64_t s = 1; s < count; ++s) {
    const std::int64_t v = integer_value(ie, s);
    if (v > best) {
      best = v;
      arg = s;
    }
  }
  return {Rational(best, ie.denominator), DeterministicStrategy(n, arg)};
}

MarginalIdentity verify_marginal_identity(int n) {
  if (n < 2 || n > 6) throw ArityError("verify_marginal_identity: n must lie in [2, 6]");
  const auto un = static_cast<std::size_t>(n);
  const auto atoms = pow2(2 * n);
  // Marginals as (mask, pattern) over strategy bits.
  auto marginal = [&](std::vector<Choice> ch, Outcome o) {
    IntegerTerm t;
    for (std::size_t k = 0; k < un; ++k) {
      t.mask |= strategy_bit(k, ch[k]);
      if (o == Outcome::Minus) t.pattern |= strategy_bit(k, ch[k]);
    }
    return t;
  };
  std::vector<IntegerTerm> lhs;
  for (std::size_t k = 0; k < un; ++k) {
    std::vector<Choice> ch(un, Choice::Unprimed);
    ch[k] = Choice::Primed;
    lhs.push_back(marginal(ch, Outcome::Plus));
  }
  lhs.push_back(marginal(std::vector<Choice>(un, Choice::Primed), Outcome::Minus));
  const IntegerTerm rhs = marginal(std::vector<Choice>(un, Choice::Unprimed), Outcome::Plus);

  MarginalIdentity out;
  out.all_nonneg = true;
  out.coefficients.resize(atoms);
  for (std::uint64_t s = 0; s < atoms; ++s) {
    int c = 0;
    for (const auto& t : lhs) c += (s & t.mask) == t.pattern ? 1 : 0;
    c -= (s & rhs.mask) == rhs.pattern ? 1 : 0;
    out.coefficients[s] = c;
    out.all_nonneg = out.all_nonneg && c >= 0;
    out.residual_count += c;
  }
  return out;
}

JpdVerdict jpd_feasible(const Behavior& behavior, double tolerance) {
  const int n = behavior.n_parties();
  if (n > kMaxJpdParties) {
    throw CapacityError("jpd_feasible: linear program supports at most " +
                        std::to_string(kMaxJpdParties) + " parties, got " + std::to_string(n));
  }
  const std::size_t d = pow2(n);
  const std::size_t atoms = pow2(2 * n);
  const auto rows = static_cast<Eigen::Index>(d * d + 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(atoms));
  Eigen::VectorXd b(rows);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t o = 0; o < d; ++o) {
      const auto r = static_cast<Eigen::Index>(c * d + o);
      for (std::uint64_t s = 0; s < atoms; ++s) {
        if (strategy_matches(n, s, c, o)) A(r, static_cast<Eigen::Index>(s)) = 1.0;
      }
      b(r) = behavior.probability(c, o);
    }
  }
  A.row(rows - 1).setOnes();
  b(rows - 1) = 1.0;

  const detail::FeasiblePoint fp = detail::find_feasible_point(A, b, tolerance);
  JpdVerdict v;
  v.feasible = fp.feasible;
  v.residual = fp.residual;
  v.pivots = fp.pivots;
  if (fp.feasible) {
    JointDistribution jpd;
    jpd.n_parties = n;
    jpd.atoms.assign(fp.x.data(), fp.x.data() + fp.x.size());
    v.witness = std::move(jpd);
    return v;
  }
  if (n >= 2) {
    double worst = tolerance;
    for (auto& e : gwi_family(n)) {
      const double val = evaluate(e, behavior) - e.bound.to_double();
      if (val > worst) {
        worst = val;
        v.violated = std::move(e);
        v.violation = val;
      }
    }
  }
  return v;
}

}  // namespace gwi
