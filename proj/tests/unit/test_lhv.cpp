#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "dense_oracle.hpp"
#include "gwi/error.hpp"
#include "gwi/lhv.hpp"

using namespace gwi;

namespace {

DeterministicStrategy strategy(std::initializer_list<int> signs) {
  std::vector<Outcome> o;
  for (int s : signs) o.push_back(s > 0 ? Outcome::Plus : Outcome::Minus);
  return DeterministicStrategy::from_outcomes(o);
}

SettingSet chsh_optimal() {
  const double pi = std::numbers::pi;
  return SettingSet({{xz_setting(0), xz_setting(pi / 2)}, {xz_setting(pi / 4), xz_setting(-pi / 4)}});
}

// E(xy) for choice bits (x, y) from a bipartite behavior.
double correlator(const Behavior& b, int x, int y) {
  const std::size_t c = static_cast<std::size_t>((x << 1) | y);
  return b.probability(c, 0) - b.probability(c, 1) - b.probability(c, 2) + b.probability(c, 3);
}

// The eight CHSH forms: one minus sign in any of four places, times +-1.
double max_chsh(const Behavior& b) {
  const double e[4] = {correlator(b, 0, 0), correlator(b, 0, 1), correlator(b, 1, 0), correlator(b, 1, 1)};
  double best = -1e9;
  for (int minus = 0; minus < 4; ++minus) {
    double s = 0;
    for (int i = 0; i < 4; ++i) s += (i == minus ? -1 : 1) * e[i];
    best = std::max({best, s, -s});
  }
  return best;
}

}  // namespace

TEST(Strategy, Layout) {
  const DeterministicStrategy s = strategy({+1, -1, -1, +1});
  EXPECT_EQ(s.n_parties(), 2);
  EXPECT_EQ(s.outcome(0, false), Outcome::Plus);
  EXPECT_EQ(s.outcome(0, true), Outcome::Minus);
  EXPECT_EQ(s.outcome(1, false), Outcome::Minus);
  EXPECT_EQ(s.outcome(1, true), Outcome::Plus);
  EXPECT_EQ(s.index(), 0b0110U);
  EXPECT_THROW(DeterministicStrategy(2, 16), DomainError);
}

TEST(StrategyValue, Examples) {
  const InequalityExpression p = build_gwi(2);
  EXPECT_EQ(strategy_value(p, strategy({+1, +1, +1, +1})), Rational(-1));
  // v(a) = v(b) = +1, v(a') = v(b') = -1.
  EXPECT_EQ(strategy_value(p, strategy({+1, -1, +1, -1})), Rational(0));
  EXPECT_EQ(strategy_value(build_gwi_correlator(2), strategy({+1, +1, +1, +1})), Rational(-2));
  EXPECT_THROW(strategy_value(build_gwi(3), strategy({+1, +1, +1, +1})), ArityError);
}

TEST(LhvMax, GwiBounds) {
  EXPECT_EQ(lhv_max(build_gwi_correlator(2)).value, Rational(2));
  EXPECT_EQ(lhv_max(build_gwi(4)).value, Rational(0));
  EXPECT_EQ(lhv_max(build_gwi_correlator(4)).value, Rational(4));
  for (int n = 2; n <= 6; ++n) {
    EXPECT_EQ(lhv_max(build_gwi_correlator(n)).value, Rational(n)) << n;
    EXPECT_EQ(lhv_max(build_gwi(n)).value, Rational(0)) << n;
  }
}

// Wigner's bound needs the singlet's perfect anticorrelation on c: without it
// a strategy reaches 1, with it the maximum is 0.
TEST(LhvMax, WignerOriginalBound) {
  const InequalityExpression e = build_wigner_original();
  EXPECT_EQ(lhv_max(e).value, Rational(1));
  Rational best(-100);
  for (std::uint64_t s = 0; s < 16; ++s) {
    const DeterministicStrategy d(2, s);
    if (d.outcome(0, true) == d.outcome(1, true)) continue;
    best = std::max(best, strategy_value(e, d));
  }
  EXPECT_EQ(best, Rational(0));
}

TEST(LhvMax, CapacityLimit) {
  EXPECT_THROW(lhv_max(build_gwi(9)), CapacityError);
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(lhv_max(build_gwi(8)).value, Rational(0));
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 5.0);
}

TEST(LhvMax, MaximalityAndAttainment) {
  for (const auto& e : {build_gwi(3), build_gwi_correlator(3), build_gwi(2, 0b01), build_gwi_correlator(2, 0b11)}) {
    const LhvBound b = lhv_max(e);
    bool attained = false;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << (2 * e.n_parties)); ++s) {
      const Rational v = strategy_value(e, DeterministicStrategy(e.n_parties, s));
      EXPECT_LE(v, b.value);
      attained = attained || v == b.value;
    }
    EXPECT_TRUE(attained);
    EXPECT_EQ(strategy_value(e, b.maximizer), b.value);
  }
}

TEST(LhvMax, NonIntegerCoefficients) {
  InequalityExpression e = build_gwi_correlator(2);
  for (auto& t : e.correlator_terms) t.coefficient = t.coefficient * Rational(1, 3);
  EXPECT_EQ(lhv_max(e).value, Rational(2, 3));
}

TEST(MarginalIdentity, Counts) {
  for (int n = 2; n <= 6; ++n) {
    const MarginalIdentity m = verify_marginal_identity(n);
    EXPECT_TRUE(m.all_nonneg) << n;
    EXPECT_EQ(m.residual_count, static_cast<std::int64_t>(n) << n) << n;
  }
  EXPECT_EQ(verify_marginal_identity(2).residual_count, 8);
  EXPECT_EQ(verify_marginal_identity(3).residual_count, 24);
  EXPECT_EQ(verify_marginal_identity(4).residual_count, 64);
  EXPECT_THROW(verify_marginal_identity(1), ArityError);
  EXPECT_THROW(verify_marginal_identity(7), ArityError);
}

// Atom-counting oracle: the identity coefficient of every atom equals the
// difference of the GWI probability terms' indicator sums.
TEST(MarginalIdentity, AgreesWithStrategyValues) {
  for (int n = 2; n <= 4; ++n) {
    const MarginalIdentity m = verify_marginal_identity(n);
    const InequalityExpression p = build_gwi(n);
    for (std::uint64_t s = 0; s < m.coefficients.size(); ++s) {
      EXPECT_EQ(Rational(-m.coefficients[s]), strategy_value(p, DeterministicStrategy(n, s)));
    }
  }
}

TEST(Behavior, Validation) {
  EXPECT_THROW(Behavior(1, {{0.5, 0.5}}), ValidationError);                      // too few combos
  EXPECT_THROW(Behavior(1, {{0.5, 0.6}, {0.5, 0.5}}), ValidationError);          // unnormalized
  EXPECT_THROW(Behavior(1, {{1.2, -0.2}, {0.5, 0.5}}), ValidationError);         // negative
  // Party 1 signals to party 2: its marginal depends on party 1's choice.
  std::vector<std::vector<double>> sig(4, std::vector<double>(4, 0.25));
  sig[0b10] = {0.5, 0.0, 0.5, 0.0};
  EXPECT_THROW(Behavior(2, sig), ValidationError);
  EXPECT_NO_THROW(Behavior(2, std::vector<std::vector<double>>(4, std::vector<double>(4, 0.25))));
}

TEST(Behavior, JsonRoundTrip) {
  const Behavior b = behavior_from_state(make_singlet(), chsh_optimal());
  const Behavior c = Behavior::from_json(b.to_json());
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t o = 0; o < 4; ++o) EXPECT_DOUBLE_EQ(b.probability(i, o), c.probability(i, o));
  EXPECT_THROW(Behavior::from_json(nlohmann::json::parse(R"({"n":2})")), ValidationError);
  EXPECT_THROW(Behavior::from_json(nlohmann::json::parse(R"({"n":1,"distributions":{"0":[1,0],"2":[1,0]}})")),
               ValidationError);
}

TEST(BehaviorEvaluate, MatchesStateEvaluation) {
  std::mt19937_64 gen(99);
  for (int n = 2; n <= 3; ++n) {
    std::vector<SettingPair> pairs;
    for (int k = 0; k < n; ++k) {
      pairs.push_back({Observable(oracle::random_bloch(gen)), Observable(oracle::random_bloch(gen))});
    }
    const SettingSet s(pairs);
    const PureState psi(n, oracle::random_state(gen, n));
    const Behavior b = behavior_from_state(psi, s);
    for (const auto& e : {build_gwi(n, 1), build_gwi_correlator(n, 2)}) {
      EXPECT_NEAR(evaluate(e, b), evaluate(e, psi, s), 1e-10);
    }
  }
}

TEST(Jpd, ProductStateIsFeasible) {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 10; ++i) {
    const SettingSet s({{Observable(oracle::random_bloch(gen)), Observable(oracle::random_bloch(gen))},
                        {Observable(oracle::random_bloch(gen)), Observable(oracle::random_bloch(gen))}});
    const Behavior b = behavior_from_state(make_basis_state(2, 0), s);
    const JpdVerdict v = jpd_feasible(b);
    ASSERT_TRUE(v.feasible);
    ASSERT_TRUE(v.witness);
    const Behavior m = marginals(*v.witness);
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t o = 0; o < 4; ++o) EXPECT_NEAR(m.probability(c, o), b.probability(c, o), 1e-9);
    for (double a : v.witness->atoms) EXPECT_GE(a, -1e-12);
  }
}

TEST(Jpd, SingletAtChshOptimumIsInfeasible) {
  const Behavior b = behavior_from_state(make_singlet(), chsh_optimal());
  EXPECT_NEAR(max_chsh(b), 2 * std::numbers::sqrt2, 1e-10);
  const JpdVerdict v = jpd_feasible(b);
  EXPECT_FALSE(v.feasible);
  ASSERT_TRUE(v.violated);
  EXPECT_GT(v.violation, 0.1);
  // In correlator units the violated GWI member reaches 2 sqrt 2.
  EXPECT_NEAR(4 * v.violation + 2, 2 * std::numbers::sqrt2, 1e-9);
}

TEST(Jpd, MaximallyMixedHasUniformWitness) {
  const Behavior b = behavior_from_state(maximally_mixed(2), chsh_optimal());
  const JpdVerdict v = jpd_feasible(b);
  ASSERT_TRUE(v.feasible);
  const Behavior m = marginals(*v.witness);
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t o = 0; o < 4; ++o) EXPECT_NEAR(m.probability(c, o), 0.25, 1e-9);
  // The uniform atom distribution is itself a witness.
  JointDistribution uniform{2, std::vector<double>(16, 1.0 / 16)};
  const Behavior u = marginals(uniform);
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t o = 0; o < 4; ++o) EXPECT_NEAR(u.probability(c, o), 0.25, 1e-15);
}

TEST(Jpd, DeterministicBehaviorsHaveOneAtomWitness) {
  for (int n = 1; n <= 3; ++n) {
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << (2 * n)); s += (n == 3 ? 7 : 1)) {
      const JpdVerdict v = jpd_feasible(behavior_from_strategy(DeterministicStrategy(n, s)));
      ASSERT_TRUE(v.feasible);
      EXPECT_NEAR(v.witness->atoms[s], 1.0, 1e-9);
    }
  }
}

TEST(Jpd, FourPartyGhzOptimumIsInfeasible) {
  std::vector<std::pair<double, double>> ang;
  for (int k = 0; k < 4; ++k) ang.emplace_back(0.690596 / 4, 0.690596 / 4 + 2.237036);
  const SettingSet s = setting_set_from_angles(Plane::XY, ang);
  const JpdVerdict v = jpd_feasible(behavior_from_state(make_ghz(4), s));
  EXPECT_FALSE(v.feasible);
  ASSERT_TRUE(v.violated);
  EXPECT_NEAR(16 * v.violation + 4, 4 * std::numbers::sqrt2, 1e-4);
  EXPECT_THROW(jpd_feasible(behavior_from_state(make_ghz(5), setting_set_from_flat(Plane::XY, std::vector<double>(10, 0.0)))),
               CapacityError);
}

// Fine-style equivalence at n = 2 on mixtures of quantum, PR-box and local
// behaviors.
TEST(Jpd, AgreesWithChshAtTwoParties) {
  std::mt19937_64 gen(2718);
  std::uniform_real_distribution<double> u(0, 1);
  const double tol = 1e-9;
  int decided = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const SettingSet s({{Observable(oracle::random_bloch(gen)), Observable(oracle::random_bloch(gen))},
                        {Observable(oracle::random_bloch(gen)), Observable(oracle::random_bloch(gen))}});
    const MixedState rho = add_white_noise(PureState(2, oracle::random_state(gen, 2)), u(gen));
    const Behavior q = behavior_from_state(rho, s);
    // Optional PR-box admixture: P(ab|xy) = 1/2 when a xor b = x and y.
    const double w = trial % 3 == 0 ? 0.3 * u(gen) : 0.0;
    std::vector<std::vector<double>> dist(4, std::vector<double>(4));
    for (std::size_t c = 0; c < 4; ++c) {
      const int xy = static_cast<int>((c >> 1) & c & 1U);
      for (std::size_t o = 0; o < 4; ++o) {
        const int parity = static_cast<int>(((o >> 1) ^ o) & 1U);
        dist[c][o] = (1 - w) * q.probability(c, o) + w * (parity == xy ? 0.5 : 0.0);
      }
    }
    const Behavior b(2, dist);
    const double chsh = max_chsh(b);
    const JpdVerdict v = jpd_feasible(b, tol);
    if (chsh > 2 + 1e-6) {
      EXPECT_FALSE(v.feasible) << "trial " << trial << " chsh " << chsh;
      ++decided;
    } else if (chsh < 2 - 1e-6) {
      EXPECT_TRUE(v.feasible) << "trial " << trial << " chsh " << chsh;
      ++decided;
    }
  }
  EXPECT_GT(decided, 190);
}
