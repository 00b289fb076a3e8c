#include <gtest/gtest.h>

#include <algorithm>

#include "model_generators.hpp"
#include "sorites/sorites.hpp"

using namespace sorites;
using sorites::testing::q;

namespace {

const OutcomeCells<Rational> kMatch{q(1, 2), 0, 0, q(1, 2)};
const OutcomeCells<Rational> kMismatch{0, q(1, 2), q(1, 2), 0};

// Surface model over N = 3 with chosen setting weights (numerators over their
// sum) and simplified QM tables.
SurfaceModel<Rational> weighted_surface(const std::vector<long long>& w) {
  const auto chain = build_chain(3);
  const auto s = chain.settings();
  long long total = 0;
  for (auto k : w) total += k;
  std::vector<WeightedAssignment<Rational>> entries;
  std::map<SettingPair, JointDistribution<Rational>> tables;
  for (std::size_t i = 0; i < s.size(); ++i) {
    entries.push_back({{s[i].alice, s[i].bob}, q(w[i], total)});
    if (w[i] > 0) tables.emplace(s[i], outcome_table(chain.is_dashed(s[i]) ? kMismatch : kMatch));
  }
  return SurfaceModel<Rational>::make(chain, make_joint(setting_schema(chain), entries), tables);
}

HiddenModel<Rational> simplified_lift(int n = 3) { return trivial_lift(qm_surface_model<Rational>(build_chain(n), true)); }

// Deterministic outcomes per member from a local strategy.
HiddenModel<Rational> deterministic_mixture(int n = 3) {
  const auto chain = build_chain(n);
  std::vector<DeterministicStrategy> all;
  for (const auto& s : enumerate_strategies(chain)) all.push_back(s);
  return strategy_mixture_model(chain, all);
}

bool has_witness_at(const AssumptionVerdict<Rational>& v, const SettingPair& p, std::optional<Value> lambda = {}) {
  return std::any_of(v.witnesses.begin(), v.witnesses.end(), [&](const Witness<Rational>& w) {
    return w.where.pair == p && (!lambda || w.where.lambda == lambda);
  });
}

}  // namespace

TEST(WeakSurfaceAutonomy, Examples) {
  EXPECT_TRUE(check_weak_surface_autonomy(qm_surface_model<Rational>(build_chain(3), true)).holds);

  const auto missing_dashed = check_weak_surface_autonomy(weighted_surface({1, 1, 1, 0}));
  EXPECT_FALSE(missing_dashed.holds);
  ASSERT_EQ(missing_dashed.witnesses.size(), 1u);
  EXPECT_EQ(missing_dashed.witnesses[0].where.pair, (SettingPair{3, 0}));

  const auto one_pair = check_weak_surface_autonomy(weighted_surface({1, 0, 0, 0}));
  EXPECT_FALSE(one_pair.holds);
  EXPECT_EQ(one_pair.witnesses.size(), 3u);
}

TEST(SurfaceLocality, Examples) {
  EXPECT_TRUE(check_surface_locality(qm_surface_model<Rational>(build_chain(3), true)).holds);

  // P(X=1|A=30,B=0) = 1/2 but P(X=1|A=30,B=60) = 1/3.
  const auto chain = build_chain(3);
  std::map<SettingPair, JointDistribution<Rational>> tables;
  for (const auto& p : chain.settings()) tables.emplace(p, outcome_table(chain.is_dashed(p) ? kMismatch : kMatch));
  tables.insert_or_assign(SettingPair{1, 2}, outcome_table<Rational>({q(2, 3), 0, 0, q(1, 3)}));
  const auto m = SurfaceModel<Rational>::make(chain, uniform_settings<Rational>(chain), tables);
  const auto v = check_surface_locality(m);
  EXPECT_FALSE(v.holds);
  ASSERT_TRUE(has_witness_at(v, {1, 2}));
  const auto& w = v.witnesses.front();
  EXPECT_EQ(w.lhs, q(1, 3));
  EXPECT_EQ(w.rhs, q(1, 2));
}

TEST(SurfaceLocality, UndefinedWithoutAutonomy) {
  try {
    check_surface_locality(weighted_surface({1, 1, 1, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UndefinedConditional);
  }
}

TEST(WeakHiddenAutonomy, Examples) {
  EXPECT_TRUE(check_weak_hidden_autonomy(simplified_lift()).holds);

  // lambda=1 only at (30,0).
  const auto chain = build_chain(3);
  std::vector<HiddenBlock<Rational>> blocks;
  for (const auto& p : chain.settings())
    blocks.push_back({0, p, q(1, 5), chain.is_dashed(p) ? kMismatch : kMatch});
  blocks.push_back({1, {1, 0}, q(1, 5), kMatch});
  const auto partial = make_hidden_model(chain, {0, 1}, blocks);
  const auto v = check_weak_hidden_autonomy(partial);
  EXPECT_FALSE(v.holds);
  EXPECT_TRUE(has_witness_at(v, {1, 2}, 1));
  EXPECT_FALSE(has_witness_at(v, {1, 0}, 1));

  // A member of zero weight does not break Weak H.A.
  std::vector<HiddenBlock<Rational>> lifted;
  for (const auto& p : chain.settings()) lifted.push_back({0, p, q(1, 4), chain.is_dashed(p) ? kMismatch : kMatch});
  EXPECT_TRUE(check_weak_hidden_autonomy(make_hidden_model(chain, {0, 2}, lifted)).holds);
}

TEST(HiddenAutonomy, Examples) {
  EXPECT_TRUE(check_hidden_autonomy(deterministic_mixture()).holds);

  // Member tied to Alice's angle: lambda = 1 exactly when A = 90.
  const auto chain = build_chain(3);
  std::vector<HiddenBlock<Rational>> blocks;
  for (const auto& p : chain.settings()) {
    const Value l = p.alice == 3 ? 1 : 0;
    blocks.push_back({l, p, q(1, 4), chain.is_dashed(p) ? kMismatch : kMatch});
  }
  const auto tied = make_hidden_model(chain, {0, 1}, blocks);
  EXPECT_FALSE(check_hidden_autonomy(tied).holds);
  EXPECT_FALSE(check_weak_hidden_autonomy(tied).holds);

  const auto w = strictness_witnesses();
  EXPECT_TRUE(check_weak_hidden_autonomy(w.weak_ha_not_ha).holds);
  EXPECT_FALSE(check_hidden_autonomy(w.weak_ha_not_ha).holds);
}

TEST(ParameterIndependence, Examples) {
  EXPECT_TRUE(check_parameter_independence(deterministic_mixture()).holds);
  EXPECT_TRUE(check_parameter_independence(simplified_lift()).holds);

  // P(X=1|A=30,lambda) is 1 with B=0 and 0 with B=60.
  const auto chain = build_chain(3);
  std::vector<HiddenBlock<Rational>> blocks;
  for (const auto& p : chain.settings()) {
    OutcomeCells<Rational> c = chain.is_dashed(p) ? kMismatch : kMatch;
    if (p == SettingPair{1, 0}) c = {0, 0, 0, 1};
    if (p == SettingPair{1, 2}) c = {1, 0, 0, 0};
    blocks.push_back({0, p, q(1, 4), c});
  }
  const auto v = check_parameter_independence(make_hidden_model(chain, {0}, blocks));
  EXPECT_FALSE(v.holds);
  EXPECT_TRUE(has_witness_at(v, {1, 2}, 0));
}

TEST(OutcomeIndependence, Examples) {
  EXPECT_TRUE(check_outcome_independence(deterministic_mixture()).holds);

  const auto lift = check_outcome_independence(simplified_lift());
  EXPECT_FALSE(lift.holds);
  // P(1,1|a,b,lambda) = 1/2 against the product 1/2 * 1/2.
  const auto it = std::find_if(lift.witnesses.begin(), lift.witnesses.end(), [](const auto& w) {
    return w.where.pair == SettingPair{1, 0} && w.lhs == q(1, 2);
  });
  ASSERT_NE(it, lift.witnesses.end());
  EXPECT_EQ(it->rhs, q(1, 4));

  const auto chain = build_chain(3);
  std::vector<HiddenBlock<Rational>> coins;
  for (const auto& p : chain.settings())
    for (Value l : {0, 1})
      coins.push_back({l, p, q(1, 8), sorites::testing::product_cells(l == 0 ? q(1, 3) : q(1, 2), q(2, 5))});
  EXPECT_TRUE(check_outcome_independence(make_hidden_model(chain, {0, 1}, coins)).holds);
}

TEST(ImprovedPredictions, Examples) {
  const auto lift = check_improved_predictions(simplified_lift());
  EXPECT_FALSE(lift.holds);
  EXPECT_TRUE(lift.witnesses.empty());

  EXPECT_TRUE(check_improved_predictions(deterministic_mixture()).holds);

  // One member's conditional at (30,0) shifted to 3/5 against a surface 1/2.
  // Its partner member compensates, so the shift shows up at that pair only.
  const auto chain = build_chain(3);
  std::vector<HiddenBlock<Rational>> blocks;
  for (const auto& p : chain.settings()) {
    const auto base = chain.is_dashed(p) ? kMismatch : kMatch;
    if (p == SettingPair{1, 0}) {
      blocks.push_back({0, p, q(1, 8), {q(2, 5), 0, 0, q(3, 5)}});
      blocks.push_back({1, p, q(1, 8), {q(3, 5), 0, 0, q(2, 5)}});
    } else {
      blocks.push_back({0, p, q(1, 8), base});
      blocks.push_back({1, p, q(1, 8), base});
    }
  }
  const auto v = check_improved_predictions(make_hidden_model(chain, {0, 1}, blocks));
  EXPECT_TRUE(v.holds);
  for (const auto& w : v.witnesses) EXPECT_EQ(w.where.pair, (SettingPair{1, 0}));
  const auto single = std::find_if(v.witnesses.begin(), v.witnesses.end(), [](const auto& w) {
    return w.where.lambda == 0 && w.where.detail.starts_with("single P(X=1");
  });
  ASSERT_NE(single, v.witnesses.end());
  EXPECT_EQ(single->lhs, q(3, 5));
  EXPECT_EQ(single->rhs, q(1, 2));
}

TEST(QmAgreement, Examples) {
  const auto c3 = build_chain(3);
  const auto exact = qm_surface_model<Rational>(c3, true);
  EXPECT_TRUE(check_qm_agreement(exact, exact).holds);

  const auto chain = build_chain(45);
  const auto simplified = qm_surface_model<double>(chain, true);
  const auto full = qm_surface_model<double>(chain, false);
  const auto strict = check_qm_agreement(simplified, full);
  EXPECT_FALSE(strict.holds);
  double largest = 0;
  for (const auto& w : strict.witnesses) largest = std::max(largest, std::abs(w.lhs - w.rhs));
  EXPECT_NEAR(largest, mismatch_probability<double>(Angle(Rational(2))), 1e-15);
  EXPECT_NEAR(largest, 0.0012, 1e-4);

  EXPECT_TRUE(check_qm_agreement(simplified, full, 0.002).holds);
  EXPECT_THROW(check_qm_agreement(exact, qm_surface_model<Rational>(build_chain(5), true)), Error);
}

TEST(Entailments, HiddenAutonomyImpliesWeak) {
  SplitMix64 rng(2024);
  const auto chain = build_chain(3);
  int checked = 0, ha_held = 0;
  for (int i = 0; i < 1500; ++i) {
    const auto m = sorites::testing::autonomy_model(rng, chain);
    if (!check_weak_surface_autonomy(m).holds) continue;
    ++checked;
    if (check_hidden_autonomy(m).holds) {
      ++ha_held;
      EXPECT_TRUE(check_weak_hidden_autonomy(m).holds);
    }
  }
  EXPECT_GE(checked, 1000);
  EXPECT_GT(ha_held, 100);
}

TEST(Entailments, OutcomeIndependenceWithCorrelationImpliesImprovement) {
  SplitMix64 rng(99);
  int premises = 0;
  for (int i = 0; i < 1200; ++i) {
    const auto chain = build_chain(i % 2 == 0 ? 3 : 5);
    const auto m = sorites::testing::independence_model(rng, chain);
    if (!check_outcome_independence(m).holds || !find_surface_correlation(m.surface())) continue;
    ++premises;
    EXPECT_TRUE(check_improved_predictions(m).holds);
  }
  EXPECT_GE(premises, 1000);
}

TEST(Witnesses, RecheckableByDirectQueries) {
  SplitMix64 rng(5);
  const auto chain = build_chain(3);
  int rechecked = 0;
  for (int i = 0; i < 200; ++i) {
    const auto m = sorites::testing::random_hidden_model(rng, chain);
    for (const auto& w : check_parameter_independence(m).witnesses) {
      EXPECT_NE(w.lhs, w.rhs);
      const bool alice = w.where.detail.starts_with("P(X=1");
      const auto cond = condition(m.joint(), {{kLambda, *w.where.lambda}, {kA, w.where.pair->alice}, {kB, w.where.pair->bob}});
      EXPECT_EQ(marginalize(cond, {alice ? kX : kY}).weight({1}), w.lhs);
      ++rechecked;
    }
    for (const auto& w : check_outcome_independence(m).witnesses) {
      EXPECT_NE(w.lhs, w.rhs);
      const auto cond = condition(m.joint(), {{kLambda, *w.where.lambda}, {kA, w.where.pair->alice}, {kB, w.where.pair->bob}});
      const Value x = w.where.detail[4] - '0';
      const Value y = w.where.detail[8] - '0';
      EXPECT_EQ(cond.weight({x, y}), w.lhs);
      ++rechecked;
    }
  }
  EXPECT_GT(rechecked, 100);
}
