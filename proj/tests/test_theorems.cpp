#include <gtest/gtest.h>

#include <algorithm>

#include "model_generators.hpp"
#include "sorites/sorites.hpp"

using namespace sorites;
using sorites::testing::q;

namespace {

HiddenModel<Rational> simplified_lift(int n = 3) { return trivial_lift(qm_surface_model<Rational>(build_chain(n), true)); }

HiddenModel<Rational> deterministic_mixture(int n = 3) {
  const auto chain = build_chain(n);
  std::vector<DeterministicStrategy> best;
  for (const auto& s : enumerate_strategies(chain))
    if (broken_links(s, chain).count == 1) best.push_back(s);
  return strategy_mixture_model(chain, best);
}

bool trace_has(const DerivationReport<Rational>& r, std::string_view rule, std::string_view fragment) {
  return std::any_of(r.trace.begin(), r.trace.end(), [&](const DerivationStep& s) {
    return s.rule.find(rule) != std::string::npos && s.statement.find(fragment) != std::string::npos;
  });
}

}  // namespace

TEST(StrongerTheorem, TrivialLift) {
  const auto r = run_stronger_theorem(simplified_lift());
  EXPECT_EQ(r.conclusion.kind, ConclusionKind::ContradictionEstablished);
  EXPECT_TRUE(r.verdict(Assumption::QMAgreement)->holds);
  EXPECT_TRUE(r.verdict(Assumption::WeakHA)->holds);
  EXPECT_TRUE(r.verdict(Assumption::PI)->holds);
  EXPECT_FALSE(r.verdict(Assumption::ImprovedPredictions)->holds);
  ASSERT_EQ(r.per_lambda_marginals.size(), 1u);
  for (const auto& e : r.per_lambda_marginals.at(0).entries) EXPECT_EQ(e.value, q(1, 2));
  EXPECT_EQ(r.trace.back().statement, "all λ-conditional marginals = 1/2; Improved Predictions: fails");
  EXPECT_TRUE(trace_has(r, "CR-Lemma(a)", "(1,0)"));
  EXPECT_TRUE(trace_has(r, "CR-Lemma(b)", "(3,0)"));
  EXPECT_TRUE(trace_has(r, "Sorites", "all = 1/2"));
}

TEST(StrongerTheorem, DeterministicMembersBreakALink) {
  const auto r = run_stronger_theorem(deterministic_mixture());
  EXPECT_EQ(r.conclusion.kind, ConclusionKind::PremiseFailed);
  EXPECT_EQ(r.conclusion.failed, Assumption::QMAgreement);
  EXPECT_EQ(r.conclusion.label, kConditionalQmLabel);
  EXPECT_TRUE(r.trace.back().statement.starts_with("PremiseFailed: λ-conditional QM agreement at ("));
  EXPECT_NE(r.trace.back().statement.find("link broken"), std::string::npos);
  // Every member breaks exactly one link.
  const auto& v = *r.verdict(Assumption::QMAgreement);
  EXPECT_EQ(v.witnesses.size(), deterministic_mixture().lambdas().size());
}

TEST(StrongerTheorem, ParameterDependence) {
  const auto chain = build_chain(3);
  // Perfect correlations with outcomes that depend on the remote setting.
  std::vector<HiddenBlock<Rational>> blocks{
      {0, {1, 0}, q(1, 4), {0, 0, 0, 1}},
      {0, {1, 2}, q(1, 4), {1, 0, 0, 0}},
      {0, {3, 2}, q(1, 4), {1, 0, 0, 0}},
      {0, {3, 0}, q(1, 4), {0, 0, 1, 0}},
  };
  const auto r = run_stronger_theorem(make_hidden_model(chain, {0}, blocks));
  EXPECT_TRUE(r.verdict(Assumption::QMAgreement)->holds);
  EXPECT_TRUE(r.verdict(Assumption::WeakHA)->holds);
  EXPECT_EQ(r.conclusion.failed, Assumption::PI);
  EXPECT_FALSE(r.verdict(Assumption::PI)->witnesses.empty());
}

TEST(StrongerTheorem, FloatModeUsesSlackBound) {
  const auto chain = build_chain(45);
  const auto full = trivial_lift(qm_surface_model<double>(chain, false));
  const auto strict = run_stronger_theorem(full);
  EXPECT_EQ(strict.conclusion.failed, Assumption::QMAgreement);

  const auto loose = run_stronger_theorem(full, 0.002);
  EXPECT_EQ(loose.conclusion.kind, ConclusionKind::ContradictionEstablished);
  for (const auto& e : loose.per_lambda_marginals.at(0).entries) EXPECT_NEAR(e.value, 0.5, 1e-12);

  const auto converted = run_stronger_theorem(convert<double>(simplified_lift()));
  EXPECT_EQ(converted.conclusion.kind, ConclusionKind::ContradictionEstablished);
}

TEST(BellCorollary, AutonomousModel) {
  const auto r = run_bell_corollary(deterministic_mixture());
  EXPECT_TRUE(r.verdict(Assumption::HA)->holds);
  EXPECT_TRUE(trace_has(r, "Entailment(a)", "H.A. ⇒ Weak H.A.: P(λ|a,b)"));
  EXPECT_TRUE(r.verdict(Assumption::WeakHA)->holds);
}

TEST(BellCorollary, IndependenceWithSurfaceCorrelation) {
  // Two deterministic members with opposite outcomes everywhere: O.I. holds
  // per member, and the surface is correlated on the solid links.
  const auto chain = build_chain(3);
  std::vector<HiddenBlock<Rational>> blocks;
  for (const auto& p : chain.settings()) {
    const bool dashed = chain.is_dashed(p);
    blocks.push_back({0, p, q(1, 8), dashed ? OutcomeCells<Rational>{0, 1, 0, 0} : OutcomeCells<Rational>{1, 0, 0, 0}});
    blocks.push_back({1, p, q(1, 8), dashed ? OutcomeCells<Rational>{0, 0, 1, 0} : OutcomeCells<Rational>{0, 0, 0, 1}});
  }
  const auto m = make_hidden_model(chain, {0, 1}, blocks);
  const auto r = run_bell_corollary(m);
  EXPECT_TRUE(r.verdict(Assumption::OI)->holds);
  EXPECT_TRUE(trace_has(r, "Entailment(b)", "surface outcomes are correlated"));
  EXPECT_TRUE(r.verdict(Assumption::ImprovedPredictions)->holds);
}

TEST(BellCorollary, OutcomeDependenceStopsBellButNotStronger) {
  const auto lift = simplified_lift();
  const auto bell = run_bell_corollary(lift);
  EXPECT_EQ(bell.conclusion.kind, ConclusionKind::PremiseFailed);
  EXPECT_EQ(bell.conclusion.failed, Assumption::OI);
  EXPECT_TRUE(trace_has(bell, "Premise", "O.I.: fails"));
  EXPECT_TRUE(trace_has(bell, "Entailment(a)", "H.A. ⇒ Weak H.A."));
  EXPECT_TRUE(trace_has(bell, "Entailment(b)", "not applied, O.I. fails"));
  EXPECT_TRUE(trace_has(bell, "Stronger Theorem / Conclusion", "all λ-conditional marginals = 1/2"));
  EXPECT_EQ(run_stronger_theorem(lift).conclusion.kind, ConclusionKind::ContradictionEstablished);
}

TEST(BellCorollary, NeedsSurfaceAutonomy) {
  const auto chain = build_chain(3);
  std::vector<HiddenBlock<Rational>> blocks;
  for (const auto& p : chain.solid_links()) blocks.push_back({0, p, q(1, 3), {q(1, 2), 0, 0, q(1, 2)}});
  const auto r = run_bell_corollary(make_hidden_model(chain, {0}, blocks));
  EXPECT_EQ(r.conclusion.failed, Assumption::WeakSurfaceAutonomy);
}

TEST(Strictness, WitnessesVerify) {
  const auto w = strictness_witnesses();
  EXPECT_TRUE(check_weak_hidden_autonomy(w.weak_ha_not_ha).holds);
  EXPECT_FALSE(check_hidden_autonomy(w.weak_ha_not_ha).holds);
  EXPECT_TRUE(check_improved_predictions(w.ip_not_oi).holds);
  EXPECT_FALSE(check_outcome_independence(w.ip_not_oi).holds);
}

TEST(Soundness, NoModelSatisfiesAllFour) {
  SplitMix64 rng(42);
  const auto chain = build_chain(3);
  int models = 0, three_premises = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto m = i % 2 == 0 ? sorites::testing::random_hidden_model(rng, chain)
                              : sorites::testing::adversarial_model(rng, chain);
    const auto r = run_stronger_theorem(m);
    ++models;
    const bool all_three = r.verdict(Assumption::QMAgreement)->holds && r.verdict(Assumption::WeakHA)->holds &&
                           r.verdict(Assumption::PI)->holds;
    if (all_three) ++three_premises;
    EXPECT_FALSE(all_three && r.verdict(Assumption::ImprovedPredictions)->holds);
    if (all_three) {
      EXPECT_EQ(r.conclusion.kind, ConclusionKind::ContradictionEstablished);
    }
  }
  EXPECT_GE(models, 1000);
  EXPECT_GT(three_premises, 20);
}

TEST(Soundness, LongerChains) {
  SplitMix64 rng(43);
  for (int n : {5, 7}) {
    const auto chain = build_chain(n);
    for (int i = 0; i < 200; ++i) {
      const auto r = run_stronger_theorem(sorites::testing::adversarial_model(rng, chain));
      EXPECT_FALSE(r.verdict(Assumption::QMAgreement)->holds && r.verdict(Assumption::WeakHA)->holds &&
                   r.verdict(Assumption::PI)->holds && r.verdict(Assumption::ImprovedPredictions)->holds);
    }
  }
}

TEST(Monotonicity, BellContradictionImpliesStronger) {
  SplitMix64 rng(77);
  const auto chain = build_chain(3);
  for (int i = 0; i < 500; ++i) {
    const auto m = sorites::testing::autonomy_model(rng, chain);
    const auto bell = run_bell_corollary(m);
    if (bell.conclusion.kind == ConclusionKind::ContradictionEstablished) {
      EXPECT_EQ(run_stronger_theorem(m).conclusion.kind, ConclusionKind::ContradictionEstablished);
    }
  }
}

TEST(PerLambdaMarginals, AgreeWithDirectComputation) {
  SplitMix64 rng(9);
  const auto chain = build_chain(3);
  int compared = 0;
  for (int i = 0; i < 400; ++i) {
    const auto m = i % 2 == 0 ? sorites::testing::random_hidden_model(rng, chain)
                              : sorites::testing::adversarial_model(rng, chain);
    const auto r = run_stronger_theorem(m);
    for (const auto& [lambda, marg] : r.per_lambda_marginals)
      for (const auto& e : marg.entries) {
        const bool alice = e.owner == Owner::Alice;
        const auto cond = condition(m.joint(), {{kLambda, lambda}, {alice ? kA : kB, e.index}});
        EXPECT_EQ(marginalize(cond, {alice ? kX : kY}).weight({1}), e.value);
        ++compared;
      }
  }
  EXPECT_GT(compared, 0);
}
