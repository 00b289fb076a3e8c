#pragma once

// Executable derivations over a finite hidden model.
//
// run_stronger_theorem: lambda-conditional perfect correlations, Weak H.A. and
// P.I. together force every lambda-conditional chain marginal to 1/2 (the
// correlation lemma per link, P.I. to tie links sharing an angle, then the
// chain solver), which leaves no room for Improved Predictions.
//
// run_bell_corollary: H.A. and O.I. are checked, turned into Weak H.A. and
// Improved Predictions by the two entailments, and the stronger derivation is
// run on the same model.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sorites/assumptions.hpp"
#include "sorites/chain.hpp"
#include "sorites/models.hpp"
#include "sorites/scalar.hpp"
#include "sorites/sorites_engine.hpp"

namespace sorites {

enum class TheoremKind { StrongerTheorem, BellCorollary };

inline constexpr std::string_view to_string(TheoremKind k) noexcept {
  return k == TheoremKind::StrongerTheorem ? "stronger" : "bell";
}

enum class ConclusionKind { ContradictionEstablished, PremiseFailed };

struct Conclusion {
  ConclusionKind kind = ConclusionKind::PremiseFailed;
  /// Set when kind == PremiseFailed.
  std::optional<Assumption> failed;
  std::string label;

  friend bool operator==(const Conclusion&, const Conclusion&) = default;
};

struct DerivationStep {
  std::string rule;
  std::string statement;

  friend bool operator==(const DerivationStep&, const DerivationStep&) = default;
};

template <Scalar T>
struct DerivationReport {
  TheoremKind theorem = TheoremKind::StrongerTheorem;
  std::vector<AssumptionVerdict<T>> premise_verdicts;
  std::map<Value, ChainMarginals<T>> per_lambda_marginals;
  Conclusion conclusion;
  std::vector<DerivationStep> trace;

  [[nodiscard]] const AssumptionVerdict<T>* verdict(Assumption a) const {
    for (const auto& v : premise_verdicts)
      if (v.assumption == a) return &v;
    return nullptr;
  }

  friend bool operator==(const DerivationReport&, const DerivationReport&) = default;
};

inline constexpr const char* kConditionalQmLabel = "λ-conditional QM agreement";

namespace detail {

inline std::string holds_str(bool h) { return h ? "holds" : "fails"; }

template <Scalar T>
std::string first_witness(const AssumptionVerdict<T>& v) {
  if (v.witnesses.empty()) return "";
  const auto& w = v.witnesses.front();
  std::string s;
  if (w.where.pair) s += " at " + pair_str(*w.where.pair);
  if (w.where.lambda) s += " for lambda=" + std::to_string(*w.where.lambda);
  s += ": " + w.where.detail + " (" + ScalarTraits<T>::format(w.lhs) + " vs " + ScalarTraits<T>::format(w.rhs) + ")";
  return s;
}

/// P(X=1 | A=a, lambda) or P(Y=1 | B=b, lambda) straight from the joint.
template <Scalar T>
T direct_marginal(const HiddenModel<T>& model, Value lambda, int angle_index) {
  const bool alice = angle_index % 2 == 1;
  const auto cond = condition(model.joint(), {{kLambda, lambda}, {alice ? kA : kB, angle_index}});
  const auto m = marginalize(cond, {alice ? kX : kY});
  return m.weight({1});
}

}  // namespace detail

template <Scalar T>
DerivationReport<T> run_stronger_theorem(const HiddenModel<T>& model,
                                         const T& tol = ScalarTraits<T>::default_tolerance()) {
  const auto& chain = model.chain();
  DerivationReport<T> report;
  report.theorem = TheoremKind::StrongerTheorem;
  auto step = [&](std::string rule, std::string statement) {
    report.trace.push_back({std::move(rule), std::move(statement)});
  };

  auto qm = check_conditional_correlations(model, tol);
  auto wha = check_weak_hidden_autonomy(model, tol);
  auto pi = check_parameter_independence(model, tol);
  step("Premise(1)", std::string(kConditionalQmLabel) + ": " + detail::holds_str(qm.holds) + detail::first_witness(qm));
  step("Premise(2)", "Weak H.A.: " + detail::holds_str(wha.holds) + detail::first_witness(wha));
  step("Premise(3)", "P.I.: " + detail::holds_str(pi.holds) + detail::first_witness(pi));

  std::optional<Conclusion> failed;
  if (!qm.holds)
    failed = Conclusion{ConclusionKind::PremiseFailed, Assumption::QMAgreement, kConditionalQmLabel};
  else if (!wha.holds)
    failed = Conclusion{ConclusionKind::PremiseFailed, Assumption::WeakHA, "Weak H.A."};
  else if (!pi.holds)
    failed = Conclusion{ConclusionKind::PremiseFailed, Assumption::PI, "P.I."};

  if (!failed) {
    const auto settings = chain.settings();
    for (Value lambda : model.lambdas()) {
      // Weak H.A. holds here, so a member either covers all of S or none of it.
      if (!positive(model.weight(lambda, settings.front()), tol)) continue;
      const std::string tag = "lambda=" + std::to_string(lambda);

      // Correlation lemma per link: each experiment relates Alice's and Bob's
      // lambda-conditional outcome probabilities at that pair.
      ChainConstraints system = sorites_chain_constraints(chain.n_links());
      system.relations.clear();
      std::vector<LinkSlack<T>> slacks;
      for (const auto& p : settings) {
        const auto cells = model.conditional_cells(lambda, p);
        const auto lemma = cr_lemma_check(outcome_table(cells), tol);
        slacks.push_back({p, link_slack(chain, p, cells)});
        const bool dashed = chain.is_dashed(p);
        step(dashed ? "CR-Lemma(b)" : "CR-Lemma(a)",
             tag + ", " + detail::pair_str(p) + ": " +
                 (dashed ? "P(X!=Y|a,b,λ)=1 ⇒ P(X=1|a,b,λ) = 1 − P(Y=1|a,b,λ)"
                         : "P(X=Y|a,b,λ)=1 ⇒ P(X=1|a,b,λ) = P(Y=1|a,b,λ)"));
        system.relations.push_back({static_cast<std::size_t>(p.alice), static_cast<std::size_t>(p.bob), lemma.relation});
      }
      // P.I. identifies P(X=1|a,b,lambda) across b (and Y across a), so
      // the per-link relations become relations between per-angle entries.
      step("P.I.", tag + ": P(X=1|a,b,λ) = P(X=1|a,λ) and P(Y=1|a,b,λ) = P(Y=1|b,λ) link the experiments into one chain");

      ChainMarginals<T> marginals;
      if constexpr (ScalarTraits<T>::exact) {
        const auto solved = solve_sorites_chain(system);
        step("Sorites", tag + ": p0 = q1 = ... = q" + std::to_string(chain.n_links()) + " = 1 − p0 ⇒ all = 1/2");
        for (const auto& e : solved.entries) {
          const T direct = detail::direct_marginal(model, lambda, e.index);
          if (direct != e.value)
            throw std::logic_error("chain derivation disagrees with direct computation at " + e.label);
          marginals.entries.push_back({e.owner, e.index, e.label, e.value});
        }
      } else {
        const T bound = chain_marginal_bound<T>(chain, slacks);
        step("Sorites", tag + ": |m − 1/2| <= (sum of slacks)/2 = " + ScalarTraits<T>::format(bound));
        for (int k = 0; k <= chain.n_links(); ++k) {
          const T direct = detail::direct_marginal(model, lambda, k);
          // P.I. and the lemma each hold only up to tol per hop around the cycle.
          if (abs_diff(direct, T(0.5)) > bound + T(chain.n_links() + 2) * tol)
            throw std::logic_error("approximate chain bound violated at " + chain_label(k));
          marginals.entries.push_back({k % 2 == 0 ? Owner::Bob : Owner::Alice, k, chain_label(k), direct});
        }
      }
      report.per_lambda_marginals.emplace(lambda, std::move(marginals));
    }
  }

  auto ip = check_improved_predictions(model, tol);
  report.premise_verdicts = {qm, wha, pi, ip};

  if (failed) {
    report.conclusion = *failed;
    step("Conclusion", "PremiseFailed: " + failed->label + detail::first_witness(*report.verdict(*failed->failed)));
    return report;
  }
  if constexpr (ScalarTraits<T>::exact) {
    if (ip.holds) throw std::logic_error("Improved Predictions holds alongside premises (1)-(3)");
  }
  step("Conclusion", std::string("all λ-conditional marginals = 1/2; Improved Predictions: ") + detail::holds_str(ip.holds));
  report.conclusion = {ConclusionKind::ContradictionEstablished, std::nullopt, "premises (1)-(3) exclude Improved Predictions"};
  return report;
}

/// Pair of S where the surface joint differs from the product of the surface
/// marginals, if any.
template <Scalar T>
std::optional<SettingPair> find_surface_correlation(const SurfaceModel<T>& surface,
                                                    const T& tol = ScalarTraits<T>::default_tolerance()) {
  for (const auto& p : surface.chain().settings()) {
    if (!surface.has_outcome(p)) continue;
    const auto c = cells_of(surface.outcome(p));
    if (!approx_equal(c[3], T(x_one(c) * y_one(c)), tol)) return p;
  }
  return std::nullopt;
}

template <Scalar T>
DerivationReport<T> run_bell_corollary(const HiddenModel<T>& model,
                                       const T& tol = ScalarTraits<T>::default_tolerance()) {
  DerivationReport<T> report;
  report.theorem = TheoremKind::BellCorollary;
  auto step = [&](std::string rule, std::string statement) {
    report.trace.push_back({std::move(rule), std::move(statement)});
  };

  const auto wsa = check_weak_surface_autonomy(model, tol);
  if (!wsa.holds) {
    report.premise_verdicts = {wsa};
    step("Premise", "Weak Surface Autonomy: fails" + detail::first_witness(wsa));
    report.conclusion = {ConclusionKind::PremiseFailed, Assumption::WeakSurfaceAutonomy, "Weak Surface Autonomy"};
    step("Conclusion", "PremiseFailed: Weak Surface Autonomy");
    return report;
  }

  const auto ha = check_hidden_autonomy(model, tol);
  const auto oi = check_outcome_independence(model, tol);
  step("Premise", "H.A.: " + detail::holds_str(ha.holds) + detail::first_witness(ha));
  step("Premise", "O.I.: " + detail::holds_str(oi.holds) + detail::first_witness(oi));

  if (ha.holds) {
    if (!check_weak_hidden_autonomy(model, tol).holds) throw std::logic_error("H.A. holds but Weak H.A. fails");
    step("Entailment(a)", "H.A. ⇒ Weak H.A.: P(λ|a,b) = P(λ) and P(a,b,λ) > 0 give P(λ) > 0, hence P(a,b,λ) > 0 for all (a,b) in S");
  } else {
    step("Entailment(a)", "H.A. ⇒ Weak H.A.: not applied, H.A. fails");
  }

  const auto correlated = find_surface_correlation(model.surface(), tol);
  if (oi.holds && correlated) {
    if (!check_improved_predictions(model, tol).holds)
      throw std::logic_error("O.I. with surface correlation but no improved prediction");
    step("Entailment(b)", "O.I. ⇒ Improved Predictions: surface outcomes are correlated at " +
                              detail::pair_str(*correlated) +
                              " while every λ-conditional joint factorizes, so some λ-conditional differs from the surface");
  } else if (oi.holds) {
    step("Entailment(b)", "O.I. ⇒ Improved Predictions: not applied, no surface correlation in S");
  } else {
    step("Entailment(b)", "O.I. ⇒ Improved Predictions: not applied, O.I. fails");
  }

  auto stronger = run_stronger_theorem(model, tol);
  for (auto& s : stronger.trace) step("Stronger Theorem / " + s.rule, s.statement);
  report.per_lambda_marginals = std::move(stronger.per_lambda_marginals);
  report.premise_verdicts = {ha, oi};
  for (auto& v : stronger.premise_verdicts) report.premise_verdicts.push_back(std::move(v));

  if (!ha.holds)
    report.conclusion = {ConclusionKind::PremiseFailed, Assumption::HA, "H.A."};
  else if (!oi.holds)
    report.conclusion = {ConclusionKind::PremiseFailed, Assumption::OI, "O.I."};
  else
    report.conclusion = stronger.conclusion;

  step("Conclusion", report.conclusion.kind == ConclusionKind::PremiseFailed
                         ? "PremiseFailed: " + report.conclusion.label
                         : std::string("ContradictionEstablished"));
  return report;
}

/// Weak H.A. without H.A., and Improved Predictions without O.I.
struct StrictnessWitnesses {
  HiddenModel<Rational> weak_ha_not_ha;
  HiddenModel<Rational> ip_not_oi;
};

inline StrictnessWitnesses strictness_witnesses() {
  const auto chain = build_chain(3);
  const auto settings = chain.settings();
  const OutcomeCells<Rational> match{Rational(1, 2), Rational(0), Rational(0), Rational(1, 2)};
  const OutcomeCells<Rational> mismatch{Rational(0), Rational(1, 2), Rational(1, 2), Rational(0)};

  // Full support for both members, but lambda=0 is over-represented at the
  // first link.
  std::vector<HiddenBlock<Rational>> first;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const auto& p = settings[i];
    const auto& cells = chain.is_dashed(p) ? mismatch : match;
    first.push_back({0, p, i == 0 ? Rational(3, 16) : Rational(1, 8), cells});
    first.push_back({1, p, i == 0 ? Rational(1, 16) : Rational(1, 8), cells});
  }

  // Correlated lambda-conditional outcomes that differ from the surface.
  std::vector<HiddenBlock<Rational>> second;
  for (const auto& p : settings) {
    const bool dashed = chain.is_dashed(p);
    const OutcomeCells<Rational> low = dashed ? OutcomeCells<Rational>{0, Rational(3, 4), Rational(1, 4), 0}
                                              : OutcomeCells<Rational>{Rational(3, 4), 0, 0, Rational(1, 4)};
    const OutcomeCells<Rational> high = dashed ? OutcomeCells<Rational>{0, Rational(1, 4), Rational(3, 4), 0}
                                               : OutcomeCells<Rational>{Rational(1, 4), 0, 0, Rational(3, 4)};
    second.push_back({0, p, Rational(1, 8), low});
    second.push_back({1, p, Rational(1, 8), high});
  }

  StrictnessWitnesses w{make_hidden_model(chain, {0, 1}, first), make_hidden_model(chain, {0, 1}, second)};
  if (!check_weak_hidden_autonomy(w.weak_ha_not_ha).holds || check_hidden_autonomy(w.weak_ha_not_ha).holds)
    throw std::logic_error("first strictness witness does not separate Weak H.A. from H.A.");
  if (!check_improved_predictions(w.ip_not_oi).holds || check_outcome_independence(w.ip_not_oi).holds)
    throw std::logic_error("second strictness witness does not separate Improved Predictions from O.I.");
  return w;
}

}  // namespace sorites
