#pragma once

// Decidable checkers for the surface and hidden-variable assumptions. Each
// returns a verdict carrying witnesses: concrete locations where the two sides
// of the defining equality (or inequality) were compared, re-checkable with
// direct queries on the model.
//
// Universal assumptions (everything except Improved Predictions) hold iff no
// violation is found, so their witness list is empty exactly when they hold.
// Improved Predictions is existential: its witnesses are the lambda-conditional
// probabilities that differ from the surface, and it holds iff there is one.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sorites/chain.hpp"
#include "sorites/error.hpp"
#include "sorites/models.hpp"
#include "sorites/scalar.hpp"

namespace sorites {

enum class Assumption {
  WeakSurfaceAutonomy,
  SurfaceLocality,
  WeakHA,
  HA,
  PI,
  OI,
  ImprovedPredictions,
  QMAgreement,
};

inline constexpr std::string_view to_string(Assumption a) noexcept {
  switch (a) {
    case Assumption::WeakSurfaceAutonomy: return "weak-surface-autonomy";
    case Assumption::SurfaceLocality: return "surface-locality";
    case Assumption::WeakHA: return "weak-ha";
    case Assumption::HA: return "ha";
    case Assumption::PI: return "pi";
    case Assumption::OI: return "oi";
    case Assumption::ImprovedPredictions: return "improved-predictions";
    case Assumption::QMAgreement: return "qm-agreement";
  }
  return "unknown";
}

/// Human-facing label used in derivation transcripts.
inline constexpr std::string_view display_name(Assumption a) noexcept {
  switch (a) {
    case Assumption::WeakSurfaceAutonomy: return "Weak Surface Autonomy";
    case Assumption::SurfaceLocality: return "Surface Locality";
    case Assumption::WeakHA: return "Weak H.A.";
    case Assumption::HA: return "H.A.";
    case Assumption::PI: return "P.I.";
    case Assumption::OI: return "O.I.";
    case Assumption::ImprovedPredictions: return "Improved Predictions";
    case Assumption::QMAgreement: return "QM agreement";
  }
  return "unknown";
}

inline std::optional<Assumption> assumption_from_string(std::string_view s) {
  for (auto a : {Assumption::WeakSurfaceAutonomy, Assumption::SurfaceLocality, Assumption::WeakHA, Assumption::HA,
                 Assumption::PI, Assumption::OI, Assumption::ImprovedPredictions, Assumption::QMAgreement})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

struct Location {
  std::optional<SettingPair> pair;
  std::optional<Value> lambda;
  std::string detail;

  friend bool operator==(const Location&, const Location&) = default;
};

template <Scalar T>
struct Witness {
  Location where;
  T lhs;
  T rhs;

  friend bool operator==(const Witness&, const Witness&) = default;
};

template <Scalar T>
struct AssumptionVerdict {
  Assumption assumption{};
  bool holds = false;
  std::vector<Witness<T>> witnesses;

  friend bool operator==(const AssumptionVerdict&, const AssumptionVerdict&) = default;
};

namespace detail {

template <Scalar T>
AssumptionVerdict<T> universal(Assumption a, std::vector<Witness<T>> violations) {
  const bool ok = violations.empty();
  return {a, ok, std::move(violations)};
}

inline std::string pair_str(const SettingPair& p) {
  return "(" + std::to_string(p.alice) + "," + std::to_string(p.bob) + ")";
}

template <Scalar T>
void require_weak_surface_autonomy(const ChainSpec& chain, auto&& weight_of, const T& tol) {
  for (const auto& p : chain.settings())
    if (!positive(T(weight_of(p)), tol))
      throw Error(Errc::UndefinedConditional,
                  "P(A,B) = 0 at " + pair_str(p) + "; conditionals on this setting pair are undefined");
}

}  // namespace detail

template <Scalar T>
AssumptionVerdict<T> check_weak_surface_autonomy(const SurfaceModel<T>& model,
                                                 const T& tol = ScalarTraits<T>::default_tolerance()) {
  std::vector<Witness<T>> v;
  for (const auto& p : model.chain().settings()) {
    const T w = model.setting_weight(p);
    if (!positive(w, tol)) v.push_back({{p, std::nullopt, "P(A=a,B=b) must be > 0"}, w, T(0)});
  }
  return detail::universal(Assumption::WeakSurfaceAutonomy, std::move(v));
}

template <Scalar T>
AssumptionVerdict<T> check_weak_surface_autonomy(const HiddenModel<T>& model,
                                                 const T& tol = ScalarTraits<T>::default_tolerance()) {
  std::vector<Witness<T>> v;
  for (const auto& p : model.chain().settings()) {
    const T w = model.setting_weight(p);
    if (!positive(w, tol)) v.push_back({{p, std::nullopt, "P(A=a,B=b) must be > 0"}, w, T(0)});
  }
  return detail::universal(Assumption::WeakSurfaceAutonomy, std::move(v));
}

/// Each wing's surface outcome probability is the same across every pair of
/// S that shares its own setting.
template <Scalar T>
AssumptionVerdict<T> check_surface_locality(const SurfaceModel<T>& model,
                                            const T& tol = ScalarTraits<T>::default_tolerance()) {
  const auto& chain = model.chain();
  detail::require_weak_surface_autonomy<T>(chain, [&](const SettingPair& p) { return model.setting_weight(p); }, tol);
  std::vector<Witness<T>> v;
  auto scan = [&](bool alice_wing) {
    const auto& angles = alice_wing ? chain.alice_angles() : chain.bob_angles();
    for (int k : angles) {
      std::optional<std::pair<SettingPair, T>> reference;
      for (const auto& p : chain.settings()) {
        if ((alice_wing ? p.alice : p.bob) != k) continue;
        const auto cells = cells_of(model.outcome(p));
        const T value = alice_wing ? x_one(cells) : y_one(cells);
        if (!reference) {
          reference.emplace(p, value);
        } else if (!approx_equal(value, reference->second, tol)) {
          v.push_back({{p, std::nullopt,
                        std::string(alice_wing ? "P(X=1|A,B)" : "P(Y=1|A,B)") + " differs from its value at " +
                            detail::pair_str(reference->first)},
                       value, reference->second});
        }
      }
    }
  };
  scan(true);
  scan(false);
  return detail::universal(Assumption::SurfaceLocality, std::move(v));
}

/// For each lambda the set of S-pairs with P(a, b, lambda) > 0 is empty or S.
template <Scalar T>
AssumptionVerdict<T> check_weak_hidden_autonomy(const HiddenModel<T>& model,
                                                const T& tol = ScalarTraits<T>::default_tolerance()) {
  const auto settings = model.chain().settings();
  std::vector<Witness<T>> v;
  for (Value lambda : model.lambdas()) {
    std::optional<std::pair<SettingPair, T>> supported;
    std::vector<std::pair<SettingPair, T>> missing;
    for (const auto& p : settings) {
      const T w = model.weight(lambda, p);
      if (positive(w, tol)) {
        if (!supported) supported.emplace(p, w);
      } else {
        missing.emplace_back(p, w);
      }
    }
    if (!supported) continue;
    for (const auto& [p, w] : missing)
      v.push_back({{p, lambda, "P(a,b,lambda) = 0 although P(" + detail::pair_str(supported->first) + ",lambda) > 0"},
                   w, supported->second});
  }
  return detail::universal(Assumption::WeakHA, std::move(v));
}

/// P(lambda | a, b) = P(lambda) for every (a, b) in S.
template <Scalar T>
AssumptionVerdict<T> check_hidden_autonomy(const HiddenModel<T>& model,
                                           const T& tol = ScalarTraits<T>::default_tolerance()) {
  const auto& chain = model.chain();
  detail::require_weak_surface_autonomy<T>(chain, [&](const SettingPair& p) { return model.setting_weight(p); }, tol);
  std::vector<Witness<T>> v;
  for (Value lambda : model.lambdas()) {
    const T prior = model.lambda_weight(lambda);
    for (const auto& p : chain.settings()) {
      const T posterior = model.weight(lambda, p) / model.setting_weight(p);
      if (!approx_equal(posterior, prior, tol))
        v.push_back({{p, lambda, "P(lambda|a,b) vs P(lambda)"}, posterior, prior});
    }
  }
  return detail::universal(Assumption::HA, std::move(v));
}

/// Given lambda, each wing's outcome probability does not depend on the remote
/// setting. Compared over the pairs where the lambda-conditional is defined.
template <Scalar T>
AssumptionVerdict<T> check_parameter_independence(const HiddenModel<T>& model,
                                                  const T& tol = ScalarTraits<T>::default_tolerance()) {
  const auto& chain = model.chain();
  const auto settings = chain.settings();
  std::vector<Witness<T>> v;
  for (Value lambda : model.lambdas()) {
    auto scan = [&](bool alice_wing) {
      const auto& angles = alice_wing ? chain.alice_angles() : chain.bob_angles();
      for (int k : angles) {
        std::optional<std::pair<SettingPair, T>> reference;
        for (const auto& p : settings) {
          if ((alice_wing ? p.alice : p.bob) != k) continue;
          if (!positive(model.weight(lambda, p), tol)) continue;
          const auto cells = model.conditional_cells(lambda, p);
          const T value = alice_wing ? x_one(cells) : y_one(cells);
          if (!reference) {
            reference.emplace(p, value);
          } else if (!approx_equal(value, reference->second, tol)) {
            v.push_back({{p, lambda,
                          std::string(alice_wing ? "P(X=1|A,B,lambda)" : "P(Y=1|A,B,lambda)") +
                              " differs from its value at " + detail::pair_str(reference->first)},
                         value, reference->second});
          }
        }
      }
    };
    scan(true);
    scan(false);
  }
  return detail::universal(Assumption::PI, std::move(v));
}

/// The lambda-conditional joint factorizes, checked at all four outcome cells.
template <Scalar T>
AssumptionVerdict<T> check_outcome_independence(const HiddenModel<T>& model,
                                                const T& tol = ScalarTraits<T>::default_tolerance()) {
  std::vector<Witness<T>> v;
  for (Value lambda : model.lambdas()) {
    for (const auto& p : model.chain().settings()) {
      if (!positive(model.weight(lambda, p), tol)) continue;
      const auto c = model.conditional_cells(lambda, p);
      const T px1 = x_one(c);
      const T py1 = y_one(c);
      for (std::size_t i = 0; i < 4; ++i) {
        const auto [x, y] = kOutcomeCells[i];
        const T px = x == 1 ? px1 : T(1 - px1);
        const T py = y == 1 ? py1 : T(1 - py1);
        const T product = px * py;
        if (!approx_equal(c[i], product, tol))
          v.push_back({{p, lambda,
                        "P(X=" + std::to_string(x) + ",Y=" + std::to_string(y) + "|a,b,lambda) vs product of marginals"},
                       c[i], product});
      }
    }
  }
  return detail::universal(Assumption::OI, std::move(v));
}

/// Some lambda-conditional probability (single-outcome or joint) differs from
/// the model's own surface probability: strictly in exact mode, by more than
/// `tol` in floating mode. Witnesses name each differing conditional.
template <Scalar T>
AssumptionVerdict<T> check_improved_predictions(const HiddenModel<T>& model,
                                                const T& tol = ScalarTraits<T>::default_tolerance()) {
  const auto surface = model.surface();
  std::vector<Witness<T>> improvements;
  for (Value lambda : model.lambdas()) {
    for (const auto& p : model.chain().settings()) {
      if (!positive(model.weight(lambda, p), tol) || !surface.has_outcome(p)) continue;
      const auto c = model.conditional_cells(lambda, p);
      const auto s = cells_of(surface.outcome(p));
      auto note = [&](std::string what, const T& cond, const T& surf) {
        if (!approx_equal(cond, surf, tol)) improvements.push_back({{p, lambda, std::move(what)}, cond, surf});
      };
      note("single P(X=1|a,b,lambda) vs surface", x_one(c), x_one(s));
      note("single P(Y=1|a,b,lambda) vs surface", y_one(c), y_one(s));
      for (std::size_t i = 0; i < 4; ++i) {
        const auto [x, y] = kOutcomeCells[i];
        note("joint P(X=" + std::to_string(x) + ",Y=" + std::to_string(y) + "|a,b,lambda) vs surface", c[i], s[i]);
      }
    }
  }
  const bool holds = !improvements.empty();
  return {Assumption::ImprovedPredictions, holds, std::move(improvements)};
}

/// Every surface outcome table matches the reference within `tol`: the four
/// cells and the mismatch probability P(X != Y).
template <Scalar T>
AssumptionVerdict<T> check_qm_agreement(const SurfaceModel<T>& model, const SurfaceModel<T>& reference,
                                        const T& tol = ScalarTraits<T>::default_tolerance()) {
  if (!(model.chain() == reference.chain()))
    throw Error(Errc::ChainMismatch, "models are over chains with N = " + std::to_string(model.chain().n_links()) +
                                         " and N = " + std::to_string(reference.chain().n_links()));
  std::vector<Witness<T>> v;
  for (const auto& p : reference.chain().settings()) {
    if (!reference.has_outcome(p)) continue;
    const auto r = cells_of(reference.outcome(p));
    const auto m = cells_of(model.outcome(p));
    const T m_mis = m[1] + m[2];
    const T r_mis = r[1] + r[2];
    if (!approx_equal(m_mis, r_mis, tol)) v.push_back({{p, std::nullopt, "P(X!=Y|a,b) vs reference"}, m_mis, r_mis});
    for (std::size_t i = 0; i < 4; ++i) {
      if (approx_equal(m[i], r[i], tol)) continue;
      const auto [x, y] = kOutcomeCells[i];
      v.push_back({{p, std::nullopt, "P(X=" + std::to_string(x) + ",Y=" + std::to_string(y) + "|a,b) vs reference"},
                   m[i], r[i]});
    }
  }
  return detail::universal(Assumption::QMAgreement, std::move(v));
}

template <Scalar T>
AssumptionVerdict<T> check_qm_agreement(const HiddenModel<T>& model, const SurfaceModel<T>& reference,
                                        const T& tol = ScalarTraits<T>::default_tolerance()) {
  return check_qm_agreement(model.surface(), reference, tol);
}

/// Mismatch slack of one lambda-conditional link: P(X != Y) on a solid link,
/// P(X = Y) on the dashed link.
template <Scalar T>
T link_slack(const ChainSpec& chain, const SettingPair& p, const OutcomeCells<T>& c) {
  return chain.is_dashed(p) ? T(c[0] + c[3]) : T(c[1] + c[2]);
}

/// The perfect correlations of the idealized chain, conditional on each
/// supported lambda: P(X = Y | a, b, lambda) = 1 on solid links and
/// P(X != Y | a, b, lambda) = 1 on the dashed link (slack <= tol).
template <Scalar T>
AssumptionVerdict<T> check_conditional_correlations(const HiddenModel<T>& model,
                                                    const T& tol = ScalarTraits<T>::default_tolerance()) {
  const auto& chain = model.chain();
  std::vector<Witness<T>> v;
  for (Value lambda : model.lambdas()) {
    for (const auto& p : chain.settings()) {
      if (!positive(model.weight(lambda, p), tol)) continue;
      const auto c = model.conditional_cells(lambda, p);
      const T slack = link_slack(chain, p, c);
      if (slack > tol) {
        const bool dashed = chain.is_dashed(p);
        v.push_back({{p, lambda,
                      dashed ? "dashed link broken: P(X!=Y|a,b,lambda) must be 1"
                             : "solid link broken: P(X=Y|a,b,lambda) must be 1"},
                     T(1 - slack), T(1)});
      }
    }
  }
  return detail::universal(Assumption::QMAgreement, std::move(v));
}

}  // namespace sorites
