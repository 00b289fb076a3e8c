#pragma once

// Surface and hidden-variable models over a chain.
//
// Variable names are fixed: "lambda" (hidden variable), "A" and "B" (angle
// indices of Alice and Bob, multiples of dtheta), "X" and "Y" (outcome bits).

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sorites/chain.hpp"
#include "sorites/error.hpp"
#include "sorites/joint_distribution.hpp"
#include "sorites/scalar.hpp"

namespace sorites {

inline constexpr const char* kLambda = "lambda";
inline constexpr const char* kA = "A";
inline constexpr const char* kB = "B";
inline constexpr const char* kX = "X";
inline constexpr const char* kY = "Y";

/// Outcome cells in the fixed order (0,0), (0,1), (1,0), (1,1) for (X, Y).
template <Scalar T>
using OutcomeCells = std::array<T, 4>;

inline constexpr std::array<std::pair<Value, Value>, 4> kOutcomeCells{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};

inline VariableSchema outcome_schema() {
  return VariableSchema({{kX, {0, 1}}, {kY, {0, 1}}});
}

template <Scalar T>
JointDistribution<T> outcome_table(const OutcomeCells<T>& cells) {
  std::vector<WeightedAssignment<T>> entries;
  for (std::size_t i = 0; i < 4; ++i) entries.push_back({{kOutcomeCells[i].first, kOutcomeCells[i].second}, cells[i]});
  return make_joint(outcome_schema(), entries);
}

template <Scalar T>
OutcomeCells<T> cells_of(const JointDistribution<T>& table) {
  OutcomeCells<T> c;
  for (std::size_t i = 0; i < 4; ++i) c[i] = table.weight({kOutcomeCells[i].first, kOutcomeCells[i].second});
  return c;
}

/// P(X = 1) and P(Y = 1) of a two-bit outcome table.
template <Scalar T>
T x_one(const OutcomeCells<T>& c) {
  return c[2] + c[3];
}
template <Scalar T>
T y_one(const OutcomeCells<T>& c) {
  return c[1] + c[3];
}

inline VariableSchema setting_schema(const ChainSpec& chain) {
  return VariableSchema({{kA, chain.alice_angles()}, {kB, chain.bob_angles()}});
}

/// Surface probabilities: setting weights over S plus one outcome table per
/// setting pair that has positive weight.
template <Scalar T>
class SurfaceModel {
 public:
  static SurfaceModel make(ChainSpec chain, JointDistribution<T> settings,
                           std::map<SettingPair, JointDistribution<T>> outcomes) {
    if (!(settings.schema() == setting_schema(chain)))
      throw Error(Errc::InvalidModel, "setting distribution must be over (A, B) with the chain's angle domains");
    for (const auto& [a, w] : settings.table()) {
      const SettingPair p{a[0], a[1]};
      if (!chain.contains(p))
        throw Error(Errc::InvalidModel, "setting pair (" + std::to_string(p.alice) + "," + std::to_string(p.bob) +
                                            ") has weight but is not in S");
      if (!outcomes.count(p))
        throw Error(Errc::InvalidModel, "missing outcome table for a setting pair with positive weight");
    }
    for (const auto& [p, t] : outcomes) {
      if (!chain.contains(p)) throw Error(Errc::InvalidModel, "outcome table for a pair outside S");
      if (!(t.schema() == outcome_schema())) throw Error(Errc::InvalidModel, "outcome table must be over (X, Y) bits");
    }
    return SurfaceModel(std::move(chain), std::move(settings), std::move(outcomes));
  }

  [[nodiscard]] const ChainSpec& chain() const noexcept { return chain_; }
  [[nodiscard]] const JointDistribution<T>& settings() const noexcept { return settings_; }
  [[nodiscard]] const std::map<SettingPair, JointDistribution<T>>& outcomes() const noexcept { return outcomes_; }

  [[nodiscard]] T setting_weight(const SettingPair& p) const { return settings_.weight({p.alice, p.bob}); }

  [[nodiscard]] bool has_outcome(const SettingPair& p) const { return outcomes_.count(p) != 0; }

  /// P(X, Y | A = a, B = b); undefined for pairs with zero weight and no table.
  [[nodiscard]] const JointDistribution<T>& outcome(const SettingPair& p) const {
    auto it = outcomes_.find(p);
    if (it == outcomes_.end())
      throw Error(Errc::UndefinedConditional, "no outcome table for (" + std::to_string(p.alice) + "," +
                                                  std::to_string(p.bob) + ")");
    return it->second;
  }

  /// The joint over (A, B, X, Y).
  [[nodiscard]] JointDistribution<T> to_joint() const {
    VariableSchema schema({{kA, chain_.alice_angles()}, {kB, chain_.bob_angles()}, {kX, {0, 1}}, {kY, {0, 1}}});
    std::vector<WeightedAssignment<T>> entries;
    for (const auto& [a, w] : settings_.table()) {
      const auto& t = outcome({a[0], a[1]});
      for (const auto& [xy, q] : t.table()) entries.push_back({{a[0], a[1], xy[0], xy[1]}, w * q});
    }
    return make_joint(std::move(schema), entries, tolerance_for_products());
  }

 private:
  SurfaceModel(ChainSpec chain, JointDistribution<T> settings, std::map<SettingPair, JointDistribution<T>> outcomes)
      : chain_(std::move(chain)), settings_(std::move(settings)), outcomes_(std::move(outcomes)) {}

  static T tolerance_for_products() { return ScalarTraits<T>::default_tolerance(); }

  ChainSpec chain_;
  JointDistribution<T> settings_;
  std::map<SettingPair, JointDistribution<T>> outcomes_;
};

/// Uniform weights over the chain's setting set S.
template <Scalar T>
JointDistribution<T> uniform_settings(const ChainSpec& chain) {
  std::vector<WeightedAssignment<T>> entries;
  const auto s = chain.settings();
  for (const auto& p : s) entries.push_back({{p.alice, p.bob}, T(1) / T(static_cast<int>(s.size()))});
  return make_joint(setting_schema(chain), entries);
}

/// Outcome table with both marginals 1/2 and mismatch probability m split
/// evenly over (0,1) and (1,0).
template <Scalar T>
JointDistribution<T> symmetric_outcome_table(const T& mismatch) {
  const T match_cell = (T(1) - mismatch) / 2;
  const T mismatch_cell = mismatch / 2;
  return outcome_table<T>({match_cell, mismatch_cell, mismatch_cell, match_cell});
}

/// QM surface model of a chain (simplified = step curve instead of sin^2).
template <Scalar T>
SurfaceModel<T> qm_surface_model(const ChainSpec& chain, bool simplified) {
  std::map<SettingPair, JointDistribution<T>> outcomes;
  for (const auto& p : chain.settings()) {
    const Angle sep = chain.separation(p);
    const T m = simplified ? simplified_mismatch<T>(sep) : mismatch_probability<T>(sep);
    outcomes.emplace(p, symmetric_outcome_table(m));
  }
  return SurfaceModel<T>::make(chain, uniform_settings<T>(chain), std::move(outcomes));
}

template <Scalar To, Scalar From>
SurfaceModel<To> convert(const SurfaceModel<From>& m) {
  std::map<SettingPair, JointDistribution<To>> outcomes;
  for (const auto& [p, t] : m.outcomes()) outcomes.emplace(p, convert<To>(t));
  return SurfaceModel<To>::make(m.chain(), convert<To>(m.settings()), std::move(outcomes));
}

/// Joint over (lambda, A, B, X, Y) with finite Lambda, tied to a chain.
template <Scalar T>
class HiddenModel {
 public:
  static constexpr std::size_t kDefaultMaxLambdas = 64;

  static HiddenModel make(ChainSpec chain, JointDistribution<T> joint,
                          std::size_t max_lambdas = kDefaultMaxLambdas) {
    const auto& s = joint.schema();
    if (s.size() != 5 || s[0].name != kLambda || s[1].name != kA || s[2].name != kB || s[3].name != kX ||
        s[4].name != kY)
      throw Error(Errc::InvalidModel, "hidden model schema must be (lambda, A, B, X, Y)");
    if (s[3].domain != std::vector<Value>{0, 1} || s[4].domain != std::vector<Value>{0, 1})
      throw Error(Errc::InvalidModel, "outcomes X and Y must have domain {0, 1}");
    if (s[0].domain.size() > max_lambdas)
      throw Error(Errc::InvalidModel, "Lambda has " + std::to_string(s[0].domain.size()) + " members, bound is " +
                                          std::to_string(max_lambdas));
    for (Value a : s[1].domain)
      if (!chain.is_alice_angle(a)) throw Error(Errc::InvalidModel, "A value " + std::to_string(a) + " is not an Alice angle");
    for (Value b : s[2].domain)
      if (!chain.is_bob_angle(b)) throw Error(Errc::InvalidModel, "B value " + std::to_string(b) + " is not a Bob angle");
    for (const auto& [a, w] : joint.table())
      if (!chain.contains({a[1], a[2]}))
        throw Error(Errc::InvalidModel, "setting pair (" + std::to_string(a[1]) + "," + std::to_string(a[2]) +
                                            ") has weight but is not in S");
    return HiddenModel(std::move(chain), std::move(joint));
  }

  [[nodiscard]] const ChainSpec& chain() const noexcept { return chain_; }
  [[nodiscard]] const JointDistribution<T>& joint() const noexcept { return joint_; }
  [[nodiscard]] const std::vector<Value>& lambdas() const { return joint_.schema()[0].domain; }

  /// P(lambda).
  [[nodiscard]] T lambda_weight(Value lambda) const {
    T s = 0;
    for (const auto& [a, w] : joint_.table())
      if (a[0] == lambda) s += w;
    return s;
  }

  /// P(A = a, B = b, lambda).
  [[nodiscard]] T weight(Value lambda, const SettingPair& p) const {
    T s = 0;
    for (const auto& [a, w] : joint_.table())
      if (a[0] == lambda && a[1] == p.alice && a[2] == p.bob) s += w;
    return s;
  }

  /// P(A = a, B = b).
  [[nodiscard]] T setting_weight(const SettingPair& p) const {
    T s = 0;
    for (const auto& [a, w] : joint_.table())
      if (a[1] == p.alice && a[2] == p.bob) s += w;
    return s;
  }

  /// P(X, Y | A = a, B = b, lambda) as cells; requires P(a, b, lambda) > 0.
  [[nodiscard]] OutcomeCells<T> conditional_cells(Value lambda, const SettingPair& p) const {
    OutcomeCells<T> c{T(0), T(0), T(0), T(0)};
    T mass = 0;
    for (const auto& [a, w] : joint_.table()) {
      if (a[0] != lambda || a[1] != p.alice || a[2] != p.bob) continue;
      c[static_cast<std::size_t>(a[3] * 2 + a[4])] += w;
      mass += w;
    }
    if (!(mass > 0))
      throw Error(Errc::UndefinedConditional, "P(A=" + std::to_string(p.alice) + ", B=" + std::to_string(p.bob) +
                                                  ", lambda=" + std::to_string(lambda) + ") = 0");
    for (auto& v : c) v /= mass;
    return c;
  }

  /// Surface probabilities obtained by marginalizing out lambda.
  [[nodiscard]] SurfaceModel<T> surface() const {
    const auto settings = marginalize(joint_, {kA, kB});
    // The model may declare narrower A/B domains than the chain; re-home the
    // table on the chain's full angle sets.
    auto setting_dist = DistributionBuilder<T>::unchecked(setting_schema(chain_), settings.table());
    const auto surface_joint = marginalize(joint_, {kA, kB, kX, kY});
    std::map<SettingPair, JointDistribution<T>> outcomes;
    for (const auto& [a, w] : settings.table()) {
      auto t = condition(surface_joint, {{kA, a[0]}, {kB, a[1]}});
      outcomes.emplace(SettingPair{a[0], a[1]}, std::move(t));
    }
    return SurfaceModel<T>::make(chain_, std::move(setting_dist), std::move(outcomes));
  }

 private:
  HiddenModel(ChainSpec chain, JointDistribution<T> joint) : chain_(std::move(chain)), joint_(std::move(joint)) {}

  ChainSpec chain_;
  JointDistribution<T> joint_;
};

/// One (lambda, setting pair) block of a hidden model: its joint weight
/// P(lambda, a, b) and the conditional outcome cells P(x, y | a, b, lambda).
template <Scalar T>
struct HiddenBlock {
  Value lambda = 0;
  SettingPair pair;
  T weight;
  OutcomeCells<T> outcome;
};

/// Assembles a hidden model from blocks. Lambda's domain is `lambdas` (so
/// members of zero weight may be present).
template <Scalar T>
HiddenModel<T> make_hidden_model(const ChainSpec& chain, const std::vector<Value>& lambdas,
                                 const std::vector<HiddenBlock<T>>& blocks) {
  VariableSchema schema(
      {{kLambda, lambdas}, {kA, chain.alice_angles()}, {kB, chain.bob_angles()}, {kX, {0, 1}}, {kY, {0, 1}}});
  std::vector<WeightedAssignment<T>> entries;
  for (const auto& b : blocks)
    for (std::size_t i = 0; i < 4; ++i) {
      const T w = b.weight * b.outcome[i];
      if (w != 0)
        entries.push_back({{b.lambda, b.pair.alice, b.pair.bob, kOutcomeCells[i].first, kOutcomeCells[i].second}, w});
    }
  return HiddenModel<T>::make(chain, make_joint(std::move(schema), entries));
}

/// Single-member Lambda whose conditionals equal the surface probabilities.
template <Scalar T>
HiddenModel<T> trivial_lift(const SurfaceModel<T>& surface, Value lambda = 0) {
  std::vector<HiddenBlock<T>> blocks;
  for (const auto& [a, w] : surface.settings().table()) {
    const SettingPair p{a[0], a[1]};
    blocks.push_back({lambda, p, w, cells_of(surface.outcome(p))});
  }
  return make_hidden_model(surface.chain(), {lambda}, blocks);
}

template <Scalar To, Scalar From>
HiddenModel<To> convert(const HiddenModel<From>& m) {
  return HiddenModel<To>::make(m.chain(), convert<To>(m.joint()));
}

}  // namespace sorites
