#pragma once

// Three-party GHZ setting: devices A, B, C each with settings {1, 2} and
// outcomes X, Y, Z in {-1, +1}. Only the four triples 1-1-2, 1-2-1, 2-1-1 and
// 2-2-2 are in the setting set; the first three demand Y = X*Z with
// certainty, the last Y != X*Z.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sorites/assumptions.hpp"
#include "sorites/error.hpp"
#include "sorites/joint_distribution.hpp"
#include "sorites/scalar.hpp"
#include "sorites/sorites_engine.hpp"

namespace sorites {

struct GhzSetting {
  int a = 1;
  int b = 1;
  int c = 1;

  friend auto operator<=>(const GhzSetting&, const GhzSetting&) = default;
};

inline constexpr std::array<GhzSetting, 4> kGhzSettings{{{1, 1, 2}, {1, 2, 1}, {2, 1, 1}, {2, 2, 2}}};

/// +1 when the triple demands Y = X*Z, -1 when it demands Y != X*Z.
inline int ghz_sign(const GhzSetting& s) { return (s.a == 2 && s.b == 2 && s.c == 2) ? -1 : 1; }

inline std::string ghz_setting_str(const GhzSetting& s) {
  return std::to_string(s.a) + "-" + std::to_string(s.b) + "-" + std::to_string(s.c);
}

inline VariableSchema ghz_outcome_schema() {
  return VariableSchema({{"X", {-1, 1}}, {"Y", {-1, 1}}, {"Z", {-1, 1}}});
}

inline VariableSchema ghz_setting_schema() {
  return VariableSchema({{"A", {1, 2}}, {"B", {1, 2}}, {"C", {1, 2}}});
}

template <Scalar T>
class GhzSurfaceModel {
 public:
  static GhzSurfaceModel make(JointDistribution<T> settings, std::map<GhzSetting, JointDistribution<T>> tables) {
    if (!(settings.schema() == ghz_setting_schema())) throw Error(Errc::InvalidModel, "GHZ settings must be over (A, B, C)");
    for (const auto& s : kGhzSettings) {
      if (!(settings.weight({s.a, s.b, s.c}) > 0))
        throw Error(Errc::InvalidModel, "setting " + ghz_setting_str(s) + " must have positive weight");
      auto it = tables.find(s);
      if (it == tables.end()) throw Error(Errc::InvalidModel, "missing outcome table for " + ghz_setting_str(s));
      if (!(it->second.schema() == ghz_outcome_schema()))
        throw Error(Errc::InvalidModel, "GHZ outcome tables must be over (X, Y, Z) in {-1, +1}");
    }
    if (tables.size() != kGhzSettings.size()) throw Error(Errc::InvalidModel, "outcome table for an unused triple");
    for (const auto& [a, w] : settings.table()) {
      const GhzSetting s{a[0], a[1], a[2]};
      if (!tables.count(s)) throw Error(Errc::InvalidModel, "setting " + ghz_setting_str(s) + " is outside the four used triples");
    }
    return GhzSurfaceModel(std::move(settings), std::move(tables));
  }

  [[nodiscard]] const JointDistribution<T>& settings() const noexcept { return settings_; }
  [[nodiscard]] const std::map<GhzSetting, JointDistribution<T>>& tables() const noexcept { return tables_; }
  [[nodiscard]] const JointDistribution<T>& table(const GhzSetting& s) const {
    auto it = tables_.find(s);
    if (it == tables_.end()) throw Error(Errc::UndefinedConditional, "no table for " + ghz_setting_str(s));
    return it->second;
  }

 private:
  GhzSurfaceModel(JointDistribution<T> settings, std::map<GhzSetting, JointDistribution<T>> tables)
      : settings_(std::move(settings)), tables_(std::move(tables)) {}

  JointDistribution<T> settings_;
  std::map<GhzSetting, JointDistribution<T>> tables_;
};

namespace detail {

template <Scalar T>
JointDistribution<T> uniform_ghz_settings() {
  std::vector<WeightedAssignment<T>> e;
  for (const auto& s : kGhzSettings) e.push_back({{s.a, s.b, s.c}, T(1) / 4});
  return make_joint(ghz_setting_schema(), e);
}

template <Scalar T>
JointDistribution<T> table_from(const std::vector<std::pair<std::array<int, 3>, T>>& cells) {
  std::vector<WeightedAssignment<T>> e;
  for (const auto& [xyz, w] : cells) e.push_back({{xyz[0], xyz[1], xyz[2]}, w});
  return make_joint(ghz_outcome_schema(), e);
}

}  // namespace detail

/// Per triple, uniform over the four outcome triples meeting its product
/// condition; every single-party marginal is then 1/2.
template <Scalar T>
GhzSurfaceModel<T> ghz_qm_surface_model() {
  std::map<GhzSetting, JointDistribution<T>> tables;
  for (const auto& s : kGhzSettings) {
    std::vector<std::pair<std::array<int, 3>, T>> cells;
    for (int x : {-1, 1})
      for (int y : {-1, 1})
        for (int z : {-1, 1})
          if (y == ghz_sign(s) * x * z) cells.push_back({{x, y, z}, T(1) / 4});
    tables.emplace(s, detail::table_from(cells));
  }
  return GhzSurfaceModel<T>::make(detail::uniform_ghz_settings<T>(), std::move(tables));
}

/// X = +1 with certainty under both A settings; (Y, Z) perfectly correlated
/// for (B, C) in {(1,1), (1,2), (2,1)} and anti-correlated for (2,2), each
/// branch with probability 1/2.
template <Scalar T>
GhzSurfaceModel<T> build_ghz_counterexample() {
  std::map<GhzSetting, JointDistribution<T>> tables;
  const T half = T(1) / 2;
  for (const auto& s : kGhzSettings) {
    const bool anti = s.b == 2 && s.c == 2;
    tables.emplace(s, anti ? detail::table_from<T>({{{1, 1, -1}, half}, {{1, -1, 1}, half}})
                           : detail::table_from<T>({{{1, 1, 1}, half}, {{1, -1, -1}, half}}));
  }
  return GhzSurfaceModel<T>::make(detail::uniform_ghz_settings<T>(), std::move(tables));
}

/// P(Y = X*Z | triple) = 1 for the three positive triples and
/// P(Y != X*Z | 2-2-2) = 1.
template <Scalar T>
AssumptionVerdict<T> check_ghz_correlations(const GhzSurfaceModel<T>& model,
                                            const T& tol = ScalarTraits<T>::default_tolerance()) {
  std::vector<Witness<T>> v;
  for (const auto& s : kGhzSettings) {
    const int sign = ghz_sign(s);
    const auto p = event_prob(model.table(s), [sign](const AssignmentView& o) {
      return o["Y"] == sign * o["X"] * o["Z"];
    });
    if (!approx_equal(p.value(), T(1), tol))
      v.push_back({{std::nullopt, std::nullopt,
                    ghz_setting_str(s) + (sign > 0 ? ": P(Y = X*Z) must be 1" : ": P(Y != X*Z) must be 1")},
                   p.value(), T(1)});
  }
  return detail::universal(Assumption::QMAgreement, std::move(v));
}

/// P(party = +1 | triple) depends only on that party's own setting.
template <Scalar T>
AssumptionVerdict<T> check_ghz_surface_locality(const GhzSurfaceModel<T>& model,
                                                const T& tol = ScalarTraits<T>::default_tolerance()) {
  std::vector<Witness<T>> v;
  const std::array<const char*, 3> outcome{"X", "Y", "Z"};
  for (std::size_t party = 0; party < 3; ++party) {
    for (int setting : {1, 2}) {
      std::optional<std::pair<GhzSetting, T>> reference;
      for (const auto& s : kGhzSettings) {
        const int own = party == 0 ? s.a : party == 1 ? s.b : s.c;
        if (own != setting) continue;
        const T value = probability_of(model.table(s), {{outcome[party], 1}});
        if (!reference) {
          reference.emplace(s, value);
        } else if (!approx_equal(value, reference->second, tol)) {
          v.push_back({{std::nullopt, std::nullopt,
                        std::string("P(") + outcome[party] + "=1) at " + ghz_setting_str(s) + " differs from " +
                            ghz_setting_str(reference->first)},
                       value, reference->second});
        }
      }
    }
  }
  return detail::universal(Assumption::SurfaceLocality, std::move(v));
}

/// P(party = +1 | own setting); requires surface locality for a unique value.
template <Scalar T>
T ghz_marginal(const GhzSurfaceModel<T>& model, char party, int setting) {
  const char* name = party == 'X' ? "X" : party == 'Y' ? "Y" : "Z";
  for (const auto& s : kGhzSettings) {
    const int own = party == 'X' ? s.a : party == 'Y' ? s.b : s.c;
    if (own == setting) return probability_of(model.table(s), {{name, 1}});
  }
  throw Error(Errc::UndefinedConditional, "no triple uses that setting");
}

/// Deterministic assignment x_s, y_s, z_s for settings s in {1, 2}.
struct GhzAssignment {
  std::array<int, 2> x{1, 1};
  std::array<int, 2> y{1, 1};
  std::array<int, 2> z{1, 1};
};

/// y_{b} = sign * x_{a} * z_{c}.
struct GhzConstraint {
  int a = 1;
  int b = 1;
  int c = 1;
  int sign = 1;

  [[nodiscard]] bool satisfied_by(const GhzAssignment& g) const {
    return g.y[static_cast<std::size_t>(b - 1)] ==
           sign * g.x[static_cast<std::size_t>(a - 1)] * g.z[static_cast<std::size_t>(c - 1)];
  }
};

/// y1 = x1 z2, y2 = x1 z1, y1 = x2 z1, y2 = -x2 z2.
inline std::vector<GhzConstraint> ghz_constraints() {
  std::vector<GhzConstraint> out;
  for (const auto& s : kGhzSettings) out.push_back({s.a, s.b, s.c, ghz_sign(s)});
  return out;
}

/// Relabel +1 <-> -1 for one particle ('X', 'Y' or 'Z') on both settings:
/// every constraint mentioning it flips sign.
inline std::vector<GhzConstraint> relabel_particle(std::vector<GhzConstraint> constraints, char particle) {
  if (particle != 'X' && particle != 'Y' && particle != 'Z') throw std::invalid_argument("particle must be X, Y or Z");
  for (auto& c : constraints) c.sign = -c.sign;
  return constraints;
}

inline GhzAssignment ghz_assignment_from_bits(unsigned bits) {
  auto pm = [bits](unsigned i) { return ((bits >> i) & 1U) ? 1 : -1; };
  GhzAssignment g;
  g.x = {pm(5), pm(4)};
  g.y = {pm(3), pm(2)};
  g.z = {pm(1), pm(0)};
  return g;
}

struct GhzCount {
  int satisfying = 0;
  int total = 0;
};

inline GhzCount count_ghz_assignments(const std::vector<GhzConstraint>& constraints) {
  GhzCount r;
  for (unsigned bits = 0; bits < 64; ++bits) {
    const auto g = ghz_assignment_from_bits(bits);
    bool ok = true;
    for (const auto& c : constraints) ok = ok && c.satisfied_by(g);
    r.satisfying += ok ? 1 : 0;
    ++r.total;
  }
  return r;
}

/// All 64 deterministic assignments against the four GHZ constraints. None
/// satisfies them.
inline GhzCount enumerate_ghz_assignments() {
  const auto r = count_ghz_assignments(ghz_constraints());
  if (r.satisfying != 0 || r.total != 64) throw std::logic_error("a deterministic GHZ assignment satisfies all four");
  return r;
}

template <Scalar T>
struct NoSoritesReport {
  AssumptionVerdict<T> correlations;
  AssumptionVerdict<T> locality;
  T x_given_a1;
  T x_given_a2;
  /// z2, y1, z1, y2 as forced by the correlation lemma on the (Y, Z) tables.
  ChainMarginals<Rational> residual_chain;
  bool photon_chain_pin_infeasible = false;
  bool no_sorites = false;
};

/// Relations between Y and Z marginals implied by the (Y, Z) sub-tables of a
/// GHZ model, over entries [z2, y1, z1, y2].
template <Scalar T>
ChainConstraints ghz_residual_constraints(const GhzSurfaceModel<T>& model,
                                          const T& tol = ScalarTraits<T>::default_tolerance()) {
  ChainConstraints system;
  system.entries = {{Owner::Other, 2, "P(Z=1|C=2)", Rational(0)},
                    {Owner::Other, 1, "P(Y=1|B=1)", Rational(0)},
                    {Owner::Other, 1, "P(Z=1|C=1)", Rational(0)},
                    {Owner::Other, 2, "P(Y=1|B=2)", Rational(0)}};
  auto y_entry = [](int b) { return b == 1 ? std::size_t{1} : std::size_t{3}; };
  auto z_entry = [](int c) { return c == 1 ? std::size_t{2} : std::size_t{0}; };
  for (const auto& s : kGhzSettings) {
    const auto yz = marginalize(model.table(s), {"Y", "Z"});
    const auto lemma = cr_lemma_check(yz, tol);
    system.relations.push_back({y_entry(s.b), z_entry(s.c), lemma.relation});
  }
  return system;
}

/// The four GHZ settings with their perfect correlations and surface
/// locality do not force the X marginals to 1/2: the counterexample keeps
/// P(X=1|A=a) = 1, while the residual (Y, Z) relations still force those four
/// marginals to 1/2. On the photon chain the same pin is infeasible.
template <Scalar T>
NoSoritesReport<T> check_no_sorites_ghz() {
  const auto model = build_ghz_counterexample<T>();
  NoSoritesReport<T> r{check_ghz_correlations(model), check_ghz_surface_locality(model),
                       ghz_marginal(model, 'X', 1), ghz_marginal(model, 'X', 2), {}, false, false};
  r.residual_chain = solve_sorites_chain(ghz_residual_constraints(model));

  auto photon = sorites_chain_constraints(3);
  photon.pins.push_back({1, Rational(1)});
  try {
    (void)solve_sorites_chain(photon);
  } catch (const Error& e) {
    r.photon_chain_pin_infeasible = e.code() == Errc::InfeasibleChain;
  }
  r.no_sorites = r.correlations.holds && r.locality.holds && r.x_given_a1 != T(1) / 2;
  return r;
}

}  // namespace sorites
