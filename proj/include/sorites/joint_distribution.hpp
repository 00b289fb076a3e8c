#pragma once

// Exact finite discrete probability: schemas of named finite variables,
// normalized joint tables over them, marginalization, conditioning and event
// probabilities.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sorites/error.hpp"
#include "sorites/probability.hpp"
#include "sorites/scalar.hpp"

namespace sorites {

using Value = int;

struct Variable {
  std::string name;
  std::vector<Value> domain;

  friend bool operator==(const Variable&, const Variable&) = default;
};

/// Ordered list of named variables with finite, nonempty, duplicate-free
/// domains.
class VariableSchema {
 public:
  VariableSchema() = default;

  explicit VariableSchema(std::vector<Variable> variables) : variables_(std::move(variables)) {
    std::set<std::string> names;
    for (const auto& v : variables_) {
      if (v.name.empty()) throw Error(Errc::InvalidSchema, "empty variable name");
      if (!names.insert(v.name).second) throw Error(Errc::InvalidSchema, "duplicate variable '" + v.name + "'");
      if (v.domain.empty()) throw Error(Errc::InvalidSchema, "empty domain for '" + v.name + "'");
      std::set<Value> seen(v.domain.begin(), v.domain.end());
      if (seen.size() != v.domain.size())
        throw Error(Errc::InvalidSchema, "duplicate domain value for '" + v.name + "'");
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return variables_.size(); }
  [[nodiscard]] const std::vector<Variable>& variables() const noexcept { return variables_; }
  [[nodiscard]] const Variable& operator[](std::size_t i) const { return variables_.at(i); }

  [[nodiscard]] std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < variables_.size(); ++i)
      if (variables_[i].name == name) return i;
    return std::nullopt;
  }

  [[nodiscard]] std::size_t index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw Error(Errc::UnknownVariable, "no variable '" + std::string(name) + "'");
  }

  [[nodiscard]] bool admits(std::size_t var, Value v) const {
    const auto& d = variables_.at(var).domain;
    return std::find(d.begin(), d.end(), v) != d.end();
  }

  [[nodiscard]] const std::vector<Value>& domain(std::string_view name) const {
    return variables_[index_of(name)].domain;
  }

  friend bool operator==(const VariableSchema&, const VariableSchema&) = default;

 private:
  std::vector<Variable> variables_;
};

/// Full assignment, one value per schema variable in schema order.
using Assignment = std::vector<Value>;

/// Named values for a subset of the schema.
using PartialAssignment = std::vector<std::pair<std::string, Value>>;

/// Read access to an assignment by variable name, handed to event predicates.
class AssignmentView {
 public:
  AssignmentView(const VariableSchema& schema, const Assignment& values) : schema_(&schema), values_(&values) {}

  [[nodiscard]] Value operator[](std::string_view name) const { return (*values_)[schema_->index_of(name)]; }
  [[nodiscard]] Value at(std::size_t i) const { return (*values_).at(i); }
  [[nodiscard]] const Assignment& values() const noexcept { return *values_; }

 private:
  const VariableSchema* schema_;
  const Assignment* values_;
};

template <Scalar T>
struct WeightedAssignment {
  Assignment values;
  T weight;
};

/// Immutable normalized weight table. Only strictly positive weights are
/// stored; absent assignments have weight 0.
template <Scalar T>
class JointDistribution {
 public:
  using Table = std::map<Assignment, T>;

  /// Validating constructor. Fails instead of renormalizing.
  static JointDistribution make(VariableSchema schema, const std::vector<WeightedAssignment<T>>& entries,
                                const T& tolerance = ScalarTraits<T>::default_tolerance()) {
    Table table;
    std::set<Assignment> seen;
    T total = 0;
    for (const auto& e : entries) {
      if (e.values.size() != schema.size())
        throw Error(Errc::UnknownVariableOrValue, "assignment arity " + std::to_string(e.values.size()) +
                                                      " does not match schema arity " + std::to_string(schema.size()));
      for (std::size_t i = 0; i < e.values.size(); ++i)
        if (!schema.admits(i, e.values[i]))
          throw Error(Errc::UnknownVariableOrValue,
                      "value " + std::to_string(e.values[i]) + " not in domain of '" + schema[i].name + "'");
      if (!seen.insert(e.values).second) throw Error(Errc::DuplicateAssignment, "assignment listed twice");
      if (e.weight < 0) throw Error(Errc::NegativeWeight, "weight " + ScalarTraits<T>::format(e.weight));
      total += e.weight;
      if (e.weight > 0) table.emplace(e.values, e.weight);
    }
    if (!approx_equal(total, T(1), tolerance))
      throw Error(Errc::NotNormalized, "weights sum to " + ScalarTraits<T>::format(total));
    return JointDistribution(std::move(schema), std::move(table));
  }

  [[nodiscard]] const VariableSchema& schema() const noexcept { return schema_; }
  [[nodiscard]] const Table& table() const noexcept { return table_; }

  [[nodiscard]] T weight(const Assignment& a) const {
    auto it = table_.find(a);
    return it == table_.end() ? T(0) : it->second;
  }

  [[nodiscard]] T total() const {
    T s = 0;
    for (const auto& [a, w] : table_) s += w;
    return s;
  }

  friend bool operator==(const JointDistribution&, const JointDistribution&) = default;

 private:
  template <Scalar U>
  friend class DistributionBuilder;

  JointDistribution(VariableSchema schema, Table table) : schema_(std::move(schema)), table_(std::move(table)) {}

  VariableSchema schema_;
  Table table_;
};

/// Internal path for tables whose normalization follows from how they were
/// derived (marginals and conditionals of a valid distribution).
template <Scalar U>
class DistributionBuilder {
 public:
  static JointDistribution<U> unchecked(VariableSchema schema, typename JointDistribution<U>::Table table) {
    return JointDistribution<U>(std::move(schema), std::move(table));
  }
};

template <Scalar T>
JointDistribution<T> make_joint(VariableSchema schema, const std::vector<WeightedAssignment<T>>& entries,
                                const T& tolerance = ScalarTraits<T>::default_tolerance()) {
  return JointDistribution<T>::make(std::move(schema), entries, tolerance);
}

namespace detail {

struct ResolvedPartial {
  std::vector<std::pair<std::size_t, Value>> fixed;

  [[nodiscard]] bool matches(const Assignment& a) const {
    for (const auto& [i, v] : fixed)
      if (a[i] != v) return false;
    return true;
  }
};

inline ResolvedPartial resolve(const VariableSchema& schema, const PartialAssignment& partial) {
  ResolvedPartial r;
  for (const auto& [name, v] : partial) {
    auto i = schema.find(name);
    if (!i) throw Error(Errc::UnknownVariableOrValue, "no variable '" + name + "'");
    if (!schema.admits(*i, v))
      throw Error(Errc::UnknownVariableOrValue, "value " + std::to_string(v) + " not in domain of '" + name + "'");
    r.fixed.emplace_back(*i, v);
  }
  return r;
}

}  // namespace detail

template <Scalar T>
JointDistribution<T> marginalize(const JointDistribution<T>& dist, const std::set<std::string>& keep) {
  const auto& schema = dist.schema();
  for (const auto& name : keep) (void)schema.index_of(name);
  std::vector<std::size_t> kept;
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (keep.count(schema[i].name)) {
      kept.push_back(i);
      vars.push_back(schema[i]);
    }
  }
  typename JointDistribution<T>::Table table;
  Assignment projected(kept.size());
  for (const auto& [a, w] : dist.table()) {
    for (std::size_t k = 0; k < kept.size(); ++k) projected[k] = a[kept[k]];
    table[projected] += w;
  }
  return DistributionBuilder<T>::unchecked(VariableSchema(std::move(vars)), std::move(table));
}

/// P(given) for a partial assignment.
template <Scalar T>
T probability_of(const JointDistribution<T>& dist, const PartialAssignment& given) {
  const auto r = detail::resolve(dist.schema(), given);
  T s = 0;
  for (const auto& [a, w] : dist.table())
    if (r.matches(a)) s += w;
  return s;
}

/// Conditional distribution over the variables not fixed by `given`.
template <Scalar T>
JointDistribution<T> condition(const JointDistribution<T>& dist, const PartialAssignment& given) {
  const auto& schema = dist.schema();
  const auto r = detail::resolve(schema, given);
  std::vector<bool> fixed(schema.size(), false);
  for (const auto& [i, v] : r.fixed) fixed[i] = true;
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (!fixed[i]) vars.push_back(schema[i]);

  T mass = 0;
  for (const auto& [a, w] : dist.table())
    if (r.matches(a)) mass += w;
  if (!(mass > 0)) throw Error(Errc::ZeroProbabilityCondition, "conditioning event has probability 0");

  typename JointDistribution<T>::Table table;
  Assignment rest;
  for (const auto& [a, w] : dist.table()) {
    if (!r.matches(a)) continue;
    rest.clear();
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!fixed[i]) rest.push_back(a[i]);
    table[rest] += w / mass;
  }
  return DistributionBuilder<T>::unchecked(VariableSchema(std::move(vars)), std::move(table));
}

template <Scalar T, class Predicate>
  requires std::predicate<Predicate, const AssignmentView&>
BasicProbability<T> event_prob(const JointDistribution<T>& dist, Predicate&& event) {
  T s = 0;
  for (const auto& [a, w] : dist.table())
    if (std::invoke(event, AssignmentView(dist.schema(), a))) s += w;
  return BasicProbability<T>(std::move(s));
}

/// Re-expresses a distribution in another scalar type.
template <Scalar To, Scalar From>
JointDistribution<To> convert(const JointDistribution<From>& dist) {
  typename JointDistribution<To>::Table table;
  for (const auto& [a, w] : dist.table()) table.emplace(a, scalar_cast<To>(w));
  return DistributionBuilder<To>::unchecked(dist.schema(), std::move(table));
}

}  // namespace sorites
