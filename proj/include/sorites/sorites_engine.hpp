#pragma once

// The two-valued correlation lemma, its quantitative gap bound, and exact
// propagation of marginal equalities around a chain.

#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sorites/chain.hpp"
#include "sorites/error.hpp"
#include "sorites/joint_distribution.hpp"
#include "sorites/scalar.hpp"

namespace sorites {

enum class CrRelation { Equal, Complementary, Neither };

inline constexpr std::string_view to_string(CrRelation r) noexcept {
  switch (r) {
    case CrRelation::Equal: return "Equal";
    case CrRelation::Complementary: return "Complementary";
    case CrRelation::Neither: return "Neither";
  }
  return "Neither";
}

template <Scalar T>
struct CrLemmaResult {
  T marginal_x;
  T marginal_y;
  CrRelation relation = CrRelation::Neither;
};

template <Scalar T>
struct CrGap {
  T gap;
  T bound;
};

namespace detail {

/// Cells of a joint over two binary variables indexed by (low/high, low/high)
/// positions; "= 1" means the higher domain value.
template <Scalar T>
std::array<T, 4> binary_cells(const JointDistribution<T>& joint) {
  const auto& s = joint.schema();
  if (s.size() != 2) throw Error(Errc::NonBinaryVariable, "expected a joint over exactly two variables");
  for (const auto& v : s.variables())
    if (v.domain.size() != 2) throw Error(Errc::NonBinaryVariable, "variable '" + v.name + "' is not two-valued");
  auto high = [&](std::size_t var, Value v) {
    const auto& d = s[var].domain;
    return v == std::max(d[0], d[1]) ? 1 : 0;
  };
  std::array<T, 4> c{T(0), T(0), T(0), T(0)};
  for (const auto& [a, w] : joint.table()) c[static_cast<std::size_t>(high(0, a[0]) * 2 + high(1, a[1]))] += w;
  return c;
}

}  // namespace detail

/// If P(X = Y) = 1 the marginals are equal; if P(X != Y) = 1 they are
/// complementary. Both conclusions are asserted, not assumed.
template <Scalar T>
CrLemmaResult<T> cr_lemma_check(const JointDistribution<T>& joint,
                                const T& tol = ScalarTraits<T>::default_tolerance()) {
  const auto c = detail::binary_cells(joint);
  CrLemmaResult<T> r{T(c[2] + c[3]), T(c[1] + c[3]), CrRelation::Neither};
  const T agree = c[0] + c[3];
  const T disagree = c[1] + c[2];
  if (approx_equal(agree, T(1), tol)) {
    r.relation = CrRelation::Equal;
    if (!approx_equal(r.marginal_x, r.marginal_y, T(2 * tol)))
      throw std::logic_error("correlation lemma (equal case) violated");
  } else if (approx_equal(disagree, T(1), tol)) {
    r.relation = CrRelation::Complementary;
    if (!approx_equal(r.marginal_x, T(1 - r.marginal_y), T(2 * tol)))
      throw std::logic_error("correlation lemma (complementary case) violated");
  }
  return r;
}

/// gap = |P(X=1) - P(Y=1)|, bound = P(X != Y); gap <= bound always.
template <Scalar T>
CrGap<T> cr_gap_bound(const JointDistribution<T>& joint) {
  const auto c = detail::binary_cells(joint);
  CrGap<T> g{abs_diff(T(c[2] + c[3]), T(c[1] + c[3])), T(c[1] + c[2])};
  if (g.gap > g.bound + T(ScalarTraits<T>::exact ? 0 : 1e-12)) throw std::logic_error("gap exceeds P(X != Y)");
  return g;
}

enum class Owner { Bob, Alice, Other };

template <Scalar T>
struct ChainEntry {
  Owner owner = Owner::Other;
  int index = 0;
  std::string label;
  T value;

  friend bool operator==(const ChainEntry&, const ChainEntry&) = default;
};

/// Marginals along a chain: p0, q1, p2, ..., q_N for the photon chain, where
/// p_k = P(Y = 1 | B = k dtheta) and q_k = P(X = 1 | A = k dtheta).
template <Scalar T>
struct ChainMarginals {
  std::vector<ChainEntry<T>> entries;

  friend bool operator==(const ChainMarginals&, const ChainMarginals&) = default;
};

inline std::string chain_label(int index) {
  return (index % 2 == 0 ? "p" : "q") + std::to_string(index);
}

/// A system of relations between unknown marginals x_i in [0, 1]:
/// x_i = x_j, x_i = 1 - x_j, or x_i = v.
struct ChainConstraints {
  struct Relation {
    std::size_t lhs;
    std::size_t rhs;
    CrRelation kind;  // Equal or Complementary
  };
  struct Pin {
    std::size_t entry;
    Rational value;
  };

  std::vector<ChainEntry<Rational>> entries;  // values ignored
  std::vector<Relation> relations;
  std::vector<Pin> pins;
};

/// p0 = q1 = p2 = ... = q_N and q_N = 1 - p0 over an N-link chain.
inline ChainConstraints sorites_chain_constraints(int n_links) {
  if (n_links < 1 || n_links % 2 == 0)
    throw Error(Errc::EvenOrNonPositiveN, "chain length must be odd and positive, got " + std::to_string(n_links));
  ChainConstraints c;
  for (int k = 0; k <= n_links; ++k)
    c.entries.push_back({k % 2 == 0 ? Owner::Bob : Owner::Alice, k, chain_label(k), Rational(0)});
  for (std::size_t k = 0; k + 1 < c.entries.size(); ++k) c.relations.push_back({k, k + 1, CrRelation::Equal});
  c.relations.push_back({c.entries.size() - 1, 0, CrRelation::Complementary});
  return c;
}

/// Unique exact solution of a relation system. Throws IncompleteChain when
/// some entry is not determined, InfeasibleChain when the system has no
/// solution in [0, 1].
inline ChainMarginals<Rational> solve_sorites_chain(const ChainConstraints& system) {
  const std::size_t n = system.entries.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::vector<int> parity(n, 0);  // x_i = parity ? 1 - x_parent : x_parent
  std::vector<std::optional<Rational>> root_value(n);

  auto find = [&](std::size_t i) {
    int p = 0;
    std::size_t r = i;
    while (parent[r] != r) {
      p ^= parity[r];
      r = parent[r];
    }
    // Path compression keeping parities relative to the root.
    std::size_t cur = i;
    int cur_p = p;
    while (parent[cur] != cur) {
      const std::size_t next = parent[cur];
      const int next_p = cur_p ^ parity[cur];
      parent[cur] = r;
      parity[cur] = cur_p;
      cur = next;
      cur_p = next_p;
    }
    return std::pair{r, p};
  };
  auto apply = [](int p, const Rational& v) { return p ? Rational(1 - v) : v; };
  auto infeasible = [&](const std::string& why) { throw Error(Errc::InfeasibleChain, why); };
  auto pin_root = [&](std::size_t root, const Rational& v) {
    if (v < 0 || v > 1) infeasible("value " + v.str() + " outside [0, 1]");
    if (root_value[root] && *root_value[root] != v)
      infeasible("conflicting values " + root_value[root]->str() + " and " + v.str());
    root_value[root] = v;
  };
  auto check_index = [&](std::size_t i) {
    if (i >= n) throw Error(Errc::IncompleteChain, "relation refers to a missing entry");
  };

  for (const auto& rel : system.relations) {
    check_index(rel.lhs);
    check_index(rel.rhs);
    if (rel.kind == CrRelation::Neither) continue;
    const int r = rel.kind == CrRelation::Complementary ? 1 : 0;
    auto [ri, pi] = find(rel.lhs);
    auto [rj, pj] = find(rel.rhs);
    if (ri == rj) {
      // x_r = 1 - x_r: an odd cycle pins the component to 1/2.
      if ((pi ^ pj) != r) pin_root(ri, Rational(1, 2));
      continue;
    }
    const int link = pi ^ pj ^ r;  // x_rj = link ? 1 - x_ri : x_ri
    parent[rj] = ri;
    parity[rj] = link;
    if (root_value[rj]) {
      const Rational v = apply(link, *root_value[rj]);
      root_value[rj].reset();
      pin_root(ri, v);
    }
  }
  for (const auto& pin : system.pins) {
    check_index(pin.entry);
    auto [r, p] = find(pin.entry);
    pin_root(r, apply(p, pin.value));
  }

  ChainMarginals<Rational> out;
  std::string undetermined;
  for (std::size_t i = 0; i < n; ++i) {
    auto [r, p] = find(i);
    auto e = system.entries[i];
    if (!root_value[r]) {
      undetermined += (undetermined.empty() ? "" : ", ") + e.label;
      continue;
    }
    e.value = apply(p, *root_value[r]);
    out.entries.push_back(std::move(e));
  }
  if (!undetermined.empty())
    throw Error(Errc::IncompleteChain, "entries not determined by the relations: " + undetermined);
  return out;
}

/// Departure of one chain experiment from its ideal correlation:
/// P(X != Y) on a solid link, P(X = Y) on the dashed link.
template <Scalar T>
struct LinkSlack {
  SettingPair link;
  T epsilon;
};

/// Uniform bound (sum of slacks) / 2 on |m - 1/2| for every chain marginal m
/// compatible with the slacked links (walk the cycle once from m back to
/// itself, picking up at most epsilon per link and one complement).
template <Scalar T>
T chain_marginal_bound(const ChainSpec& chain, std::span<const LinkSlack<T>> slacks) {
  if (slacks.size() != static_cast<std::size_t>(chain.experiment_count()))
    throw Error(Errc::WrongSlackCount, "expected " + std::to_string(chain.experiment_count()) + " slacks, got " +
                                           std::to_string(slacks.size()));
  T total = 0;
  for (const auto& s : slacks) {
    if (s.epsilon < 0 || s.epsilon > 1) throw Error(Errc::InvalidModel, "slack outside [0, 1]");
    total += s.epsilon;
  }
  return total / 2;
}

}  // namespace sorites
