#pragma once

// Deterministic local strategies over a chain: every angle is pre-assigned an
// outcome bit. These are the vertices of the local polytope, so scanning them
// gives the exact local minimum of any linear failure count.

#include <bit>
#include <cstdint>
#include <limits>
#include <ranges>
#include <vector>

#include "sorites/chain.hpp"
#include "sorites/error.hpp"
#include "sorites/models.hpp"
#include "sorites/scalar.hpp"

namespace sorites {

inline constexpr int kMaxEnumerableLinks = 25;

/// Outcome bit per angle index 0..N. Alice answers at odd indices, Bob at
/// even ones. Strategy number s puts angle 0 in the most significant bit, so
/// increasing s is lexicographic order over (angle 0, angle 1, ..., angle N).
class DeterministicStrategy {
 public:
  DeterministicStrategy(int n_links, std::uint64_t bits) : n_(n_links), bits_(bits) {}

  [[nodiscard]] int n_links() const noexcept { return n_; }
  [[nodiscard]] std::uint64_t bits() const noexcept { return bits_; }

  [[nodiscard]] int outcome(int angle_index) const noexcept {
    return static_cast<int>((bits_ >> (n_ - angle_index)) & 1U);
  }
  [[nodiscard]] int alice(int angle_index) const noexcept { return outcome(angle_index); }
  [[nodiscard]] int bob(int angle_index) const noexcept { return outcome(angle_index); }

  friend bool operator==(const DeterministicStrategy&, const DeterministicStrategy&) = default;

 private:
  int n_;
  std::uint64_t bits_;
};

namespace detail {
inline void require_enumerable(const ChainSpec& chain) {
  if (chain.n_links() > kMaxEnumerableLinks)
    throw Error(Errc::ChainTooLarge, "full enumeration supports N <= " + std::to_string(kMaxEnumerableLinks) +
                                         ", got " + std::to_string(chain.n_links()));
}
}  // namespace detail

inline std::uint64_t strategy_count(const ChainSpec& chain) {
  detail::require_enumerable(chain);
  return std::uint64_t{1} << (chain.n_links() + 1);
}

/// All 2^(N+1) strategies, lazily, in lexicographic order starting at all-zeros.
inline auto enumerate_strategies(const ChainSpec& chain) {
  const int n = chain.n_links();
  return std::views::iota(std::uint64_t{0}, strategy_count(chain)) |
         std::views::transform([n](std::uint64_t s) { return DeterministicStrategy(n, s); });
}

struct BrokenLinks {
  int count = 0;
  std::vector<SettingPair> links;
};

/// A solid link breaks when the two bits differ; the dashed link breaks when
/// they agree.
inline BrokenLinks broken_links(const DeterministicStrategy& s, const ChainSpec& chain) {
  BrokenLinks out;
  for (const auto& p : chain.settings()) {
    const bool equal = s.alice(p.alice) == s.bob(p.bob);
    if (chain.is_dashed(p) ? equal : !equal) out.links.push_back(p);
  }
  out.count = static_cast<int>(out.links.size());
  return out;
}

namespace detail {
/// Same count as broken_links(), on the packed bits.
inline int broken_count_bits(std::uint64_t s, int n) {
  const std::uint64_t solid_mask = (std::uint64_t{1} << n) - 1;
  const int solid = std::popcount((s ^ (s >> 1)) & solid_mask);
  const int dashed = ((s & 1U) == ((s >> n) & 1U)) ? 1 : 0;
  return solid + dashed;
}
}  // namespace detail

/// Minimum total failure count over deterministic strategies; by convexity
/// also the minimum over all mixtures. Equals 1 on every valid chain.
inline Rational local_min_total_failure(const ChainSpec& chain) {
  const auto count = strategy_count(chain);
  int best = std::numeric_limits<int>::max();
  for (std::uint64_t s = 0; s < count && best > 0; ++s) best = std::min(best, detail::broken_count_bits(s, chain.n_links()));
  if (best != 1) throw std::logic_error("local floor differs from 1");
  return Rational(best);
}

/// QM-expected number of failed links: N sin^2(90/N) + (1 - sin^2(90)).
template <Scalar T>
T qm_expected_failures(const ChainSpec& chain) {
  const T per_link = mismatch_probability<T>(chain.delta_theta());
  return T(chain.n_links()) * per_link + (T(1) - mismatch_probability<T>(Angle(Rational(90))));
}

/// Hidden model whose members are deterministic strategies, mixed uniformly,
/// with uniform settings over S (lambda = position in `strategies`).
inline HiddenModel<Rational> strategy_mixture_model(const ChainSpec& chain,
                                                    const std::vector<DeterministicStrategy>& strategies) {
  if (strategies.empty()) throw Error(Errc::InvalidModel, "empty strategy mixture");
  const auto settings = chain.settings();
  const Rational w(1, static_cast<long long>(strategies.size() * settings.size()));
  std::vector<Value> lambdas;
  std::vector<HiddenBlock<Rational>> blocks;
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    lambdas.push_back(static_cast<Value>(i));
    for (const auto& p : settings) {
      OutcomeCells<Rational> c{Rational(0), Rational(0), Rational(0), Rational(0)};
      c[static_cast<std::size_t>(strategies[i].alice(p.alice) * 2 + strategies[i].bob(p.bob))] = 1;
      blocks.push_back({static_cast<Value>(i), p, w, c});
    }
  }
  return make_hidden_model(chain, lambdas, blocks);
}

}  // namespace sorites
