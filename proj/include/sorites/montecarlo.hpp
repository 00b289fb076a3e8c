#pragma once

// Seeded sampling of chain experiments and binomial frequency checks.
//
// Generator: SplitMix64. With 64-bit state s (initialised to the seed), each
// draw does
//     s += 0x9E3779B97F4A7C15
//     z  = s
//     z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//     z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
//     out = z ^ (z >> 31)
// (all arithmetic mod 2^64). A uniform u in [0, 1) is (out >> 11) * 2^-53.
// An outcome is the first cell, in the order (0,0), (0,1), (1,0), (1,1), whose
// cumulative probability exceeds u.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "sorites/chain.hpp"
#include "sorites/error.hpp"
#include "sorites/models.hpp"
#include "sorites/scalar.hpp"

namespace sorites {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

struct TrialRecord {
  SettingPair pair;
  int x = 0;
  int y = 0;
  std::uint64_t index = 0;
};

struct EmpiricalSummary {
  SettingPair pair;
  std::uint64_t trials = 0;
  /// Counts per outcome cell in the fixed order (0,0), (0,1), (1,0), (1,1).
  std::array<std::uint64_t, 4> cells{};

  [[nodiscard]] std::uint64_t matches() const noexcept { return cells[0] + cells[3]; }
  [[nodiscard]] std::uint64_t mismatches() const noexcept { return cells[1] + cells[2]; }
  [[nodiscard]] std::uint64_t x_ones() const noexcept { return cells[2] + cells[3]; }
  [[nodiscard]] std::uint64_t y_ones() const noexcept { return cells[1] + cells[3]; }

  friend bool operator==(const EmpiricalSummary&, const EmpiricalSummary&) = default;
};

namespace detail {

/// Cumulative cell boundaries; the last cell of positive weight is extended to
/// 1 so rounding can never select a zero-weight cell.
template <Scalar T>
std::array<double, 4> cumulative(const OutcomeCells<T>& cells) {
  std::array<double, 4> cum{};
  double acc = 0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    acc += ScalarTraits<T>::to_double(cells[i]);
    cum[i] = acc;
    if (cells[i] > 0) last_positive = i;
  }
  for (std::size_t i = last_positive; i < 4; ++i) cum[i] = 1.0;
  return cum;
}

template <Scalar T>
const JointDistribution<T>& sampled_table(const SurfaceModel<T>& model, const SettingPair& pair) {
  if (!model.chain().contains(pair) || !model.has_outcome(pair))
    throw Error(Errc::UnknownSettingPair, "(" + std::to_string(pair.alice) + "," + std::to_string(pair.bob) +
                                              ") is not a setting pair of the model");
  return model.outcome(pair);
}

}  // namespace detail

/// Individual trials for one setting pair; fully determined by `seed`.
template <Scalar T>
std::vector<TrialRecord> sample_trials(const SurfaceModel<T>& model, const SettingPair& pair, std::uint64_t trials,
                                       std::uint64_t seed) {
  if (trials == 0) throw Error(Errc::TooFewTrials, "at least one trial is required");
  const auto cum = detail::cumulative(cells_of(detail::sampled_table(model, pair)));
  SplitMix64 rng(seed);
  std::vector<TrialRecord> out;
  out.reserve(trials);
  for (std::uint64_t i = 0; i < trials; ++i) {
    const double u = rng.uniform();
    std::size_t cell = 0;
    while (cell < 3 && !(u < cum[cell])) ++cell;
    out.push_back({pair, kOutcomeCells[cell].first, kOutcomeCells[cell].second, i});
  }
  return out;
}

inline EmpiricalSummary summarize(const SettingPair& pair, const std::vector<TrialRecord>& records) {
  EmpiricalSummary s{pair, records.size(), {}};
  for (const auto& r : records) ++s.cells[static_cast<std::size_t>(r.x * 2 + r.y)];
  return s;
}

template <Scalar T>
EmpiricalSummary sample_runs(const SurfaceModel<T>& model, const SettingPair& pair, std::uint64_t trials,
                             std::uint64_t seed) {
  return summarize(pair, sample_trials(model, pair, trials, seed));
}

enum class Statistic { Match, Mismatch, XOne, YOne };

struct FrequencyTest {
  bool pass = false;
  double z = 0;
  double frequency = 0;
  double expected = 0;
};

inline constexpr std::uint64_t kMinFrequencyTrials = 30;

/// z = |freq - expected| / sqrt(expected (1 - expected) / n), pass iff z <= sigmas.
/// Expected 0 or 1 is exact: pass iff the count is 0 or n.
inline FrequencyTest frequency_test(std::uint64_t hits, std::uint64_t trials, double expected, double sigmas) {
  if (trials < kMinFrequencyTrials)
    throw Error(Errc::TooFewTrials, std::to_string(trials) + " trials; the normal approximation needs at least " +
                                        std::to_string(kMinFrequencyTrials));
  const double n = static_cast<double>(trials);
  FrequencyTest r{false, 0, static_cast<double>(hits) / n, expected};
  if (expected <= 0.0 || expected >= 1.0) {
    r.pass = expected <= 0.0 ? hits == 0 : hits == trials;
    r.z = r.pass ? 0.0 : std::numeric_limits<double>::infinity();
    return r;
  }
  r.z = std::abs(r.frequency - expected) / std::sqrt(expected * (1.0 - expected) / n);
  r.pass = r.z <= sigmas;
  return r;
}

inline std::uint64_t count_of(const EmpiricalSummary& s, Statistic stat) {
  switch (stat) {
    case Statistic::Match: return s.matches();
    case Statistic::Mismatch: return s.mismatches();
    case Statistic::XOne: return s.x_ones();
    case Statistic::YOne: return s.y_ones();
  }
  return 0;
}

inline FrequencyTest frequency_test(const EmpiricalSummary& s, Statistic stat, double expected, double sigmas) {
  return frequency_test(count_of(s, stat), s.trials, expected, sigmas);
}

}  // namespace sorites
