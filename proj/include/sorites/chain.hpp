#pragma once

// Chained setting geometry and the quantum mismatch curve.
//
// A chain with N links (N odd, N >= 3) splits the quarter turn into N steps of
// dtheta = 90/N degrees. Alice owns the odd multiples dtheta, 3 dtheta, ...,
// N dtheta = 90; Bob owns the even multiples 0, 2 dtheta, ..., (N-1) dtheta.
// Angles are carried as integer indices k (angle = k * dtheta), so the
// geometry is exact; only sin^2 is ever evaluated in floating point.

#include <algorithm>
#include <cmath>
#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "sorites/error.hpp"
#include "sorites/scalar.hpp"

namespace sorites {

/// An angle in degrees, held as an exact rational.
class Angle {
 public:
  Angle() = default;
  explicit Angle(Rational degrees) : degrees_(std::move(degrees)) {}

  static Angle from_index(int index, int n_links) { return Angle(Rational(index * 90, n_links)); }

  [[nodiscard]] const Rational& degrees() const noexcept { return degrees_; }
  [[nodiscard]] double to_double() const { return degrees_.convert_to<double>(); }

  friend bool operator==(const Angle& a, const Angle& b) { return a.degrees_ == b.degrees_; }
  friend bool operator<(const Angle& a, const Angle& b) { return a.degrees_ < b.degrees_; }

 private:
  Rational degrees_{0};
};

/// One experiment of the chain: Alice's and Bob's angle indices.
struct SettingPair {
  int alice = 0;
  int bob = 0;

  friend auto operator<=>(const SettingPair&, const SettingPair&) = default;
};

class ChainSpec {
 public:
  [[nodiscard]] int n_links() const noexcept { return n_; }
  [[nodiscard]] Angle delta_theta() const { return Angle(Rational(90, n_)); }
  [[nodiscard]] Angle angle(int index) const { return Angle::from_index(index, n_); }

  [[nodiscard]] const std::vector<int>& alice_angles() const noexcept { return alice_; }
  [[nodiscard]] const std::vector<int>& bob_angles() const noexcept { return bob_; }

  /// Ordered (p0 = q1), (q1 = p2), ..., (p_{N-1} = q_N).
  [[nodiscard]] const std::vector<SettingPair>& solid_links() const noexcept { return solid_; }
  [[nodiscard]] SettingPair dashed_link() const noexcept { return {n_, 0}; }

  /// The setting set S: the solid links in chain order, dashed link last.
  [[nodiscard]] std::vector<SettingPair> settings() const {
    auto s = solid_;
    s.push_back(dashed_link());
    return s;
  }

  [[nodiscard]] int experiment_count() const noexcept { return n_ + 1; }

  [[nodiscard]] bool is_dashed(const SettingPair& p) const noexcept { return p == dashed_link(); }

  [[nodiscard]] bool contains(const SettingPair& p) const {
    return is_dashed(p) || std::find(solid_.begin(), solid_.end(), p) != solid_.end();
  }

  [[nodiscard]] bool is_alice_angle(int k) const noexcept { return k >= 1 && k <= n_ && k % 2 == 1; }
  [[nodiscard]] bool is_bob_angle(int k) const noexcept { return k >= 0 && k < n_ && k % 2 == 0; }

  /// |alice - bob| in degrees.
  [[nodiscard]] Angle separation(const SettingPair& p) const {
    return Angle(Rational(std::abs(p.alice - p.bob) * 90, n_));
  }

  friend bool operator==(const ChainSpec& a, const ChainSpec& b) { return a.n_ == b.n_; }

 private:
  friend ChainSpec build_chain(int n_links);

  int n_ = 0;
  std::vector<int> alice_;
  std::vector<int> bob_;
  std::vector<SettingPair> solid_;
};

inline ChainSpec build_chain(int n_links) {
  if (n_links <= 0 || n_links % 2 == 0)
    throw Error(Errc::EvenOrNonPositiveN, "chain length must be odd and positive, got " + std::to_string(n_links));
  if (n_links == 1)
    throw Error(Errc::EvenOrNonPositiveN, "N = 1 makes the only solid link coincide with the dashed link");
  ChainSpec c;
  c.n_ = n_links;
  for (int k = 0; k <= n_links; ++k) (k % 2 == 1 ? c.alice_ : c.bob_).push_back(k);
  for (int i = 1; i <= n_links; ++i) {
    const int alice = (i % 2 == 1) ? i : i - 1;
    const int bob = (i % 2 == 1) ? i - 1 : i;
    c.solid_.push_back({alice, bob});
  }
  return c;
}

namespace detail {

inline void require_quarter_turn(const Angle& a) {
  if (a.degrees() < 0 || a.degrees() > 90)
    throw Error(Errc::OutOfRangeAngle, "angle outside [0, 90] degrees: " + a.degrees().str());
}

/// sin^2 at the points where it is rational.
inline std::optional<Rational> exact_sin_squared(const Angle& a) {
  const auto& d = a.degrees();
  if (d == 0) return Rational(0);
  if (d == 30) return Rational(1, 4);
  if (d == 45) return Rational(1, 2);
  if (d == 60) return Rational(3, 4);
  if (d == 90) return Rational(1);
  return std::nullopt;
}

inline double sin_squared(const Angle& a) {
  if (auto exact = exact_sin_squared(a)) return exact->convert_to<double>();
  constexpr long double pi = 3.141592653589793238462643383279502884L;
  const long double radians = a.degrees().convert_to<long double>() * pi / 180.0L;
  const long double s = std::sin(radians);
  return static_cast<double>(s * s);
}

}  // namespace detail

/// QM probability that the two outcomes differ at angle separation `delta`:
/// sin^2(delta). With T = Rational only 0, 30, 45, 60 and 90 degrees are
/// representable.
template <Scalar T>
T mismatch_probability(const Angle& delta) {
  detail::require_quarter_turn(delta);
  if constexpr (ScalarTraits<T>::exact) {
    if (auto exact = detail::exact_sin_squared(delta)) return *exact;
    throw Error(Errc::NotExactlyRepresentable, "sin^2 of " + delta.degrees().str() + " degrees is irrational");
  } else {
    return detail::sin_squared(delta);
  }
}

/// Idealized step curve: 0 below 90 degrees, 1 at 90.
template <Scalar T>
T simplified_mismatch(const Angle& delta) {
  detail::require_quarter_turn(delta);
  return delta.degrees() == 90 ? T(1) : T(0);
}

/// Probability that none of the N solid-link experiments shows a mismatch,
/// treating them as independent runs: (1 - sin^2(90/N))^N.
template <Scalar T>
T prob_no_link_broken(int n_links) {
  if (n_links < 1) throw Error(Errc::EvenOrNonPositiveN, "number of links must be positive, got " + std::to_string(n_links));
  const Angle step(Rational(90, n_links));
  if constexpr (ScalarTraits<T>::exact) {
    const T keep = T(1) - mismatch_probability<T>(step);
    T result = 1;
    for (int i = 0; i < n_links; ++i) result *= keep;
    return result;
  } else {
    const long double keep = 1.0L - detail::sin_squared(step);
    return static_cast<double>(std::pow(keep, static_cast<long double>(n_links)));
  }
}

}  // namespace sorites
