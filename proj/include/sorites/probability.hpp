#pragma once

#include <compare>
#include <string>

#include "sorites/error.hpp"
#include "sorites/scalar.hpp"

namespace sorites {

/// A scalar checked to lie in [0, 1]. Floating values may overshoot the
/// bounds by at most the default floating tolerance (rounding from sums of
/// sin^2 terms); they are clamped.
template <Scalar T>
class BasicProbability {
 public:
  BasicProbability() = default;

  explicit BasicProbability(T value) : value_(std::move(value)) {
    if constexpr (ScalarTraits<T>::exact) {
      if (value_ < 0 || value_ > 1)
        throw Error(Errc::InvalidModel, "probability out of [0,1]: " + ScalarTraits<T>::format(value_));
    } else {
      const T tol = ScalarTraits<T>::default_tolerance();
      if (!(value_ >= -tol && value_ <= 1 + tol))
        throw Error(Errc::InvalidModel, "probability out of [0,1]: " + ScalarTraits<T>::format(value_));
      if (value_ < 0) value_ = 0;
      if (value_ > 1) value_ = 1;
    }
  }

  [[nodiscard]] const T& value() const noexcept { return value_; }
  [[nodiscard]] BasicProbability complement() const { return BasicProbability(T(1 - value_)); }

  friend BasicProbability operator*(const BasicProbability& a, const BasicProbability& b) {
    return BasicProbability(T(a.value_ * b.value_));
  }
  /// Sum of probabilities of disjoint events; fails if the result leaves [0,1].
  friend BasicProbability operator+(const BasicProbability& a, const BasicProbability& b) {
    return BasicProbability(T(a.value_ + b.value_));
  }

  friend bool operator==(const BasicProbability& a, const BasicProbability& b) { return a.value_ == b.value_; }
  friend bool operator<(const BasicProbability& a, const BasicProbability& b) { return a.value_ < b.value_; }
  friend bool operator==(const BasicProbability& a, const T& b) { return a.value_ == b; }

  [[nodiscard]] std::string str() const { return ScalarTraits<T>::format(value_); }

 private:
  T value_{0};
};

using Probability = BasicProbability<Rational>;
using FloatProbability = BasicProbability<double>;

}  // namespace sorites
