#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <concepts>
#include <optional>
#include <string>
#include <string_view>

namespace treeprob {

/// Arbitrary-precision fraction used by the exact numeric mode.
using Rational = boost::multiprecision::mpq_rational;

/// The two numeric modes: 64-bit float and exact rational.
template <typename T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

template <Scalar T>
inline constexpr bool is_exact_v = std::same_as<T, Rational>;

/// Absolute tolerance on |sum(P_L) - 1| when validating float-mode input.
inline constexpr double kMassTolerance = 1e-9;

/// Relative tolerance for float-mode identity checks (LANSIT and friends).
inline constexpr double kIdentityTolerance = 1e-9;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

template <Scalar To, Scalar From>
To scalar_cast(const From& x) {
  if constexpr (std::same_as<To, From>) {
    return x;
  } else if constexpr (std::same_as<To, double>) {
    return to_double(x);
  } else {
    return Rational(x);  // binary fractions convert exactly
  }
}

/// sum_k w_k x_k for weights in mode T and double values. In exact mode the
/// products are accumulated exactly and rounded once, so e.g. exact weights
/// summing to one times a constant value give that value exactly.
/// Non-finite values with a positive weight propagate; zero weights are skipped.
template <Scalar T>
class WeightedSum {
 public:
  void add(const T& weight, double value) {
    if (weight == 0) {
      return;
    }
    if (!std::isfinite(value)) {
      special_ += value;
    } else if constexpr (is_exact_v<T>) {
      exact_ += weight * Rational(value);
    } else {
      exact_ += weight * value;
    }
  }
  double value() const { return special_ != 0.0 || std::isnan(special_) ? special_ : to_double(exact_); }

 private:
  T exact_{0};
  double special_ = 0.0;
};

/// True when `sum` counts as a total probability of one in mode T.
template <Scalar T>
bool is_unit_mass(const T& sum) {
  if constexpr (is_exact_v<T>) {
    return sum == 1;
  } else {
    return sum > 1.0 - kMassTolerance && sum < 1.0 + kMassTolerance;
  }
}

/// Residual acceptance: exact zero in rational mode, relative tolerance otherwise.
template <Scalar T>
bool residual_ok(const T& residual, const T& scale) {
  if constexpr (is_exact_v<T>) {
    return residual == 0;
  } else {
    using std::abs;
    return abs(residual) <= kIdentityTolerance * std::max(1.0, abs(scale));
  }
}

/// Parses "p/q" or "p" (optional sign) into a canonical fraction.
std::optional<Rational> parse_rational(std::string_view text);

/// Parses a decimal such as "0.25", "1e-3" or "3".
std::optional<double> parse_decimal(std::string_view text);

/// Canonical "p/q" (reduced, positive denominator); integers print without "/1".
std::string format_rational(const Rational& value);

/// Shortest decimal that round-trips the 64-bit value.
std::string format_double(double value);

inline std::string format_scalar(double value) { return format_double(value); }
inline std::string format_scalar(const Rational& value) { return format_rational(value); }

}  // namespace treeprob
