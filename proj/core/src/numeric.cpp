#include "treeprob/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace treeprob {
namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  const auto slash = text.find('/');
  const auto num_text = text.substr(0, slash);
  const auto den_text = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
  if (!all_digits(num_text) || !all_digits(den_text)) {
    return std::nullopt;
  }
  using boost::multiprecision::mpz_int;
  const mpz_int num{std::string(num_text)};
  const mpz_int den{std::string(den_text)};
  if (den == 0) {
    return std::nullopt;
  }
  Rational value{num, den};  // the (num, den) constructor canonicalizes
  return negative ? Rational{-value} : value;
}

std::optional<double> parse_decimal(std::string_view text) {
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
  }
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string format_rational(const Rational& value) {
  // str() of a canonical mpq already omits a unit denominator.
  return value.str();
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

}  // namespace treeprob
