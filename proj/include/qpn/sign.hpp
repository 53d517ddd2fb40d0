#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace qpn {

/// Qualitative sign of a relation. Ambig is the unknown/non-monotone sign.
enum class Sign : std::uint8_t { Plus, Minus, Zero, Ambig };

inline constexpr std::array<Sign, 4> kAllSigns = {Sign::Plus, Sign::Minus,
                                                  Sign::Zero, Sign::Ambig};

/// Sign of a product (the ⊗ operator).
constexpr Sign sign_mul(Sign a, Sign b) {
  if (a == Sign::Zero || b == Sign::Zero) return Sign::Zero;
  if (a == Sign::Ambig || b == Sign::Ambig) return Sign::Ambig;
  return a == b ? Sign::Plus : Sign::Minus;
}

/// Sign of a sum (the ⊕ operator).
constexpr Sign sign_add(Sign a, Sign b) {
  if (a == Sign::Zero) return b;
  if (b == Sign::Zero) return a;
  if (a == b) return a;
  return Sign::Ambig;
}

/// Sign of a negation (the ⊖ operator).
constexpr Sign sign_neg(Sign a) {
  switch (a) {
    case Sign::Plus:
      return Sign::Minus;
    case Sign::Minus:
      return Sign::Plus;
    default:
      return a;
  }
}

constexpr Sign operator*(Sign a, Sign b) { return sign_mul(a, b); }
constexpr Sign operator+(Sign a, Sign b) { return sign_add(a, b); }
constexpr Sign operator-(Sign a) { return sign_neg(a); }

/// Information ordering. Signs are read as the sets of values they admit
/// under the non-strict reading: 0 = {0}, + = [0, inf), - = (-inf, 0],
/// ? = everything. `a` is at least as informative as `b` when a's set is
/// contained in b's.
constexpr bool at_least_as_informative(Sign a, Sign b) {
  if (a == b || b == Sign::Ambig) return true;
  return a == Sign::Zero;
}

constexpr bool strictly_more_informative(Sign a, Sign b) {
  return a != b && at_least_as_informative(a, b);
}

/// Sign of a real number.
constexpr Sign sign_of(double x) {
  if (x > 0) return Sign::Plus;
  if (x < 0) return Sign::Minus;
  return Sign::Zero;
}

/// True when the real value `x` lies in the set denoted by `s` under the
/// strict reading (+ means > 0).
constexpr bool admits(Sign s, double x) {
  switch (s) {
    case Sign::Plus:
      return x > 0;
    case Sign::Minus:
      return x < 0;
    case Sign::Zero:
      return x == 0;
    case Sign::Ambig:
      return true;
  }
  return false;
}

/// "+", "-", "0" or "?".
std::string_view to_string(Sign s);
char to_char(Sign s);

/// Accepts "+", "-", "0", "?" (and the Unicode minus sign).
std::optional<Sign> parse_sign(std::string_view text);

}  // namespace qpn
