#include "qpn/sign.hpp"

#include <vector>

#include "doctest.h"

using namespace qpn;

namespace {

// Representative reals for each sign; ? stands for any real.
std::vector<double> samples(Sign s) {
  switch (s) {
    case Sign::Plus: return {0.5, 1, 3};
    case Sign::Minus: return {-0.5, -1, -3};
    case Sign::Zero: return {0};
    case Sign::Ambig: return {-3, -1, 0, 1, 3};
  }
  return {};
}

}  // namespace

TEST_CASE("product examples") {
  CHECK(sign_mul(Sign::Plus, Sign::Minus) == Sign::Minus);
  CHECK(sign_mul(Sign::Zero, Sign::Ambig) == Sign::Zero);
  CHECK(sign_mul(Sign::Ambig, Sign::Minus) == Sign::Ambig);
}

TEST_CASE("sum examples") {
  CHECK(sign_add(Sign::Plus, Sign::Plus) == Sign::Plus);
  CHECK(sign_add(Sign::Plus, Sign::Minus) == Sign::Ambig);
  CHECK(sign_add(Sign::Zero, Sign::Minus) == Sign::Minus);
}

TEST_CASE("negation examples") {
  CHECK(sign_neg(Sign::Plus) == Sign::Minus);
  CHECK(sign_neg(Sign::Zero) == Sign::Zero);
  CHECK(sign_neg(Sign::Ambig) == Sign::Ambig);
}

TEST_CASE("operators are sound for real arithmetic") {
  for (Sign a : kAllSigns)
    for (Sign b : kAllSigns)
      for (double x : samples(a))
        for (double y : samples(b)) {
          CHECK(admits(a * b, x * y));
          CHECK(admits(a + b, x + y));
          CHECK(admits(-a, -x));
        }
}

TEST_CASE("operators are as precise as the real arithmetic allows") {
  // Product and sum results other than ? are forced by the operands.
  for (Sign a : kAllSigns)
    for (Sign b : kAllSigns) {
      if (a != Sign::Ambig && b != Sign::Ambig)
        CHECK(a * b != Sign::Ambig);
      if (a == b || a == Sign::Zero || b == Sign::Zero)
        CHECK(a + b == (a == Sign::Zero ? b : a));
    }
}

TEST_CASE("text round trip") {
  for (Sign s : kAllSigns) {
    auto parsed = parse_sign(to_string(s));
    REQUIRE(parsed);
    CHECK(*parsed == s);
  }
  CHECK_FALSE(parse_sign("++"));
  CHECK_FALSE(parse_sign(""));
}

TEST_CASE("information ordering") {
  for (Sign s : kAllSigns) {
    CHECK(at_least_as_informative(s, s));
    CHECK(at_least_as_informative(s, Sign::Ambig));
    CHECK(at_least_as_informative(Sign::Zero, s));
    CHECK_FALSE(strictly_more_informative(s, s));
  }
  CHECK(strictly_more_informative(Sign::Plus, Sign::Ambig));
  CHECK_FALSE(at_least_as_informative(Sign::Plus, Sign::Minus));
  CHECK_FALSE(at_least_as_informative(Sign::Ambig, Sign::Plus));
}
