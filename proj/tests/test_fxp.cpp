#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "neurocore/error.hpp"
#include "neurocore/fxp.hpp"

using namespace neurocore;
using namespace neurocore::fxp;
namespace F = neurocore::fxp::formats;

namespace {

constexpr int kPropertyCases = 100000;

bool in_range(Fixed x) {
  return x.raw() >= x.format().min_raw() && x.raw() <= x.format().max_raw();
}

// Random raw value biased toward the extremes of the format.
std::int64_t random_raw(std::mt19937_64& rng, FixedFormat fmt) {
  std::uniform_int_distribution<int> pick(0, 9);
  switch (pick(rng)) {
    case 0: return fmt.min_raw();
    case 1: return fmt.max_raw();
    case 2: return 0;
    case 3: return std::uniform_int_distribution<std::int64_t>(-4, 4)(rng);
    default:
      return std::uniform_int_distribution<std::int64_t>(fmt.min_raw(),
                                                         fmt.max_raw())(rng);
  }
}

FixedFormat random_format(std::mt19937_64& rng) {
  const int width = std::uniform_int_distribution<int>(1, 32)(rng);
  const int frac = std::uniform_int_distribution<int>(0, width - 1)(rng);
  return {width, frac};
}

}  // namespace

TEST_CASE("format validity") {
  CHECK(FixedFormat{24, 12}.valid());
  CHECK(FixedFormat{1, 0}.valid());
  CHECK(FixedFormat{32, 31}.valid());
  CHECK_FALSE(FixedFormat{0, 0}.valid());
  CHECK_FALSE(FixedFormat{33, 12}.valid());
  CHECK_FALSE(FixedFormat{12, 12}.valid());
  CHECK_FALSE(FixedFormat{12, -1}.valid());
  CHECK(FixedFormat{24, 12}.min_raw() == -8388608);
  CHECK(FixedFormat{24, 12}.max_raw() == 8388607);
  CHECK_THROWS_AS(checked({40, 3}), Error);
  CHECK_THROWS_AS(encode(1.0, {0, 0}), Error);
}

TEST_CASE("encode examples") {
  CHECK(encode(1.0, {24, 12}).raw() == 4096);
  CHECK(encode(-65.0, {24, 12}).raw() == -266240);
  CHECK(encode(0.2, {16, 12}).raw() == 819);
}

TEST_CASE("encode rounds to nearest with ties away from zero") {
  const FixedFormat q0{16, 0};
  CHECK(encode(2.5, q0).raw() == 3);
  CHECK(encode(-2.5, q0).raw() == -3);
  CHECK(encode(2.4, q0).raw() == 2);
  CHECK(encode(-2.6, q0).raw() == -3);
}

TEST_CASE("encode saturates and rejects non-finite input") {
  CHECK(encode(1e9, F::V).raw() == F::V.max_raw());
  CHECK(encode(-1e9, F::V).raw() == F::V.min_raw());
  CHECK_THROWS_AS(encode(std::numeric_limits<double>::infinity(), F::V), Error);
  CHECK_THROWS_AS(encode(std::nan(""), F::V), Error);
}

TEST_CASE("decode examples") {
  CHECK(decode(Fixed::from_raw(4096, {24, 12})) == 1.0);
  CHECK(decode(Fixed::from_raw(-266240, {24, 12})) == -65.0);
  CHECK(decode(Fixed::from_raw(80, {16, 3})) == 10.0);
}

TEST_CASE("sat_add examples") {
  const Fixed x = encode(12.75, F::V);
  CHECK(sat_add(Fixed::from_raw(0, F::V), x) == x);
  const Fixed top = Fixed::from_raw(F::V.max_raw(), F::V);
  CHECK(sat_add(top, Fixed::from_raw(1, F::V)) == top);
  CHECK(sat_add(encode(-65.0, F::V), encode(5.0, F::V)) == encode(-60.0, F::V));
  CHECK_THROWS_AS(sat_add(encode(1.0, F::V), encode(1.0, F::AB)), Error);
  CHECK(sat_sub(encode(-65.0, F::V), encode(5.0, F::V)) == encode(-70.0, F::V));
  CHECK(sat_neg(Fixed::from_raw(F::V.min_raw(), F::V)).raw() == F::V.max_raw());
}

TEST_CASE("mul_rescale examples") {
  const Fixed x = encode(-3.3, F::V);
  CHECK(mul_rescale(encode(1.0, F::V), x) == x);
  CHECK(mul_rescale(encode(0.5, F::V), encode(0.5, F::V)).raw() == 1024);
  CHECK(mul_rescale(encode(-1.0, F::V), encode(0.5, F::V)).raw() == -2048);
  // Floor of a negative product: -1 * 1 LSB >> 12 rounds down.
  CHECK(mul_rescale(Fixed::from_raw(-1, F::V), Fixed::from_raw(1, F::V)).raw() ==
        -1);
  // Result takes the left operand's format; the shift uses the right's.
  const Fixed r = mul_rescale(encode(2.0, F::REG), encode(0.04, F::FINE));
  CHECK(r.format() == F::REG);
  CHECK(r.raw() == (8192LL * 671089LL) >> 24);
}

TEST_CASE("shift examples") {
  CHECK(shr(Fixed::from_raw(4096, F::V), 3).raw() == 512);
  CHECK(shr(Fixed::from_raw(-1, F::V), 1).raw() == -1);
  CHECK(shr(Fixed::from_raw(80, F::DA), 0).raw() == 80);
  CHECK(shr(Fixed::from_raw(-9, F::V), 3).raw() == -2);
  CHECK(shl(Fixed::from_raw(F::V.max_raw() / 2, F::V), 4).raw() == F::V.max_raw());
  CHECK(shr(Fixed::from_raw(5, F::V), 40).raw() == 0);
  CHECK(shr(Fixed::from_raw(-5, F::V), 40).raw() == -1);
  CHECK_THROWS_AS(shr(Fixed::from_raw(1, F::V), -1), Error);
  CHECK_THROWS_AS(shl(Fixed::from_raw(1, F::V), -1), Error);
}

TEST_CASE("format conversion") {
  // DA Q3 -> Q12 is a left shift by nine.
  CHECK(convert(Fixed::from_raw(8, F::DA), F::V).raw() == 4096);
  // Narrowing floors, round_to rounds.
  CHECK(convert(Fixed::from_raw(4095, F::V), F::DA).raw() == 7);
  CHECK(round_to(Fixed::from_raw(4095, F::V), F::DA).raw() == 8);
  CHECK(round_to(Fixed::from_raw(-256, F::V), F::DA).raw() == -1);
  CHECK(requantize(400, 12, F::DA).raw() == 1);   // 0.0977 -> 0.125
  CHECK(requantize(204, 12, F::DA).raw() == 0);   // 0.0498 -> 0
  CHECK(compare(encode(1.0, F::V), encode(0.5, F::AB)) > 0);
  CHECK(compare(encode(0.5, F::V), encode(0.5, F::AB)) == 0);
  CHECK(compare(encode(-1.0, F::V), encode(0.5, F::DA)) < 0);
}

TEST_CASE("closure: every operation stays in range") {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> shift(0, 40);
  std::uniform_real_distribution<double> real(-1e7, 1e7);
  for (int i = 0; i < kPropertyCases; ++i) {
    const FixedFormat fa = random_format(rng);
    const FixedFormat fb = random_format(rng);
    const Fixed a = Fixed::from_raw(random_raw(rng, fa), fa);
    const Fixed a2 = Fixed::from_raw(random_raw(rng, fa), fa);
    const Fixed b = Fixed::from_raw(random_raw(rng, fb), fb);
    const int n = shift(rng);
    REQUIRE(in_range(encode(real(rng), fa)));
    REQUIRE(in_range(sat_add(a, a2)));
    REQUIRE(in_range(sat_sub(a, a2)));
    REQUIRE(in_range(sat_neg(a)));
    REQUIRE(in_range(mul_rescale(a, b)));
    REQUIRE(in_range(shr(a, n)));
    REQUIRE(in_range(shl(a, n)));
    REQUIRE(in_range(convert(a, fb)));
    REQUIRE(in_range(round_to(a, fb)));
    REQUIRE(in_range(requantize(static_cast<std::int64_t>(real(rng)) * 1024,
                                fa.frac_bits, fb)));
  }
}

TEST_CASE("sat_add is monotone in each argument") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < kPropertyCases; ++i) {
    const FixedFormat f = random_format(rng);
    std::int64_t x = random_raw(rng, f), y = random_raw(rng, f);
    if (x > y) std::swap(x, y);
    const Fixed other = Fixed::from_raw(random_raw(rng, f), f);
    const Fixed lo = Fixed::from_raw(x, f), hi = Fixed::from_raw(y, f);
    REQUIRE(sat_add(lo, other).raw() <= sat_add(hi, other).raw());
    REQUIRE(sat_add(other, lo).raw() <= sat_add(other, hi).raw());
  }
}

TEST_CASE("decode(encode(x)) is within half an LSB") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < kPropertyCases; ++i) {
    const FixedFormat f = random_format(rng);
    const double lo = static_cast<double>(f.min_raw()) / std::ldexp(1.0, f.frac_bits);
    const double hi = static_cast<double>(f.max_raw()) / std::ldexp(1.0, f.frac_bits);
    const double x = std::uniform_real_distribution<double>(lo, hi)(rng);
    REQUIRE(std::abs(decode(encode(x, f)) - x) <=
            std::ldexp(1.0, -f.frac_bits - 1) * (1 + 1e-12));
  }
}

TEST_CASE("mul_rescale commutes for matching formats") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < kPropertyCases; ++i) {
    const FixedFormat f = random_format(rng);
    const Fixed a = Fixed::from_raw(random_raw(rng, f), f);
    const Fixed b = Fixed::from_raw(random_raw(rng, f), f);
    REQUIRE(mul_rescale(a, b) == mul_rescale(b, a));
  }
}

TEST_CASE("shr composes") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> shift(0, 20);
  for (int i = 0; i < kPropertyCases; ++i) {
    const FixedFormat f = random_format(rng);
    const Fixed a = Fixed::from_raw(random_raw(rng, f), f);
    const int m = shift(rng), n = shift(rng);
    REQUIRE(shr(a, m + n) == shr(shr(a, m), n));
  }
}

TEST_CASE("shr by 3 matches multiplying by 1/8 within one LSB") {
  std::mt19937_64 rng(19);
  for (int i = 0; i < kPropertyCases; ++i) {
    const Fixed a = Fixed::from_raw(random_raw(rng, F::REG), F::REG);
    const double exact = decode(a) / 8.0;
    REQUIRE(std::abs(decode(shr(a, 3)) - exact) <= std::ldexp(1.0, -12));
  }
}
